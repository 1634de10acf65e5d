"""Measurement scenarios, the simplicial-complex base and sections over it.

Outcomes of an observable with arity ``k`` are the integers ``0..k-1``. For
binary observables outcome ``j`` stands for the eigenvalue ``(-1)**j``.

A :class:`Section` is a finite map from observable ids to outcomes. Sections are
hashable and compare by value, so they can live in sets.
"""

from __future__ import annotations

import itertools
import warnings
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Optional, Union


class ScenarioError(ValueError):
    """Raised for malformed scenarios or section operations outside their domain."""


@dataclass(frozen=True)
class Observable:
    id: str
    outcome_arity: int = 2
    layout_hint: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class Context:
    name: str
    observables: tuple[str, ...]
    # Optional Pauli word ("XZ11Z") used only when generating distributions.
    word: Optional[str] = None

    def __len__(self) -> int:
        return len(self.observables)


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class Scenario:
    observables: tuple[Observable, ...]
    contexts: tuple[Context, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "observables", tuple(self.observables))
        object.__setattr__(self, "contexts", tuple(self.contexts))

    @classmethod
    def build(
        cls,
        observables: Sequence[Union[str, Observable]],
        contexts: Union[Mapping[str, Sequence[str]], Sequence[tuple[str, Sequence[str]]]],
        arity: int = 2,
    ) -> "Scenario":
        """Shorthand constructor: ``Scenario.build(["a", "b"], {"C1": ["a", "b"]})``."""
        obs = tuple(o if isinstance(o, Observable) else Observable(o, arity) for o in observables)
        items = contexts.items() if isinstance(contexts, Mapping) else contexts
        ctxs = tuple(Context(name, tuple(members)) for name, members in items)
        return cls(obs, ctxs)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(o.id for o in self.observables)

    def index(self, obs_id: str) -> int:
        try:
            return self._index[obs_id]
        except KeyError:
            raise ScenarioError(f"unknown observable {obs_id!r}") from None

    def arity(self, obs_id: str) -> int:
        return self.observables[self.index(obs_id)].outcome_arity

    def context(self, name: str) -> Context:
        for ctx in self.contexts:
            if ctx.name == name:
                return ctx
        raise ScenarioError(f"unknown context {name!r}")

    def ordered(self, ids: Iterable[str]) -> tuple[str, ...]:
        """Return ``ids`` sorted by declaration order."""
        return tuple(sorted(set(ids), key=self.index))

    @property
    def _index(self) -> dict[str, int]:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {o.id: i for i, o in enumerate(self.observables)}
            object.__setattr__(self, "_index_cache", cache)
        return cache


@dataclass(frozen=True, eq=False)
class Section:
    """An outcome assignment over a finite set of observables."""

    items: tuple[tuple[str, int], ...] = field(default=())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Section):
            return NotImplemented
        return self.items == other.items

    def __hash__(self) -> int:
        return hash(self.items)

    def __post_init__(self) -> None:
        canonical = tuple(sorted(dict(self.items).items()))
        if len(canonical) != len(self.items):
            raise ScenarioError("section assigns an observable twice")
        for obs, value in canonical:
            if not isinstance(value, int) or value < 0:
                raise ScenarioError(f"outcome for {obs!r} must be a nonnegative int, got {value!r}")
        object.__setattr__(self, "items", canonical)

    @classmethod
    def of(cls, mapping: Mapping[str, int]) -> "Section":
        return cls(tuple((k, int(v)) for k, v in mapping.items()))

    @classmethod
    def from_tuple(cls, observables: Sequence[str], values: Sequence[int]) -> "Section":
        if len(observables) != len(values):
            raise ScenarioError("outcome tuple length does not match observables")
        return cls(tuple(zip(observables, (int(v) for v in values))))

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(k for k, _ in self.items)

    def as_dict(self) -> dict[str, int]:
        return dict(self.items)

    def __getitem__(self, obs_id: str) -> int:
        for k, v in self.items:
            if k == obs_id:
                return v
        raise KeyError(obs_id)

    def __len__(self) -> int:
        return len(self.items)

    def values_for(self, observables: Sequence[str]) -> tuple[int, ...]:
        d = self.as_dict()
        return tuple(d[o] for o in observables)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k}↦{v}" for k, v in self.items) + "}"


class GlobalAssignment(Section):
    """A section whose domain is every observable of a scenario."""

    @classmethod
    def for_scenario(cls, scenario: Scenario, mapping: Mapping[str, int]) -> "GlobalAssignment":
        g = cls(tuple((k, int(v)) for k, v in mapping.items()))
        if g.domain != frozenset(scenario.ids):
            missing = sorted(set(scenario.ids) - g.domain)
            extra = sorted(g.domain - set(scenario.ids))
            raise ScenarioError(f"not a global assignment (missing {missing}, unknown {extra})")
        check_section(scenario, g)
        return g


@dataclass(frozen=True)
class Incompatibility:
    """Witness that a family of sections cannot be glued."""

    observable: str
    first: int
    second: int


def check_section(scenario: Scenario, sec: Section) -> None:
    for obs, value in sec.items:
        if value >= scenario.arity(obs):
            raise ScenarioError(f"outcome {value} out of range for {obs!r}")


def validate_scenario(s: Scenario) -> list[Violation]:
    """Check the structural invariants; an empty list means the scenario is valid."""
    report: list[Violation] = []
    seen: set[str] = set()
    for o in s.observables:
        if o.id in seen:
            report.append(Violation("duplicate observable id", o.id, f"observable {o.id!r} declared twice"))
        seen.add(o.id)
        if o.outcome_arity < 2:
            report.append(Violation("bad arity", o.id, f"observable {o.id!r} has arity {o.outcome_arity} < 2"))

    names: set[str] = set()
    covered: set[str] = set()
    for ctx in s.contexts:
        if ctx.name in names:
            report.append(Violation("duplicate context name", ctx.name, f"context {ctx.name!r} declared twice"))
        names.add(ctx.name)
        if not ctx.observables:
            report.append(Violation("empty context", ctx.name, f"context {ctx.name!r} is empty"))
        if len(set(ctx.observables)) != len(ctx.observables):
            report.append(
                Violation("duplicate observable in context", ctx.name, f"context {ctx.name!r} repeats an observable")
            )
        for obs in ctx.observables:
            if obs not in seen:
                report.append(Violation("unknown observable", ctx.name, f"context {ctx.name!r} names unknown {obs!r}"))
        covered.update(ctx.observables)

    for a, b in itertools.permutations(s.contexts, 2):
        sa, sb = set(a.observables), set(b.observables)
        if sa <= sb and (sa != sb or s.contexts.index(a) > s.contexts.index(b)):
            report.append(
                Violation("context ⊂ context", a.name, f"context {a.name!r} is contained in context {b.name!r}")
            )

    for o in s.observables:
        if o.id not in covered:
            report.append(Violation("uncovered observable", o.id, f"observable {o.id!r} appears in no context"))
    return report


def require_valid(s: Scenario) -> None:
    report = validate_scenario(s)
    if report:
        raise ScenarioError("invalid scenario: " + "; ".join(str(v) for v in report))


def faces(s: Scenario) -> set[frozenset[str]]:
    """All nonempty subsets of the contexts (the downward closure)."""
    require_valid(s)
    out: set[frozenset[str]] = set()
    for ctx in s.contexts:
        members = ctx.observables
        for r in range(1, len(members) + 1):
            out.update(frozenset(c) for c in itertools.combinations(members, r))
    return out


def restrict(sec: Section, U: Iterable[str]) -> Section:
    U = frozenset(U)
    if not U <= sec.domain:
        raise ScenarioError(f"cannot restrict to {sorted(U - sec.domain)}: outside the section's domain")
    return Section(tuple((k, v) for k, v in sec.items if k in U))


def glue(sections: Iterable[Section]) -> Union[Section, Incompatibility]:
    """Glue pairwise-compatible sections, or report the first clash."""
    merged: dict[str, int] = {}
    for sec in sections:
        for obs, value in sec.items:
            prev = merged.setdefault(obs, value)
            if prev != value:
                return Incompatibility(obs, prev, value)
    return Section.of(merged)


def sections_over(s: Scenario, U: Iterable[str]) -> Iterator[Section]:
    """Every section over ``U``, lexicographic in declaration order."""
    U = list(U)
    if not U:
        raise ScenarioError("sections_over needs a nonempty observable set")
    ordered = s.ordered(U)
    ranges = [range(s.arity(o)) for o in ordered]
    for values in itertools.product(*ranges):
        yield Section(tuple(zip(ordered, values)))


# -- JSON ------------------------------------------------------------------

_OBS_KEYS = {"name", "arity", "layout"}
_CTX_KEYS = {"name", "observables", "word"}


def _check_keys(obj: Mapping[str, Any], allowed: set[str], where: str, strict: bool) -> None:
    unknown = sorted(set(obj) - allowed)
    if not unknown:
        return
    if strict:
        raise ScenarioError(f"unknown keys in {where}: {unknown}")
    warnings.warn(f"ignoring unknown keys in {where}: {unknown}", stacklevel=3)


def scenario_from_dict(data: Mapping[str, Any], strict: bool = False) -> Scenario:
    try:
        raw_obs = data["observables"]
        raw_ctx = data["contexts"]
    except (KeyError, TypeError):
        raise ScenarioError("scenario needs 'observables' and 'contexts' lists") from None
    observables = []
    for o in raw_obs:
        if not isinstance(o, Mapping) or "name" not in o:
            raise ScenarioError(f"malformed observable entry {o!r}")
        _check_keys(o, _OBS_KEYS, f"observable {o['name']!r}", strict)
        layout = o.get("layout")
        if layout is not None:
            if len(layout) != 2:
                raise ScenarioError(f"layout of {o['name']!r} must be [x, y]")
            layout = (float(layout[0]), float(layout[1]))
        observables.append(Observable(str(o["name"]), int(o.get("arity", 2)), layout))
    contexts = []
    for c in raw_ctx:
        if not isinstance(c, Mapping) or "name" not in c or "observables" not in c:
            raise ScenarioError(f"malformed context entry {c!r}")
        _check_keys(c, _CTX_KEYS, f"context {c['name']!r}", strict)
        contexts.append(Context(str(c["name"]), tuple(str(x) for x in c["observables"]), c.get("word")))
    return Scenario(tuple(observables), tuple(contexts))


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    observables = []
    for o in s.observables:
        entry: dict[str, Any] = {"name": o.id, "arity": o.outcome_arity}
        if o.layout_hint is not None:
            entry["layout"] = list(o.layout_hint)
        observables.append(entry)
    contexts = []
    for c in s.contexts:
        entry = {"name": c.name, "observables": list(c.observables)}
        if c.word is not None:
            entry["word"] = c.word
        contexts.append(entry)
    return {"observables": observables, "contexts": contexts}
