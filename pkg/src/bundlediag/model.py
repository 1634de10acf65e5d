"""Empirical models: per-context probability tables and their possibilistic supports."""

from __future__ import annotations

import itertools
import json
import math
import warnings
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

from bundlediag.scenario import (
    Context,
    Scenario,
    ScenarioError,
    Section,
    require_valid,
    scenario_from_dict,
    scenario_to_dict,
)

NORMALIZATION_TOL = 1e-9
SUPPORT_THRESHOLD = 1e-9
MARGINAL_TOL = 1e-9

Outcome = tuple[int, ...]
TupleKey = Union[str, Sequence[int]]


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ProbabilityTable:
    context_name: str
    probs: Mapping[Outcome, float]

    def p(self, outcome: Outcome) -> float:
        return self.probs.get(tuple(outcome), 0.0)

    def total(self) -> float:
        return math.fsum(self.probs.values())


@dataclass(frozen=True)
class EmpiricalModel:
    scenario: Scenario
    tables: tuple[ProbabilityTable, ...]
    mode: str = "strict"
    warnings: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    preset: Optional[str] = None

    def table(self, context_name: str) -> ProbabilityTable:
        for t in self.tables:
            if t.context_name == context_name:
                return t
        raise ModelError(f"unknown context {context_name!r}")


@dataclass(frozen=True)
class SupportModel:
    scenario: Scenario
    support: Mapping[str, frozenset[Outcome]]
    notes: tuple[str, ...] = field(default=())

    @classmethod
    def from_supports(
        cls, scenario: Scenario, supports: Mapping[str, Iterable[TupleKey]], notes: Sequence[str] = ()
    ) -> "SupportModel":
        require_valid(scenario)
        if set(supports) != {c.name for c in scenario.contexts}:
            raise ModelError("supports must be given for exactly the scenario's contexts")
        parsed = {}
        for ctx in scenario.contexts:
            tuples = frozenset(parse_outcome(scenario, ctx, key) for key in supports[ctx.name])
            if not tuples:
                raise ModelError(f"empty support for context {ctx.name!r}")
            parsed[ctx.name] = tuples
        return cls(scenario, parsed, tuple(notes))

    def sorted_support(self, context_name: str) -> list[Outcome]:
        return sorted(self.support[context_name])


def outcome_key(outcome: Outcome) -> str:
    """Compact digit string ("011"); comma separated once any outcome exceeds 9."""
    if all(v < 10 for v in outcome):
        return "".join(str(v) for v in outcome)
    return ",".join(str(v) for v in outcome)


def parse_outcome(scenario: Scenario, ctx: Context, key: TupleKey) -> Outcome:
    if isinstance(key, str):
        text = key.strip()
        parts = text.split(",") if "," in text else list(text)
        try:
            values = tuple(int(p) for p in parts)
        except ValueError:
            raise ModelError(f"malformed outcome tuple {key!r} for context {ctx.name!r}") from None
    else:
        values = tuple(int(v) for v in key)
    if len(values) != len(ctx.observables):
        raise ModelError(f"outcome tuple {key!r} has length {len(values)}, context {ctx.name!r} has {len(ctx)}")
    for obs, v in zip(ctx.observables, values):
        if not 0 <= v < scenario.arity(obs):
            raise ModelError(f"outcome {v} out of range for {obs!r} in tuple {key!r}")
    return values


def _parse_prob(value: Any, where: str) -> float:
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise ModelError(f"malformed probability {value!r} in {where}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelError(f"malformed probability {value!r} in {where}")
    return float(value)


def all_outcomes(scenario: Scenario, ctx: Context) -> list[Outcome]:
    return list(itertools.product(*(range(scenario.arity(o)) for o in ctx.observables)))


def load_model(
    scenario: Scenario,
    tables: Union[Mapping[str, Mapping[TupleKey, Any]], Iterable[ProbabilityTable]],
    mode: str = "strict",
    notes: Sequence[str] = (),
    preset: Optional[str] = None,
) -> EmpiricalModel:
    """Validate raw tables against the scenario.

    ``strict`` requires each table to sum to 1 within 1e-9. ``possibilistic``
    accepts any nonnegative weights and records a warning per unnormalized table.
    """
    if mode not in ("strict", "possibilistic"):
        raise ModelError(f"unknown mode {mode!r}")
    require_valid(scenario)
    if not isinstance(tables, Mapping):
        tables = {t.context_name: t.probs for t in tables}
    names = {c.name for c in scenario.contexts}
    unknown = sorted(set(tables) - names)
    if unknown:
        raise ModelError(f"unknown context(s) {unknown}")
    missing = [c.name for c in scenario.contexts if c.name not in tables]
    if missing:
        raise ModelError(f"missing table(s) for context(s) {missing}")

    out, notes_out = [], []
    for ctx in scenario.contexts:
        probs: dict[Outcome, float] = {}
        for key, raw in tables[ctx.name].items():
            outcome = parse_outcome(scenario, ctx, key)
            if outcome in probs:
                raise ModelError(f"duplicate outcome {key!r} in context {ctx.name!r}")
            p = _parse_prob(raw, f"context {ctx.name!r}")
            if not math.isfinite(p) or p < 0:
                raise ModelError(f"negative or non-finite probability {raw!r} for {key!r} in context {ctx.name!r}")
            probs[outcome] = p
        table = ProbabilityTable(ctx.name, dict(sorted(probs.items())))
        total = table.total()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            message = f"context {ctx.name!r}: probabilities sum to {total:.12g}, not 1"
            if mode == "strict":
                raise ModelError("normalization failure: " + message)
            notes_out.append(message)
        out.append(table)
    return EmpiricalModel(scenario, tuple(out), mode, tuple(notes_out), tuple(notes), preset)


def support_of(m: EmpiricalModel, threshold: float = SUPPORT_THRESHOLD) -> SupportModel:
    if threshold < 0:
        raise ModelError("threshold must be nonnegative")
    support = {}
    for table in m.tables:
        kept = frozenset(o for o, p in table.probs.items() if p > threshold)
        if not kept:
            raise ModelError(f"empty support for context {table.context_name!r} at threshold {threshold:g}")
        support[table.context_name] = kept
    return SupportModel(m.scenario, support, m.notes)


@dataclass(frozen=True)
class MarginalViolation:
    first: str
    second: str
    observables: tuple[str, ...]
    first_marginal: tuple[float, ...]
    second_marginal: tuple[float, ...]


def marginal(m: EmpiricalModel, ctx: Context, observables: Sequence[str]) -> tuple[float, ...]:
    """Marginal of a context's table on ``observables``, lexicographic over their outcomes."""
    sc = m.scenario
    pos = [ctx.observables.index(o) for o in observables]
    shape = [sc.arity(o) for o in observables]
    acc: dict[Outcome, list[float]] = {k: [] for k in itertools.product(*(range(a) for a in shape))}
    for outcome, p in m.table(ctx.name).probs.items():
        acc[tuple(outcome[i] for i in pos)].append(p)
    return tuple(math.fsum(v) for v in acc.values())


def check_marginal_compatibility(m: EmpiricalModel, tol: float = MARGINAL_TOL) -> list[MarginalViolation]:
    """Compare marginals on every pairwise context overlap; empty list means compatible."""
    if m.mode != "strict":
        raise ModelError("marginal compatibility is only defined for normalized (strict) models")
    report = []
    for a, b in itertools.combinations(m.scenario.contexts, 2):
        shared = m.scenario.ordered(set(a.observables) & set(b.observables))
        if not shared:
            continue
        ma, mb = marginal(m, a, shared), marginal(m, b, shared)
        if any(abs(x - y) > tol for x, y in zip(ma, mb)):
            report.append(MarginalViolation(a.name, b.name, shared, ma, mb))
    return report


def supported_sections(sm: SupportModel, context_name: str) -> list[Section]:
    """One section per supported tuple, in lexicographic tuple order."""
    try:
        ctx = sm.scenario.context(context_name)
    except ScenarioError as exc:
        raise ModelError(str(exc)) from None
    return [Section.from_tuple(ctx.observables, t) for t in sorted(sm.support[context_name])]


# -- JSON ------------------------------------------------------------------

_MODEL_KEYS = {
    "observables",
    "contexts",
    "distributions",
    "mode",
    "preset",
    "amplitudes",
    "notes",
    "certificate",
}


def model_from_dict(data: Mapping[str, Any], strict: bool = False) -> EmpiricalModel:
    unknown = sorted(set(data) - _MODEL_KEYS)
    if unknown:
        if strict:
            raise ModelError(f"unknown keys in model file: {unknown}")
        warnings.warn(f"ignoring unknown keys in model file: {unknown}", stacklevel=2)
    scenario = scenario_from_dict(data, strict=strict)
    if "distributions" not in data:
        raise ModelError("model file has no 'distributions'")
    tables: dict[str, Mapping[str, Any]] = {}
    for entry in data["distributions"]:
        if not isinstance(entry, Mapping) or "context" not in entry or "probs" not in entry:
            raise ModelError(f"malformed distribution entry {entry!r}")
        if entry["context"] in tables:
            raise ModelError(f"duplicate distribution for context {entry['context']!r}")
        tables[entry["context"]] = entry["probs"]
    return load_model(
        scenario,
        tables,
        mode=data.get("mode", "strict"),
        notes=tuple(data.get("notes", ())),
        preset=data.get("preset"),
    )


def model_to_dict(m: EmpiricalModel) -> dict[str, Any]:
    data = scenario_to_dict(m.scenario)
    data["mode"] = m.mode
    if m.preset is not None:
        data["preset"] = m.preset
    data["distributions"] = [
        {"context": t.context_name, "probs": {outcome_key(o): p for o, p in t.probs.items()}} for t in m.tables
    ]
    if m.notes:
        data["notes"] = list(m.notes)
    return data


def dumps_model(m: EmpiricalModel, extra: Optional[Mapping[str, Any]] = None) -> str:
    # json writes floats with repr(), the shortest string that round-trips exactly.
    data = model_to_dict(m)
    if extra:
        data.update(extra)
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def loads_model(text: str, strict: bool = False) -> EmpiricalModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid JSON: {exc}") from None
    if not isinstance(data, Mapping):
        raise ModelError("model file must contain a JSON object")
    return model_from_dict(data, strict=strict)
