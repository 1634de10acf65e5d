"""Global sections: brute-force oracle, backtracking extension, GF(2) parity certificates.

The classification follows the usual hierarchy: a support model is
*noncontextual* when every supported section extends to a global section,
*strongly contextual* when there is no global section at all, and *logically
contextual* in between.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from typing import Any, Optional, Union

import numpy as np

from bundlediag import _accel
from bundlediag.model import ModelError, Outcome, SupportModel, outcome_key, parse_outcome
from bundlediag.scenario import Context, GlobalAssignment, Section

ORACLE_CAP = 1 << 24
VERIFY_CAP = 1 << 20

NONCONTEXTUAL = "noncontextual"
LOGICAL = "logically_contextual"
STRONG = "strongly_contextual"
LEVELS = (NONCONTEXTUAL, LOGICAL, STRONG)


class OracleTooLarge(ModelError):
    pass


class CertificateError(RuntimeError):
    """A produced witness failed its own re-check; indicates a solver bug."""


def is_global_section(sm: SupportModel, g: Section) -> bool:
    values = g.as_dict()
    missing = set(sm.scenario.ids) - set(values)
    if missing:
        raise ModelError(f"assignment is not total; missing {sorted(missing)}")
    return all(
        tuple(values[o] for o in ctx.observables) in sm.support[ctx.name] for ctx in sm.scenario.contexts
    )


# -- brute-force oracle ------------------------------------------------------


def _kernel_inputs(sm: SupportModel):
    sc = sm.scenario
    arities = np.array([o.outcome_arity for o in sc.observables], dtype=np.int64)
    strides = np.ones(len(arities), dtype=np.int64)
    for i in range(len(arities) - 2, -1, -1):
        strides[i] = strides[i + 1] * arities[i + 1]
    ctx_obs, ctx_strides, ctx_offsets, table_offsets, tables = [], [], [0], [0], []
    for ctx in sc.contexts:
        members = [sc.index(o) for o in ctx.observables]
        local = [1] * len(members)
        for j in range(len(members) - 2, -1, -1):
            local[j] = local[j + 1] * int(arities[members[j + 1]])
        size = local[0] * int(arities[members[0]])
        table = np.zeros(size, dtype=np.uint8)
        for t in sm.support[ctx.name]:
            table[sum(v * s for v, s in zip(t, local))] = 1
        ctx_obs += members
        ctx_strides += local
        ctx_offsets.append(len(ctx_obs))
        table_offsets.append(table_offsets[-1] + size)
        tables.append(table)
    return (
        arities,
        strides,
        np.array(ctx_obs, dtype=np.int64),
        np.array(ctx_strides, dtype=np.int64),
        np.array(ctx_offsets, dtype=np.int64),
        np.array(table_offsets[:-1], dtype=np.int64),
        np.concatenate(tables),
    )


def assignment_space(sm: SupportModel) -> int:
    return math.prod(o.outcome_arity for o in sm.scenario.observables)


def global_section_mask(sm: SupportModel, cap: int = ORACLE_CAP, backend: Optional[str] = None) -> np.ndarray:
    """Boolean mask over all assignments in mixed-radix order (first observable most significant)."""
    total = assignment_space(sm)
    if total > cap:
        raise OracleTooLarge(f"{total} assignments exceed the oracle cap of {cap}")
    args = _kernel_inputs(sm) + (0, total)
    if backend is None:
        return _accel.global_mask(*args)
    if backend == "numba":
        if _accel.global_mask_numba is None:
            raise RuntimeError("numba is not installed")
        return _accel.global_mask_numba(*args)
    if backend == "numpy":
        return _accel.global_mask_numpy(*args)
    raise ValueError(f"unknown backend {backend!r}")


def enumerate_global_sections(sm: SupportModel, cap: int = ORACLE_CAP) -> list[GlobalAssignment]:
    """Every global section, by brute force over all assignments."""
    mask = global_section_mask(sm, cap)
    sc = sm.scenario
    arities = [o.outcome_arity for o in sc.observables]
    out = []
    for k in np.flatnonzero(mask):
        k = int(k)
        digits = []
        for a in reversed(arities):
            k, d = divmod(k, a)
            digits.append(d)
        out.append(GlobalAssignment(tuple(zip(sc.ids, reversed(digits)))))
    return out


# -- backtracking extension --------------------------------------------------


@dataclass
class TraceNode:
    """Facet nodes carry ``context``/``outcome``; assignment nodes ``observable``/``value``.

    ``status`` is ``open`` for inner nodes, ``incompatible`` for a clash with an
    earlier assignment, ``success`` where a global section was completed.
    ``marker`` is ``+`` on clashes, ``*``/``**``/... on revisits of the seed's
    observables (one star per position in the seed context), ``=`` on other revisits.
    """

    kind: str
    context: Optional[str] = None
    outcome: Optional[Outcome] = None
    observable: Optional[str] = None
    value: Optional[int] = None
    status: str = "open"
    marker: str = ""
    children: list["TraceNode"] = field(default_factory=list)

    def label(self) -> str:
        if self.kind == "facet":
            return f"{self.context}:{outcome_key(self.outcome)}"
        text = f"{self.observable}↦{self.value}"
        return f"{text} {self.marker}" if self.marker else text

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind, "status": self.status}
        if self.kind == "facet":
            d.update(context=self.context, outcome=outcome_key(self.outcome))
        else:
            d.update(observable=self.observable, value=self.value, marker=self.marker)
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d


@dataclass
class SearchTrace:
    root: TraceNode
    success: bool
    # Scenario context names in declaration order; renderers key colours on it.
    contexts: tuple[str, ...] = ()

    def nodes(self) -> Iterator[TraceNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaves(self) -> list[TraceNode]:
        return [n for n in self.nodes() if not n.children]

    def paths(self) -> Iterator[list[TraceNode]]:
        def walk(node, prefix):
            prefix = prefix + [node]
            if not node.children:
                yield prefix
            for c in node.children:
                yield from walk(c, prefix)

        yield from walk(self.root, [])

    def __len__(self) -> int:
        return sum(1 for _ in self.nodes())


@dataclass
class ExtensionResult:
    extension: Optional[GlobalAssignment]
    trace: Optional[SearchTrace]

    @property
    def success(self) -> bool:
        return self.extension is not None


def seed_context(sm: SupportModel, seed: Section) -> Context:
    for ctx in sm.scenario.contexts:
        if frozenset(ctx.observables) == seed.domain:
            return ctx
    raise ModelError(f"seed {seed} is not a section over any context")


def parse_seed(sm: SupportModel, text: str) -> Section:
    """Seed syntax ``C2:000``: context name, colon, outcome digits in context order."""
    name, sep, digits = text.partition(":")
    if not sep:
        raise ModelError(f"seed {text!r} must look like 'C1:011'")
    ctx = sm.scenario.context(name.strip())
    return Section.from_tuple(ctx.observables, parse_outcome(sm.scenario, ctx, digits))


def extend_section(sm: SupportModel, seed: Section, want_trace: bool = True) -> ExtensionResult:
    """Depth-first search for a global section restricting to ``seed``.

    Contexts are taken greedily: the unexplored one sharing most already-assigned
    observables, ties broken by declaration order. Supported tuples are tried in
    lexicographic order. The search is complete, so failure proves non-extendability.
    """
    sc = sm.scenario
    ctx0 = seed_context(sm, seed)
    t0 = seed.values_for(ctx0.observables)
    if t0 not in sm.support[ctx0.name]:
        raise ModelError(f"seed {ctx0.name}:{outcome_key(t0)} is not in the support")

    contexts = sc.contexts
    supports = [sorted(sm.support[c.name]) for c in contexts]
    seed_pos = {o: i for i, o in enumerate(ctx0.observables)}
    assigned: dict[str, int] = dict(zip(ctx0.observables, t0))
    explored = [c.name == ctx0.name for c in contexts]

    root = TraceNode("facet", context=ctx0.name, outcome=t0) if want_trace else None
    host = root
    if not all(explored) and want_trace:
        for obs, v in zip(ctx0.observables, t0):
            node = TraceNode("assign", observable=obs, value=v)
            host.children.append(node)
            host = node

    def pick() -> int:
        best, best_shared = -1, -1
        for i, ctx in enumerate(contexts):
            if explored[i]:
                continue
            shared = sum(1 for o in ctx.observables if o in assigned)
            if shared > best_shared:
                best, best_shared = i, shared
        return best

    def marker_for(obs: str) -> str:
        return "*" * (seed_pos[obs] + 1) if obs in seed_pos else "="

    def search(host: Optional[TraceNode]) -> bool:
        if all(explored):
            if host is not None:
                host.status = "success"
            return True
        i = pick()
        ctx = contexts[i]
        for t in supports[i]:
            node = TraceNode("facet", context=ctx.name, outcome=t) if host is not None else None
            if node is not None:
                host.children.append(node)
            cur, fresh, clash = node, [], False
            for obs, v in zip(ctx.observables, t):
                prev = assigned.get(obs)
                clash = prev is not None and prev != v
                if prev is None:
                    fresh.append((obs, v))
                if cur is not None:
                    marker = "+" if clash else ("" if prev is None else marker_for(obs))
                    child = TraceNode(
                        "assign", observable=obs, value=v, marker=marker, status="incompatible" if clash else "open"
                    )
                    cur.children.append(child)
                    cur = child
                if clash:
                    break
            if clash:
                continue
            assigned.update(fresh)
            explored[i] = True
            if search(cur):
                return True
            explored[i] = False
            for obs, _ in fresh:
                del assigned[obs]
        return False

    ok = search(host)
    extension = None
    if ok:
        extension = GlobalAssignment(tuple(assigned.items()))
        if not is_global_section(sm, extension) or extension.values_for(ctx0.observables) != t0:
            raise CertificateError(f"search returned an invalid extension {extension}")
    trace = SearchTrace(root, ok, tuple(c.name for c in contexts)) if want_trace else None
    return ExtensionResult(extension, trace)


# -- parity systems over GF(2) ------------------------------------------------


@dataclass(frozen=True)
class ParityRow:
    context: str
    observables: tuple[str, ...]
    rhs: int


@dataclass(frozen=True)
class ParitySystem:
    variables: tuple[str, ...]
    rows: tuple[ParityRow, ...]

    def mask(self, row: ParityRow) -> int:
        m = 0
        for o in row.observables:
            m ^= 1 << self.variables.index(o)
        return m

    def describe(self) -> list[str]:
        return [f"{r.context}: {' + '.join(r.observables)} = {r.rhs}" for r in self.rows]


@dataclass(frozen=True)
class NotParityModel:
    context: Optional[str]
    reason: str


@dataclass(frozen=True)
class ParityContradiction:
    """Rows whose left-hand sides cancel mod 2 while their right-hand sides sum to 1."""

    rows: tuple[str, ...]

    def verify(self, ps: ParitySystem) -> bool:
        by_name = {r.context: r for r in ps.rows}
        lhs, rhs = 0, 0
        for name in self.rows:
            lhs ^= ps.mask(by_name[name])
            rhs ^= by_name[name].rhs
        return bool(self.rows) and lhs == 0 and rhs == 1


@dataclass(frozen=True)
class ParitySolution:
    assignment: GlobalAssignment


def _parity(t: Outcome) -> int:
    return sum(t) % 2


def build_parity_system(sm: SupportModel) -> Union[ParitySystem, NotParityModel]:
    sc = sm.scenario
    if any(o.outcome_arity != 2 for o in sc.observables):
        return NotParityModel(None, "parity systems need binary observables")
    rows = []
    for ctx in sc.contexts:
        supp = sm.support[ctx.name]
        full = 1 << len(ctx)
        if len(supp) == full:
            continue
        parities = {_parity(t) for t in supp}
        if len(parities) == 1 and len(supp) == full // 2:
            rows.append(ParityRow(ctx.name, ctx.observables, parities.pop()))
        else:
            return NotParityModel(ctx.name, f"support of {ctx.name!r} is not a parity class")
    return ParitySystem(sc.ids, tuple(rows))


def parity_obstruction(ps: ParitySystem) -> Union[ParitySolution, ParityContradiction]:
    """Gauss-Jordan elimination over GF(2), tracking which original rows combine."""
    work = [[ps.mask(r), r.rhs, 1 << i] for i, r in enumerate(ps.rows)]
    pivots: list[tuple[int, int]] = []  # (column, row index)
    r = 0
    for col in range(len(ps.variables)):
        bit = 1 << col
        p = next((k for k in range(r, len(work)) if work[k][0] & bit), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        for k in range(len(work)):
            if k != r and work[k][0] & bit:
                work[k][0] ^= work[r][0]
                work[k][1] ^= work[r][1]
                work[k][2] ^= work[r][2]
        pivots.append((col, r))
        r += 1
    bad = [w for w in work[r:] if w[1] == 1]
    if bad:
        combo = min(bad, key=lambda w: (bin(w[2]).count("1"), w[2]))[2]
        names = tuple(row.context for i, row in enumerate(ps.rows) if combo >> i & 1)
        cert = ParityContradiction(names)
        if not cert.verify(ps):
            raise CertificateError("parity certificate failed its own check")
        return cert
    values = dict.fromkeys(ps.variables, 0)
    for col, k in pivots:
        values[ps.variables[col]] = work[k][1]
    return ParitySolution(GlobalAssignment(tuple(values.items())))


# -- classification ------------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    level: str
    witness: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"level": self.level, "witness": self.witness}


def _restricts_to(g: Section, ctx: Context, t: Outcome) -> bool:
    return g.values_for(ctx.observables) == t


def classify(sm: SupportModel, use_parity: bool = True, verify: bool = True) -> Classification:
    if use_parity:
        ps = build_parity_system(sm)
        if isinstance(ps, ParitySystem):
            res = parity_obstruction(ps)
            if isinstance(res, ParityContradiction):
                result = Classification(STRONG, {"kind": "parity", "rows": list(res.rows)})
                if verify:
                    verify_classification(sm, result)
                return result

    found: list[GlobalAssignment] = []
    extensions, failures = [], []
    for n, ctx in enumerate(sm.scenario.contexts):
        for t in sorted(sm.support[ctx.name]):
            g = next((g for g in found if _restricts_to(g, ctx, t)), None)
            if g is None:
                g = extend_section(sm, Section.from_tuple(ctx.observables, t), want_trace=False).extension
                if g is not None:
                    found.append(g)
            if g is None:
                failures.append((ctx, t))
            else:
                extensions.append({"context": ctx.name, "tuple": outcome_key(t), "global": g.as_dict()})
        if n == 0 and not found:
            # Every global section restricts into the first context, so none exists.
            first = sm.scenario.contexts[0]
            result = Classification(
                STRONG,
                {"kind": "exhaustion", "context": first.name, "tuples": [outcome_key(t) for _, t in failures]},
            )
            break
    else:
        if not failures:
            result = Classification(NONCONTEXTUAL, {"kind": "extensions", "extensions": extensions})
        else:
            ctx, t = failures[0]
            result = Classification(
                LOGICAL,
                {
                    "kind": "non_extendable_section",
                    "context": ctx.name,
                    "tuple": outcome_key(t),
                    "global": found[0].as_dict(),
                },
            )
    if verify:
        verify_classification(sm, result)
    return result


def verify_classification(sm: SupportModel, c: Classification, cap: int = VERIFY_CAP) -> None:
    """Re-check a witness; the brute-force oracle is consulted when the space is small enough."""
    sc = sm.scenario
    w = c.witness
    oracle = enumerate_global_sections(sm, cap) if assignment_space(sm) <= cap else None

    def fail(msg: str) -> None:
        raise CertificateError(f"{c.level} witness rejected: {msg}")

    if c.level == NONCONTEXTUAL:
        covered = set()
        for e in w["extensions"]:
            g = GlobalAssignment.for_scenario(sc, e["global"])
            ctx = sc.context(e["context"])
            if not is_global_section(sm, g) or outcome_key(g.values_for(ctx.observables)) != e["tuple"]:
                fail(f"bad extension for {e['context']}:{e['tuple']}")
            covered.add((e["context"], e["tuple"]))
        expected = {(ctx.name, outcome_key(t)) for ctx in sc.contexts for t in sm.support[ctx.name]}
        if covered != expected:
            fail("not every supported section has an extension")
    elif c.level == LOGICAL:
        g = GlobalAssignment.for_scenario(sc, w["global"])
        if not is_global_section(sm, g):
            fail("claimed global section is not one")
        if oracle is not None:
            ctx = sc.context(w["context"])
            if any(outcome_key(h.values_for(ctx.observables)) == w["tuple"] for h in oracle):
                fail("oracle extends the claimed non-extendable section")
    elif c.level == STRONG:
        if w["kind"] == "parity":
            ps = build_parity_system(sm)
            if not isinstance(ps, ParitySystem) or not ParityContradiction(tuple(w["rows"])).verify(ps):
                fail("parity rows do not sum to 0 = 1")
        if oracle is not None and oracle:
            fail(f"oracle finds {len(oracle)} global sections")
    else:
        fail(f"unknown level {c.level!r}")


def oracle_classification(sm: SupportModel, cap: int = ORACLE_CAP) -> str:
    """Classification level computed from the brute-force oracle alone."""
    globals_ = enumerate_global_sections(sm, cap)
    if not globals_:
        return STRONG
    for ctx in sm.scenario.contexts:
        reached = {g.values_for(ctx.observables) for g in globals_}
        if reached != set(sm.support[ctx.name]):
            return LOGICAL
    return NONCONTEXTUAL


def extendable_by_oracle(sm: SupportModel, globals_: Sequence[Section], seed: Section) -> bool:
    ctx = seed_context(sm, seed)
    t = seed.values_for(ctx.observables)
    return any(_restricts_to(g, ctx, t) for g in globals_)
