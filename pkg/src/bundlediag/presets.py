"""Built-in scenarios and the quantum generation of their empirical models."""

from __future__ import annotations

from bundlediag.model import EmpiricalModel, ModelError, load_model, outcome_key
from bundlediag.quantum import (
    MeasurementAssignment,
    PauliWord,
    QuantumError,
    StateVector,
    bell_state,
    cluster_ring_state,
    ghz_ab_state,
    joint_distribution,
)
from bundlediag.scenario import Context, Observable, Scenario, require_valid

PRESETS = ("bell", "pr-box", "ghz-ab", "cluster-ring-5")

# Raw floats are rounded to this many decimals; exact dyadic values come out clean.
PROB_DECIMALS = 15

CLUSTER_NOTE = (
    "The five-qubit ring cluster model is described in the literature as contextual, on the grounds "
    "that the triangle Z_1=0, X_2=0, Z_3=0 admits no extension. Exhaustive search over all 1024 "
    "assignments finds 32 global sections (the all-zero assignment among them) and every supported "
    "section extends, so this tool classifies the model as noncontextual. The published "
    "contextuality claim is not reproduced."
)

CLUSTER_WORDS = (
    ("C1", "XZ11Z"),
    ("C2", "ZXZ11"),
    ("C3", "1ZXZ1"),
    ("C4", "11ZXZ"),
    ("C5", "Z11ZX"),
    ("C6", "ZX1XZ"),
    ("C7", "ZZX1X"),
    ("C8", "XZZX1"),
    ("C9", "1XZZX"),
    ("C10", "X1XZZ"),
)

PR_BOX_TABLE = {
    "C1": {"00": 0.5, "11": 0.5},
    "C2": {"00": 0.5, "11": 0.5},
    "C3": {"00": 0.5, "11": 0.5},
    "C4": {"10": 0.5, "01": 0.5},
}


def _contexts_from_words(observables, words) -> list[Context]:
    """Contexts from Pauli words; letter L on qubit labelled q becomes observable ``L_q``."""
    contexts = []
    for name, word in words:
        w = PauliWord.parse(word)
        members = tuple(f"{l}_{observables[q]}" for q, l in enumerate(w.letters) if l != "I")
        contexts.append(Context(name, members, str(w)[1:]))
    return contexts


def bell_scenario() -> Scenario:
    obs = tuple(Observable(o) for o in ("X_A", "X_B", "Z_A", "Z_B"))
    ctxs = _contexts_from_words("AB", [("C1", "XX"), ("C2", "XZ"), ("C3", "ZX"), ("C4", "ZZ")])
    return Scenario(obs, tuple(ctxs))


def pr_box_scenario() -> Scenario:
    return Scenario.build(
        ["N_A", "N_B", "M_A", "M_B"],
        {"C1": ["N_A", "N_B"], "C2": ["N_A", "M_B"], "C3": ["M_A", "N_B"], "C4": ["M_A", "M_B"]},
    )


def ghz_ab_scenario() -> Scenario:
    obs = tuple(Observable(o) for o in ("X_A", "X_B", "X_C", "Y_A", "Y_B", "Y_C"))
    ctxs = _contexts_from_words("ABC", [("C1", "XXX"), ("C2", "XYY"), ("C3", "YXY"), ("C4", "YYX")])
    return Scenario(obs, tuple(ctxs))


def cluster_ring_scenario() -> Scenario:
    obs = tuple(Observable(f"{l}_{i}") for l in "XZ" for i in range(1, 6))
    ctxs = _contexts_from_words("12345", CLUSTER_WORDS)
    return Scenario(obs, tuple(ctxs))


def measurement_map(scenario: Scenario) -> dict[str, tuple[int, str]]:
    """Observable id -> (qubit, letter), read off the contexts' Pauli words."""
    mapping: dict[str, tuple[int, str]] = {}
    for ctx in scenario.contexts:
        if ctx.word is None:
            raise ModelError(f"context {ctx.name!r} has no Pauli word; cannot simulate it")
        placed = MeasurementAssignment.from_word(ctx.word).context
        if len(placed) != len(ctx.observables):
            raise ModelError(f"word {ctx.word!r} does not match the {len(ctx)} observables of {ctx.name!r}")
        for obs, ql in zip(ctx.observables, placed):
            if mapping.setdefault(obs, ql) != ql:
                raise ModelError(f"observable {obs!r} is measured inconsistently across contexts")
    return mapping


def generate_model(scenario: Scenario, psi: StateVector, preset: str | None = None, notes=()) -> EmpiricalModel:
    require_valid(scenario)
    mapping = measurement_map(scenario)
    n = psi.n
    if any(q >= n for q, _ in mapping.values()):
        raise QuantumError(f"contexts address qubits beyond the {n}-qubit state")
    tables = {}
    for ctx in scenario.contexts:
        assignment = MeasurementAssignment(tuple(mapping[o] for o in ctx.observables))
        probs = joint_distribution(psi, assignment)
        outcomes = _outcomes(len(ctx))
        tables[ctx.name] = {outcome_key(o): round(float(p), PROB_DECIMALS) + 0.0 for o, p in zip(outcomes, probs)}
    return load_model(scenario, tables, mode="strict", notes=notes, preset=preset)


def _outcomes(k: int):
    return [tuple((i >> (k - 1 - b)) & 1 for b in range(k)) for i in range(1 << k)]


def preset(name: str) -> tuple[Scenario, EmpiricalModel]:
    if name == "bell":
        sc = bell_scenario()
        return sc, generate_model(sc, bell_state(), preset=name)
    if name == "pr-box":
        sc = pr_box_scenario()
        return sc, load_model(sc, PR_BOX_TABLE, mode="strict", preset=name)
    if name == "ghz-ab":
        sc = ghz_ab_scenario()
        return sc, generate_model(sc, ghz_ab_state(), preset=name)
    if name == "cluster-ring-5":
        sc = cluster_ring_scenario()
        return sc, generate_model(sc, cluster_ring_state(5), preset=name, notes=(CLUSTER_NOTE,))
    raise ModelError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


def preset_state(name: str) -> StateVector:
    states = {"bell": bell_state, "ghz-ab": ghz_ab_state, "cluster-ring-5": lambda: cluster_ring_state(5)}
    if name not in states:
        raise ModelError(f"preset {name!r} has no quantum state")
    return states[name]()
