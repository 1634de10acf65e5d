"""Shared fixtures for the test suite: random support models and a plain-Python oracle."""

import itertools
import random

from bundlediag.model import SupportModel
from bundlediag.scenario import Scenario, validate_scenario

RANDOM_SEED = 20240611
RANDOM_MODELS = 100


def brute_force_globals(sm: SupportModel) -> list[dict]:
    """All global assignments, by itertools over every outcome combination."""
    sc = sm.scenario
    found = []
    for values in itertools.product(*(range(o.outcome_arity) for o in sc.observables)):
        g = dict(zip(sc.ids, values))
        if all(tuple(g[o] for o in c.observables) in sm.support[c.name] for c in sc.contexts):
            found.append(g)
    return found


def oracle_extends(globals_: list[dict], context, outcome) -> bool:
    return any(tuple(g[o] for o in context.observables) == tuple(outcome) for g in globals_)


def oracle_level(sm: SupportModel, globals_: list[dict]) -> str:
    if not globals_:
        return "strongly_contextual"
    for c in sm.scenario.contexts:
        for t in sm.support[c.name]:
            if not oracle_extends(globals_, c, t):
                return "logically_contextual"
    return "noncontextual"


def random_scenario(rng: random.Random, max_obs: int = 5, max_ctx: int = 4) -> Scenario:
    """Binary scenario with maximal, covering contexts; rejection-sampled."""
    k = rng.randint(1, max_ctx)
    n = rng.randint(max(k, 1), max_obs)
    names = [f"o{i}" for i in range(n)]
    # k and n are drawn once so the rejection loop does not skew them
    while True:
        members = [set() for _ in range(k)]
        for name in names:
            members[rng.randrange(k)].add(name)
        for m in members:
            m.update(x for x in names if rng.random() < 0.3)
        picked = [tuple(x for x in names if x in m) for m in members]
        # resample unless every context is nonempty, distinct and maximal
        if any(not c for c in picked) or any(set(c) <= set(d) for c, d in itertools.permutations(picked, 2)):
            continue
        s = Scenario.build(names, {f"C{i + 1}": c for i, c in enumerate(picked)})
        if not validate_scenario(s):
            return s


def random_support_model(rng: random.Random, **kw) -> SupportModel:
    """Each context gets a uniformly random nonempty subset of its outcome tuples."""
    sc = random_scenario(rng, **kw)
    supports = {}
    for c in sc.contexts:
        tuples = list(itertools.product((0, 1), repeat=len(c)))
        while True:
            chosen = [t for t in tuples if rng.random() < 0.5]
            if chosen:
                break
        supports[c.name] = chosen
    return SupportModel.from_supports(sc, supports)


def random_models(count: int = RANDOM_MODELS, seed: int = RANDOM_SEED) -> list[SupportModel]:
    rng = random.Random(seed)
    return [random_support_model(rng) for _ in range(count)]
