"""Time the brute-force global-section kernel: numba against the numpy fallback.

    python benchmarks/bench_oracle.py [--observables 22] [--repeat 3]

The model is a ring of overlapping 3-observable contexts with random half-size
supports, so almost every assignment is rejected late and both kernels do the
full amount of work.
"""

import argparse
import random
import time

import numpy as np

from bundlediag import _accel
from bundlediag.model import SupportModel
from bundlediag.scenario import Scenario
from bundlediag.solver import _kernel_inputs, assignment_space


def ring_model(n: int, seed: int = 0) -> SupportModel:
    rng = random.Random(seed)
    names = [f"o{i}" for i in range(n)]
    contexts = {f"C{i}": [names[i], names[(i + 1) % n], names[(i + 2) % n]] for i in range(n)}
    tuples = [f"{k:03b}" for k in range(8)]
    supports = {c: rng.sample(tuples, 6) for c in contexts}
    return SupportModel.from_supports(Scenario.build(names, contexts), supports)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--observables", type=int, default=22)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    sm = ring_model(args.observables)
    total = assignment_space(sm)
    inputs = _kernel_inputs(sm) + (0, total)
    print(f"{args.observables} binary observables, {len(sm.scenario.contexts)} contexts, {total:,} assignments")

    t_np, mask_np = best_of(lambda: _accel.global_mask_numpy(*inputs), args.repeat)
    print(f"numpy  {t_np:8.3f} s  {total / t_np / 1e6:8.1f} M assignments/s")
    if not _accel.HAVE_NUMBA:
        print("numba  not installed")
        return
    t0 = time.perf_counter()
    _accel.global_mask_numba(*_kernel_inputs(sm), 0, 1)
    print(f"numba  first call (compile or cache load) {time.perf_counter() - t0:.3f} s")
    t_nb, mask_nb = best_of(lambda: _accel.global_mask_numba(*inputs), args.repeat)
    print(f"numba  {t_nb:8.3f} s  {total / t_nb / 1e6:8.1f} M assignments/s")
    assert np.array_equal(mask_np, mask_nb), "kernels disagree"
    print(f"speedup {t_np / t_nb:.1f}x, {int(mask_nb.sum())} global sections, masks identical")


if __name__ == "__main__":
    main()
