"""Brute-force global-section kernel.

Assignments are enumerated as mixed-radix integers: observable ``i`` takes the
digit ``(k // strides[i]) % arities[i]``, the first observable being the most
significant. A context accepts assignment ``k`` when the index of its outcome
tuple hits a nonzero entry of its flattened support table.

Two interchangeable implementations are provided: a numba kernel and a chunked
numpy one. ``BUNDLEDIAG_DISABLE_NUMBA=1`` (or numba being absent) selects numpy.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba installed
    numba = None

NUMPY_CHUNK = 1 << 16


def _env_disabled() -> bool:
    return os.environ.get("BUNDLEDIAG_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def global_mask_numpy(arities, strides, ctx_obs, ctx_strides, ctx_offsets, table_offsets, tables, start, stop):
    """Boolean mask over assignments ``start..stop-1``; True where every context accepts."""
    n_ctx = len(ctx_offsets) - 1
    out = np.empty(stop - start, dtype=np.bool_)
    for lo in range(start, stop, NUMPY_CHUNK):
        hi = min(lo + NUMPY_CHUNK, stop)
        k = np.arange(lo, hi, dtype=np.int64)
        digits = (k[:, None] // strides[None, :]) % arities[None, :]
        ok = np.ones(hi - lo, dtype=np.bool_)
        for c in range(n_ctx):
            members = ctx_obs[ctx_offsets[c]:ctx_offsets[c + 1]]
            local = digits[:, members] @ ctx_strides[ctx_offsets[c]:ctx_offsets[c + 1]]
            ok &= tables[table_offsets[c] + local] != 0
        out[lo - start:hi - start] = ok
    return out


def _global_mask_loop(arities, strides, ctx_obs, ctx_strides, ctx_offsets, table_offsets, tables, start, stop):
    n_obs = arities.shape[0]
    n_ctx = ctx_offsets.shape[0] - 1
    out = np.zeros(stop - start, dtype=np.bool_)
    digits = np.empty(n_obs, dtype=np.int64)
    for k in range(start, stop):
        for i in range(n_obs):
            digits[i] = (k // strides[i]) % arities[i]
        ok = True
        for c in range(n_ctx):
            local = 0
            for j in range(ctx_offsets[c], ctx_offsets[c + 1]):
                local += digits[ctx_obs[j]] * ctx_strides[j]
            if tables[table_offsets[c] + local] == 0:
                ok = False
                break
        out[k - start] = ok
    return out


if HAVE_NUMBA:
    global_mask_numba = numba.njit(cache=True, nogil=True)(_global_mask_loop)
else:  # pragma: no cover
    global_mask_numba = None


def global_mask(*args):
    if USE_NUMBA:
        return global_mask_numba(*args)
    return global_mask_numpy(*args)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
