"""Backend selection for the spectral-sum hot loop.

The compiled Cython kernel is preferred; a NumPy implementation with the
same deterministic, compensated accumulation contract is used when the
extension is unavailable.  Both backends give one independent result per
time point, so splitting the grid across worker threads cannot change any
value.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

try:
    from . import _kernels
except ImportError:  # extension not built; pure-Python install
    _kernels = None

HAVE_COMPILED = _kernels is not None

# Terms per chunk in the fallback: partial sums use NumPy's pairwise
# reduction inside a chunk and exact fsum across chunks.
_CHUNK = 8192

# Below this much work, thread dispatch costs more than it saves.
_PARALLEL_MIN_WORK = 1 << 22


def resolve_threads(threads: int) -> int:
    """0 means auto (CPU count); negative is rejected by the CLI layer."""
    if threads <= 0:
        return os.cpu_count() or 1
    return threads


def _eval_numpy(omegas, amps, times, out) -> None:
    nterms = len(omegas)
    for i, t in enumerate(times):
        parts = []
        for lo in range(0, nterms, _CHUNK):
            x = np.sin(omegas[lo:lo + _CHUNK] * t)
            np.multiply(x, x, out=x)
            parts.append(float(np.add.reduce(x * amps[lo:lo + _CHUNK])))
        out[i] = math.fsum(parts)


def eval_terms(omegas: np.ndarray, amps: np.ndarray, times: np.ndarray,
               threads: int = 1, backend: str | None = None) -> np.ndarray:
    """Evaluate sum_k amps[k] * sin^2(omegas[k] * t) on a time grid.

    backend forces "compiled" or "numpy"; default picks the compiled kernel
    when present.  Values are deterministic for a fixed input regardless of
    the thread count.
    """
    omegas = np.ascontiguousarray(omegas, dtype=np.float64)
    amps = np.ascontiguousarray(amps, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    out = np.empty_like(times)
    if backend is None:
        backend = "compiled" if HAVE_COMPILED else "numpy"
    if backend == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled kernel requested but not built")
    if backend not in ("compiled", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    kernel = _kernels.eval_sin2_sum if backend == "compiled" else _eval_numpy

    if len(times) == 0:
        return out
    if len(omegas) == 0:
        out[:] = 0.0
        return out

    threads = resolve_threads(threads)
    work = len(omegas) * len(times)
    if threads == 1 or work < _PARALLEL_MIN_WORK or len(times) < 2 * threads:
        kernel(omegas, amps, times, out)
        return out

    bounds = np.linspace(0, len(times), threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(kernel, omegas, amps, times[lo:hi], out[lo:hi])
            for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo
        ]
        for fut in futures:
            fut.result()
    return out
