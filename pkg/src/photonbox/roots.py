"""Bracketed bisection, vectorized over independent problems."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np


def bisect(
    f: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray | float,
    hi: np.ndarray | float,
    xtol: float,
    max_iter: int = 200,
) -> np.ndarray:
    """Find a root of ``f`` in each bracket ``[lo[i], hi[i]]``.

    ``f`` is evaluated elementwise on arrays.  Every bracket must straddle a
    sign change (an endpoint that is exactly zero counts).  Iterates until all
    brackets are narrower than ``xtol`` and returns the bracket midpoints.
    """
    lo = np.array(lo, dtype=float, copy=True, ndmin=1)
    hi = np.array(hi, dtype=float, copy=True, ndmin=1)
    lo, hi = np.broadcast_arrays(lo, hi)
    lo, hi = lo.copy(), hi.copy()
    f_lo = np.asarray(f(lo), dtype=float)
    f_hi = np.asarray(f(hi), dtype=float)
    if np.any(np.sign(f_lo) * np.sign(f_hi) > 0):
        bad = int(np.argmax(np.sign(f_lo) * np.sign(f_hi) > 0))
        raise ValueError(f"bracket {bad} does not straddle a root: [{lo[bad]!r}, {hi[bad]!r}]")

    # exact zeros at an endpoint collapse the bracket onto that endpoint
    hit_lo = f_lo == 0.0
    hi[hit_lo] = lo[hit_lo]
    hit_hi = (f_hi == 0.0) & ~hit_lo
    lo[hit_hi] = hi[hit_hi]
    s_lo = np.sign(f_lo)

    for _ in range(max_iter):
        if np.all(hi - lo <= xtol):
            break
        mid = 0.5 * (lo + hi)
        s_mid = np.sign(np.asarray(f(mid), dtype=float))
        same = s_mid == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
        exact = s_mid == 0.0
        lo[exact] = mid[exact]
        hi[exact] = mid[exact]
    return 0.5 * (lo + hi)
