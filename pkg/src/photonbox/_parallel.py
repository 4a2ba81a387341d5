from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def chunked_map(
    func: Callable[..., tuple[np.ndarray, ...] | np.ndarray],
    arrays: Sequence[np.ndarray],
    workers: int = 1,
) -> tuple[np.ndarray, ...] | np.ndarray:
    """Apply an elementwise ``func`` over index-aligned chunks of ``arrays``.

    Chunks are reassembled in index order, so the result does not depend on
    ``workers``.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    n = len(arrays[0])
    if workers == 1 or n < 2:
        return func(*arrays)
    bounds = np.linspace(0, n, min(workers, n) + 1).astype(int)
    slices = [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda s: func(*(a[s] for a in arrays)), slices))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(cols) for cols in zip(*parts))
    return np.concatenate(parts)
