from concurrent.futures import ThreadPoolExecutor

import numpy as np


def parallel_map(func, items, threads=1):
    """Ordered map; the numba kernels release the GIL so threads scale."""
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def stream(seed, *key):
    """Independent generator for the work unit identified by ``key``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))
