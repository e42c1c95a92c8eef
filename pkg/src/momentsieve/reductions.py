"""Deterministic chunked reductions.

Every weighted sum in this package goes through `chunked_sum`: the input is
split at fixed 2**16-element boundaries, each chunk is summed on its own
(numpy's pairwise summation), and the per-chunk partials are combined by a
fixed binary tree.  Chunk boundaries depend only on the array length, never
on the worker count, so results are bit-identical for 1 or N workers.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import AccumulationOverflowError, DomainError

DEFAULT_CHUNK = 1 << 16


def _tree_reduce(parts: np.ndarray):
    # fixed-order pairwise combine of the per-chunk partial sums
    while len(parts) > 1:
        half = len(parts) // 2
        head = parts[: 2 * half : 2] + parts[1 : 2 * half : 2]
        parts = np.concatenate([head, parts[2 * half :]])
    return parts[0]


def chunk_partials(values: np.ndarray, chunk: int = DEFAULT_CHUNK) -> np.ndarray:
    """Per-chunk sums at fixed boundaries [0,chunk), [chunk,2*chunk), ..."""
    if chunk < 1 or chunk & (chunk - 1):
        raise DomainError(f"chunk size must be a power of two, got {chunk}")
    values = np.ascontiguousarray(values)
    n = len(values)
    if n == 0:
        return np.zeros(1, dtype=values.dtype if values.dtype.kind in "fc" else np.float64)
    full = (n // chunk) * chunk
    body = values[:full].reshape(-1, chunk)
    parts = body.sum(axis=1)
    if full < n:
        parts = np.append(parts, values[full:].sum())
    return parts


def chunked_sum(values: np.ndarray, chunk: int = DEFAULT_CHUNK, workers: int = 1):
    """Sum `values` with worker-count-independent results.

    Workers only distribute the per-chunk sums (numpy releases the GIL);
    the combining order is fixed, so the returned value is identical for
    any worker count.
    """
    values = np.ascontiguousarray(values)
    if workers > 1 and len(values) > 4 * chunk:
        n = len(values)
        bounds = list(range(0, n, chunk * 64))
        blocks = [values[lo : min(lo + chunk * 64, n)] for lo in bounds]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial_lists = list(pool.map(lambda b: chunk_partials(b, chunk), blocks))
        parts = np.concatenate(partial_lists)
    else:
        parts = chunk_partials(values, chunk)
    total = _tree_reduce(parts)
    if not np.all(np.isfinite([total.real if np.iscomplexobj(total) else total])):
        raise AccumulationOverflowError("weighted sum overflowed the double range")
    return total.item() if hasattr(total, "item") else total
