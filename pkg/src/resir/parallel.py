"""Order-preserving fan-out of independent replicates."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")

WORKERS_ENV = "RESIR_WORKERS"


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value:
        try:
            n = int(value)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {value!r}") from None
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be positive, got {n}")
        return n
    return os.cpu_count() or 1


def _run_chunk(fn: Callable[[int], T], chunk: Sequence[int]) -> list[T]:
    return [fn(k) for k in chunk]


def map_replicates(fn: Callable[[int], T], K: int, workers: int | None = None) -> list[T]:
    """``[fn(0), ..., fn(K-1)]``, possibly computed in worker processes.

    ``fn`` must be picklable when ``workers > 1``. Results are returned by
    replicate index, so the output does not depend on ``workers``.
    """
    workers = default_workers() if workers is None else workers
    workers = max(1, min(workers, K))
    if workers == 1:
        return [fn(k) for k in range(K)]
    chunks = [list(range(K))[i::workers] for i in range(workers)]
    out: list = [None] * K
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for chunk, res in zip(chunks, pool.map(_run_chunk, [fn] * workers, chunks)):
            for k, r in zip(chunk, res):
                out[k] = r
    return out
