"""Deterministic trial fan-out."""

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "GHRLAB_THREADS"


def thread_limit() -> int:
    """Parallelism cap from the environment; defaults to 1 (sequential)."""
    raw = os.environ.get(ENV_THREADS)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)


def map_trials(fn, count: int, threads: int | None = None) -> list:
    """Apply fn to 0..count-1 and return results in index order.

    Results do not depend on the worker count because each trial must derive
    all of its randomness from its own index.
    """
    limit = thread_limit() if threads is None else max(1, int(threads))
    if limit == 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=limit) as pool:
        return list(pool.map(fn, range(count)))
