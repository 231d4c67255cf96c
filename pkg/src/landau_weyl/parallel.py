"""Ordered parallel map over independent tasks."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional

JOBS_ENV = "LANDAU_WEYL_JOBS"


def resolve_jobs(jobs: Optional[int] = None) -> int:
    """Worker count: the environment variable wins over the argument."""
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            jobs = int(env)
        except ValueError:
            from .errors import ConfigError
            raise ConfigError(f"{JOBS_ENV} must be an integer, got {env!r}")
    return max(1, int(jobs or 1))


def parallel_map(fn: Callable, items: Iterable, jobs: int = 1) -> list:
    """``[fn(x) for x in items]`` with results in input order.

    Threads suffice: the heavy lifting happens in LAPACK/FFT calls that
    release the GIL.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))
