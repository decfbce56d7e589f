"""Seed derivation and schedule-independent task execution.

Every random quantity is drawn from a substream identified by the master seed
and an integer key path (``SeedSequence`` spawn keys).  Task ``i`` always sees
the same substream, so results do not depend on how tasks are split across
workers.  Workers also pin BLAS to a single thread so that floating-point
reductions are identical between serial and parallel runs.
"""

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import InvalidConfig

THREADS_ENV = "HDNT_THREADS"


def substream(seed, *key):
    """Generator for the substream ``key`` of master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


def derive_seed(seed, *key):
    """A 63-bit integer seed for the substream ``key`` of master ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(key))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def resolve_threads(threads=None):
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else 1
    threads = int(threads)
    if threads < 1:
        raise InvalidConfig(f"threads must be >= 1, got {threads}")
    return threads


def _init_worker():
    threadpool_limits(1)


def _run_chunk(func, indices):
    return [func(i) for i in indices]


def map_indexed(func, count, threads=1):
    """``[func(i) for i in range(count)]``, optionally across processes.

    ``func`` must be picklable when ``threads > 1`` (a module-level function
    or a ``functools.partial`` of one).
    """
    threads = resolve_threads(threads)
    if threads == 1 or count < 2:
        with threadpool_limits(1):
            return [func(i) for i in range(count)]
    chunks = [c for c in np.array_split(np.arange(count), min(threads, count) * 4) if c.size]
    out = [None] * count
    with ProcessPoolExecutor(max_workers=min(threads, count), initializer=_init_worker) as ex:
        futures = [(c, ex.submit(_run_chunk, func, c.tolist())) for c in chunks]
        for c, fut in futures:
            for i, value in zip(c, fut.result()):
                out[i] = value
    return out
