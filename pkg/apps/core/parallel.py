"""
Element-parallel execution helpers.

Work is split into contiguous index ranges; each range is handled by exactly
one task and writes a disjoint slice of the output, so results do not depend
on the number of threads.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, TypeVar

from django.conf import settings

logger = logging.getLogger(__name__)

T = TypeVar('T')

# Ranges smaller than this are not worth a task.
MIN_CHUNK = 16


def resolve_threads(threads: int | None = None) -> int:
    """Thread count from the argument or WAVEDG_THREADS."""
    if threads is None:
        threads = getattr(settings, 'WAVEDG_THREADS', 1)
    return max(1, int(threads))


def chunk_ranges(n: int, chunks: int, min_chunk: int = MIN_CHUNK) -> list[tuple[int, int]]:
    """Split range(n) into at most `chunks` contiguous (start, stop) pairs."""
    if n <= 0:
        return []
    chunks = max(1, min(chunks, n // max(1, min_chunk) or 1))
    bounds = [round(i * n / chunks) for i in range(chunks + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(chunks) if bounds[i] < bounds[i + 1]]


@lru_cache(maxsize=8)
def get_executor(threads: int) -> ThreadPoolExecutor:
    logger.debug("Starting thread pool with %d workers", threads)
    return ThreadPoolExecutor(max_workers=threads, thread_name_prefix='wavedg')


def run_chunked(
    func: Callable[[int, int], T],
    n: int,
    threads: int | None = None,
    min_chunk: int = MIN_CHUNK,
) -> list[T]:
    """Call func(start, stop) over a partition of range(n), in parallel when threads > 1."""
    threads = resolve_threads(threads)
    ranges = chunk_ranges(n, threads, min_chunk)
    if threads == 1 or len(ranges) <= 1:
        return [func(start, stop) for start, stop in ranges]
    executor = get_executor(threads)
    futures = [executor.submit(func, start, stop) for start, stop in ranges]
    return [future.result() for future in futures]


def map_parallel(func: Callable[[int], T], n: int, threads: int | None = None) -> list[T]:
    """Ordered [func(0), ..., func(n-1)], evaluated in chunks."""
    def _chunk(start: int, stop: int) -> list[T]:
        return [func(i) for i in range(start, stop)]

    results: list[T] = []
    for part in run_chunked(_chunk, n, threads, min_chunk=1):
        results.extend(part)
    return results
