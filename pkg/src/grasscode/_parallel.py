import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(threads=None) -> int:
    """Explicit value, else $GRASSCODE_THREADS, else 1."""
    if threads is None:
        threads = int(os.environ.get("GRASSCODE_THREADS", "1") or 1)
    return max(1, int(threads))


def ordered_map(fn, items, threads=None) -> list:
    """``list(map(fn, items))``, optionally on a thread pool; order is preserved."""
    threads = resolve_threads(threads)
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
