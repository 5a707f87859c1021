import os
from concurrent.futures import ThreadPoolExecutor


def workers() -> int:
    """Thread cap from OPALG_THREADS, default: CPU count."""
    env = os.environ.get("OPALG_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def pmap(fn, items) -> list:
    """Ordered map; threaded when more than one worker is allowed."""
    items = list(items)
    n = min(workers(), len(items))
    if n <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
