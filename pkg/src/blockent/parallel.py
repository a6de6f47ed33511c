"""Worker pool sized by the BLOCKENT_THREADS environment variable (0 = auto)."""
import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "BLOCKENT_THREADS"


def worker_count() -> int:
    try:
        n = int(os.environ.get(ENV_VAR, "0"))
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def parallel_map(fn, items) -> list:
    """``[fn(x) for x in items]``, evaluated concurrently; output order follows ``items``."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
