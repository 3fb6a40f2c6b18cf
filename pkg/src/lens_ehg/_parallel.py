"""Thread-level parallelism over independent terms.

Results always come back in input order so that sums are bit-stable no
matter how many workers run.
"""
import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "LENS_EHG_THREADS"


def thread_count():
    raw = os.environ.get(ENV_VAR, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def ordered_map(func, items):
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
