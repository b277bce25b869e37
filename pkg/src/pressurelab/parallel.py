"""Thread-count configuration.

Parallel work is always split by first symbol and merged in symbol order,
so results do not depend on the thread count.
"""

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "PRESSURELAB_THREADS"

_threads = None


def set_threads(n):
    """Override the thread count (``None`` falls back to the environment)."""
    global _threads
    if n is not None and int(n) < 1:
        raise ValueError("thread count must be >= 1")
    _threads = None if n is None else int(n)


def get_threads():
    if _threads is not None:
        return _threads
    raw = os.environ.get(ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn, items):
    """``list(map(fn, items))``, run on the configured pool, order preserved."""
    items = list(items)
    threads = min(get_threads(), len(items))
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
