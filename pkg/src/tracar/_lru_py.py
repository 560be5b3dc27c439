"""Pure-Python LRU replay, used when the compiled kernel is unavailable."""
from __future__ import annotations

from collections import OrderedDict
from typing import Sequence, Tuple


def lru_run(
    pages: Sequence[int],
    dirty: Sequence[int],
    n_pages: int,
    capacity: int,
    start: int = 0,
) -> Tuple[int, int, int, int, int]:
    """Replay ``pages`` through an LRU cache of ``capacity`` entries.

    Returns ``(misses, cold, misses_after, cold_after, writebacks)`` where the
    ``*_after`` counts only include accesses at index ``>= start`` and ``cold``
    counts first-ever touches of a page.  ``writebacks`` counts evictions of
    pages written since they were loaded.
    """
    if len(dirty) != len(pages):
        raise ValueError("pages and dirty must have equal length")
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    cache: "OrderedDict[int, bool]" = OrderedDict()
    seen = bytearray(n_pages)
    misses = cold = misses_after = cold_after = writebacks = 0
    for i, p in enumerate(pages.tolist() if hasattr(pages, "tolist") else pages):
        if p < 0 or p >= n_pages:
            raise IndexError("page id out of range")
        if p in cache:
            cache.move_to_end(p, last=False)
        else:
            misses += 1
            after = i >= start
            misses_after += after
            if not seen[p]:
                seen[p] = 1
                cold += 1
                cold_after += after
            if len(cache) == capacity:
                _, was_dirty = cache.popitem(last=True)
                writebacks += was_dirty
            cache[p] = False
            cache.move_to_end(p, last=False)
        if dirty[i]:
            cache[p] = True
    return misses, cold, misses_after, cold_after, writebacks
