"""LRU replay entry point; picks the compiled kernel when it is importable.

Set ``TRACAR_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _lru_py

KERNEL = "python"
_compiled = None
if os.environ.get("TRACAR_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _lru as _compiled  # type: ignore[attr-defined,no-redef]

        KERNEL = "cython"
    except ImportError:
        _compiled = None


def lru_run(pages, dirty, n_pages: int, capacity: int, start: int = 0, kernel: str = None):
    """Dispatch to the selected kernel; see ``tracar._lru_py.lru_run``."""
    kernel = kernel or KERNEL
    if kernel == "cython":
        if _compiled is None:
            raise RuntimeError("compiled LRU kernel is not built")
        pages = np.ascontiguousarray(pages, dtype=np.intc)
        dirty = np.ascontiguousarray(dirty, dtype=np.uint8)
        return _compiled.lru_run(pages, dirty, int(n_pages), int(capacity), int(start))
    if kernel == "python":
        return _lru_py.lru_run(pages, dirty, int(n_pages), int(capacity), int(start))
    raise ValueError(f"unknown kernel {kernel!r}")


def available_kernels():
    return ("cython", "python") if _compiled is not None else ("python",)
