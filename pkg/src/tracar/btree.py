"""Static b-tree geometry and key-to-path mapping.

Nodes are a whole number of pages and each node is one cache unit, so "page"
below means one node.  Pages are numbered level by level starting at the root
(page 0), left to right within a level.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .model import InvalidArgumentError

CHILD_REF_BYTES = 8


@dataclass(frozen=True)
class BTreeModel:
    n_keys: int
    fanout: int
    leaf_capacity: int
    height: int
    n_pages: int
    node_size_bytes: int
    page_size_bytes: int
    level_sizes: Tuple[int, ...]  # root first

    @property
    def level_offsets(self) -> Tuple[int, ...]:
        out, acc = [], 0
        for size in self.level_sizes:
            out.append(acc)
            acc += size
        return tuple(out)

    def paths(self, keys: np.ndarray) -> np.ndarray:
        """Root-to-leaf page ids for each key, shape ``(len(keys), height)``."""
        keys = np.asarray(keys, dtype=np.int64)
        out = np.empty((keys.size, self.height), dtype=np.int32)
        idx = keys // self.leaf_capacity
        offsets = self.level_offsets
        for level in range(self.height - 1, -1, -1):
            out[:, level] = offsets[level] + idx
            idx = idx // self.fanout
        return out


def build_btree_layout(
    n_keys: int,
    key_size_bytes: int = 16,
    value_size_bytes: int = 100,
    page_size_bytes: int = 4096,
    node_pages: int = 1,
) -> BTreeModel:
    if min(n_keys, key_size_bytes, value_size_bytes, page_size_bytes, node_pages) <= 0:
        raise InvalidArgumentError("sizes and counts must be > 0")
    node_size = page_size_bytes * node_pages
    fanout = node_size // (key_size_bytes + CHILD_REF_BYTES)
    leaf_capacity = node_size // (key_size_bytes + value_size_bytes)
    if fanout < 2 or leaf_capacity < 2:
        raise InvalidArgumentError(
            f"a {node_size}-byte node must hold at least 2 entries "
            f"(fanout={fanout}, leaf_capacity={leaf_capacity})"
        )

    sizes = [-(-n_keys // leaf_capacity)]
    while sizes[-1] > 1:
        sizes.append(-(-sizes[-1] // fanout))
    sizes.reverse()
    return BTreeModel(
        n_keys=n_keys,
        fanout=fanout,
        leaf_capacity=leaf_capacity,
        height=len(sizes),
        n_pages=sum(sizes),
        node_size_bytes=node_size,
        page_size_bytes=page_size_bytes,
        level_sizes=tuple(sizes),
    )
