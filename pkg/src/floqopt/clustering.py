"""Agglomerative clustering with Ward linkage and the classifiability readout.

Cluster ids follow the usual convention: leaves are 0..T-1 and the cluster
created by merge k is T+k.  Distances start from plain Euclidean point
distances and are updated with the Lance-Williams recursion for Ward's
criterion, so the distance between two clusters built from singletons equals
sqrt(2 |A||B| / (|A|+|B|)) * ||centroid_A - centroid_B||.  Ties are broken by
the lexicographically smallest (id_i, id_j) pair.

The classifiability of a point set is read off the final merge: the raw mode
returns its linkage distance, the balanced mode additionally multiplies by
the ratio of the smaller to the larger of the two merged cluster sizes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MergeRecord:
    left: int
    right: int
    distance: float
    size: int


@dataclass(frozen=True)
class MergeTree:
    """Sequence of T-1 merges over T leaves."""

    n_leaves: int
    merges: tuple[MergeRecord, ...]

    def __post_init__(self):
        if len(self.merges) != self.n_leaves - 1:
            raise ValueError("a tree over T leaves has exactly T-1 merges")

    @property
    def final(self) -> MergeRecord:
        return self.merges[-1]


def hac_ward(points: np.ndarray) -> MergeTree:
    """Cluster T points of dimension k agglomeratively under Ward linkage."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    t = pts.shape[0]
    if t < 2:
        raise ValueError("need at least two points to cluster")

    # slot arrays; a merge reuses the left slot and retires the right one
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    active = np.ones(t, dtype=bool)
    sizes = np.ones(t, dtype=np.int64)
    ids = np.arange(t, dtype=np.int64)

    merges = []
    for step in range(t - 1):
        masked = np.where(active[:, None] & active[None, :], dist, np.inf)
        np.fill_diagonal(masked, np.inf)
        best = masked.min()
        cand = np.argwhere(masked == best)
        pairs = sorted(
            (min(ids[a], ids[b]), max(ids[a], ids[b]), a, b)
            for a, b in cand
            if a < b
        )
        _, _, a, b = pairs[0]

        sa, sb = sizes[a], sizes[b]
        d_ab = dist[a, b]
        others = active.copy()
        others[a] = others[b] = False
        so = sizes[others]
        d_ao = dist[a, others]
        d_bo = dist[b, others]
        new_sq = (
            (sa + so) * d_ao**2 + (sb + so) * d_bo**2 - so * d_ab**2
        ) / (sa + sb + so)
        new_d = np.sqrt(np.maximum(new_sq, 0.0))

        merges.append(
            MergeRecord(int(min(ids[a], ids[b])), int(max(ids[a], ids[b])),
                        float(d_ab), int(sa + sb))
        )
        dist[a, others] = new_d
        dist[others, a] = new_d
        active[b] = False
        sizes[a] = sa + sb
        ids[a] = t + step
    return MergeTree(t, tuple(merges))


def classifiability(tree: MergeTree, mode: str = "raw") -> float:
    """Binary-classifiability value read from the final merge of the tree."""
    final = tree.final
    if mode == "raw":
        return final.distance
    if mode == "balanced":
        left_size = _cluster_size(tree, final.left)
        right_size = _cluster_size(tree, final.right)
        return final.distance * min(left_size, right_size) / max(left_size, right_size)
    raise ValueError(f"unknown classifiability mode {mode!r}")


def _cluster_size(tree: MergeTree, cluster_id: int) -> int:
    if cluster_id < tree.n_leaves:
        return 1
    return tree.merges[cluster_id - tree.n_leaves].size


def merge_table(tree: MergeTree) -> np.ndarray:
    """(T-1, 4) array of (left id, right id, distance, merged size) rows."""
    return np.array(
        [[m.left, m.right, m.distance, m.size] for m in tree.merges], dtype=float
    )
