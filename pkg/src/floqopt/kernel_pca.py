"""Shadow kernel between measurement records, Gram matrices, and kernel PCA.

The kernel between two shadow sets is a double exponential over all ordered
snapshot pairs,

    K(A, B) = exp( tau * mean_{c,cbar} exp( (gamma/n) * sum_i k(a_i, b_i) ) )

with the single-site kernel k(a, b) = Tr[Minv(a)^dag Minv(b)] for the inverse
channel Minv(a) = 3|a><a| - 1.  Within one frame k takes three values only:
5 for identical outcomes, -4 for same axis and opposite sign, 1/2 for
different axes.  The exact pair sum over N_s^2 snapshots therefore reduces
to a joint histogram over (axis matches, full matches) per row pair, counted
here through small-integer one-hot matrix products; every count is exact, so
the grouped summation equals the naive double sum and is bit-reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .shadows import ShadowSet

SAME_AXIS_SAME_SIGN = 5.0
SAME_AXIS_OPPOSITE_SIGN = -4.0
DIFFERENT_AXES = 0.5


@dataclass(frozen=True)
class KernelHyper:
    """Kernel hyperparameters; defaults are the values used for all runs."""

    kernel_tau: float = 4.0
    gamma: float = 0.1

    def __post_init__(self):
        if self.kernel_tau <= 0 or self.gamma <= 0:
            raise ValueError("kernel hyperparameters must be positive")


@dataclass(frozen=True)
class GramMatrix:
    values: np.ndarray
    centered: bool = False

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("Gram matrix must be square")
        if np.abs(v - v.T).max() > 1e-10:
            raise ValueError("Gram matrix must be symmetric")

    @property
    def size(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class PcCoordinates:
    """Leading principal components: coords[i, j] = sqrt(lambda_j) v_j[i]."""

    coords: np.ndarray       # (T, k)
    eigenvalues: np.ndarray  # (k,) descending


def site_kernel(a: tuple[int, int], b: tuple[int, int]) -> float:
    """Single-site kernel of two (axis index, sign) outcomes in one frame."""
    if a[0] == b[0]:
        return SAME_AXIS_SAME_SIGN if a[1] == b[1] else SAME_AXIS_OPPOSITE_SIGN
    return DIFFERENT_AXES


def _inner_table(n: int, hp: KernelHyper) -> np.ndarray:
    """Table V[m, p] = exp((gamma/n) * (9p - 4.5m + 0.5n)) of inner values for
    m axis matches of which p also match in sign."""
    m = np.arange(n + 1)[:, None]
    p = np.arange(n + 1)[None, :]
    return np.exp((hp.gamma / n) * (9.0 * p - 4.5 * m + 0.5 * n))


def _features(shadows: ShadowSet) -> tuple[np.ndarray, np.ndarray]:
    """One-hot feature rows whose inner products count outcome matches.

    left[i] . right[j] = (n+1) * m + p exactly, where m counts matching axes
    and p matching (axis, sign) pairs between snapshots i and j; all entries
    are small integers, so float32 matrix products are exact and independent
    of summation order.
    """
    n_snap, n = shadows.axes.shape
    code = (shadows.axes.astype(np.int64) * 2 + (1 - shadows.signs.astype(np.int64)) // 2)
    onehot = np.zeros((n_snap, n, 6), dtype=np.float32)
    onehot[np.arange(n_snap)[:, None], np.arange(n)[None, :], code] = 1.0
    axis_onehot = onehot.reshape(n_snap, n, 3, 2).sum(axis=3)
    flat_code = onehot.reshape(n_snap, 6 * n)
    flat_axis = axis_onehot.reshape(n_snap, 3 * n)
    left = np.ascontiguousarray(np.concatenate([(n + 1.0) * flat_axis, flat_code], axis=1))
    right = np.ascontiguousarray(np.concatenate([flat_axis, flat_code], axis=1))
    return left, right


def _pair_sum(
    left_a: np.ndarray, right_b: np.ndarray, n: int, table: np.ndarray
) -> float:
    key = (left_a @ right_b.T).ravel().astype(np.int64)
    counts = np.bincount(key, minlength=(n + 1) * (n + 1))
    return float(counts @ table.ravel())


def kernel_entry(a: ShadowSet, b: ShadowSet, hp: KernelHyper = KernelHyper()) -> float:
    """Exact shadow kernel over all N_s^2 ordered snapshot pairs."""
    _check_compatible(a, b)
    table = _inner_table(a.n, hp)
    left, _ = _features(a)
    _, right = _features(b)
    total = _pair_sum(left, right, a.n, table)
    return float(np.exp(hp.kernel_tau * total / (a.n_snapshots * b.n_snapshots)))


def _check_compatible(a: ShadowSet, b: ShadowSet) -> None:
    if a.n != b.n:
        raise ValueError(f"shadow sets live on different sizes: {a.n} vs {b.n}")
    if a.frame != b.frame:
        raise ValueError("shadow sets were measured in different frames")


def gram_matrix(sets: list[ShadowSet], hp: KernelHyper = KernelHyper()) -> GramMatrix:
    """T x T kernel matrix over a state sequence (upper triangle mirrored)."""
    t = len(sets)
    if t < 2:
        raise ValueError("need at least two shadow sets")
    for s in sets[1:]:
        _check_compatible(sets[0], s)
    n = sets[0].n
    table = _inner_table(n, hp)
    feats = [_features(s) for s in sets]
    out = np.empty((t, t), dtype=float)
    for i in range(t):
        for j in range(i, t):
            total = _pair_sum(feats[i][0], feats[j][1], n, table)
            val = np.exp(hp.kernel_tau * total / (sets[i].n_snapshots * sets[j].n_snapshots))
            out[i, j] = val
            out[j, i] = val
    return GramMatrix(out, centered=False)


def center_gram(g: GramMatrix) -> GramMatrix:
    """Feature-space centering K - 1K/T - K1/T + 1K1/T^2; idempotent."""
    k = g.values
    t = k.shape[0]
    row = k.mean(axis=0, keepdims=True)
    col = k.mean(axis=1, keepdims=True)
    tot = k.mean()
    centered = k - row - col + tot
    centered = 0.5 * (centered + centered.T)
    return GramMatrix(centered, centered=True)


def leading_components(g: GramMatrix, k: int = 1) -> PcCoordinates:
    """Top-k principal coordinates of a centered Gram matrix."""
    if not g.centered:
        raise ValueError("leading_components requires a centered Gram matrix")
    if k < 1:
        raise ValueError("k must be at least 1")
    w, v = np.linalg.eigh(g.values)
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]
    positive = int(np.sum(w > 0))
    if k > positive:
        raise ValueError(
            f"requested {k} components but only {positive} positive eigenvalues"
        )
    coords = np.empty((g.size, k), dtype=float)
    for j in range(k):
        vec = v[:, j]
        anchor = int(np.argmax(np.abs(vec)))
        if vec[anchor] < 0:
            vec = -vec
        coords[:, j] = np.sqrt(w[j]) * vec
    return PcCoordinates(coords, w[:k].copy())
