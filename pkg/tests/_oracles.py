"""Independent reference implementations used as test oracles.

Everything here is deliberately written without the package's batched gate
machinery: dense operators are embedded by index arithmetic, kernels by
literal double loops, clustering from cluster centroids.  Slow is fine.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from floqopt.statevector import Gate1Q


def dense_1q_embed(matrix: np.ndarray, site: int, n: int) -> np.ndarray:
    """Full D x D operator of a 2x2 matrix on `site` (site 0 = LSB)."""
    return np.kron(np.eye(2 ** (n - 1 - site)), np.kron(matrix, np.eye(2**site)))


def dense_2q_embed(matrix: np.ndarray, sites: tuple[int, int], n: int) -> np.ndarray:
    """Full D x D operator of a 4x4 matrix on an ordered site pair."""
    i, j = sites
    d = 2**n
    full = np.zeros((d, d), dtype=complex)
    for col in range(d):
        bi = (col >> i) & 1
        bj = (col >> j) & 1
        base = col & ~(1 << i) & ~(1 << j)
        cin = 2 * bi + bj
        for rout in range(4):
            row = base | ((rout >> 1) << i) | ((rout & 1) << j)
            full[row, col] += matrix[rout, cin]
    return full


def dense_circuit_matrix(circ) -> np.ndarray:
    """Product of dense gate embeddings, first gate rightmost."""
    full = np.eye(2**circ.n, dtype=complex)
    for g in circ.gates:
        if isinstance(g, Gate1Q):
            full = dense_1q_embed(g.matrix, g.site, circ.n) @ full
        else:
            full = dense_2q_embed(g.matrix, g.sites, circ.n) @ full
    return full


def gate_exp(generator: np.ndarray) -> np.ndarray:
    """exp(i * generator) by scipy's matrix exponential."""
    return expm(1j * generator)


def direction_projector(direction: np.ndarray, sign: int) -> np.ndarray:
    """Rank-one projector onto the +-1 eigenstate of sigma . direction."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    pauli = direction[0] * sx + direction[1] * sy + direction[2] * sz
    return (np.eye(2) + sign * pauli) / 2


def inverse_channel(direction: np.ndarray, sign: int) -> np.ndarray:
    """Minv(a) = 3 |a><a| - 1 for the outcome along `direction`."""
    return 3.0 * direction_projector(direction, sign) - np.eye(2)


def naive_site_kernel(frame_axes, a: tuple[int, int], b: tuple[int, int]) -> float:
    ma = inverse_channel(frame_axes[a[0]], a[1])
    mb = inverse_channel(frame_axes[b[0]], b[1])
    return float(np.real(np.trace(ma.conj().T @ mb)))


def naive_kernel_entry(set_a, set_b, tau: float, gamma: float) -> float:
    """Literal triple loop over snapshot pairs and sites."""
    n = set_a.n
    total = 0.0
    for c in range(set_a.n_snapshots):
        for cb in range(set_b.n_snapshots):
            s = 0.0
            for i in range(n):
                s += naive_site_kernel(
                    set_a.frame.axes,
                    (int(set_a.axes[c, i]), int(set_a.signs[c, i])),
                    (int(set_b.axes[cb, i]), int(set_b.signs[cb, i])),
                )
            total += np.exp(gamma / n * s)
    return float(np.exp(tau * total / (set_a.n_snapshots * set_b.n_snapshots)))


def naive_gram(sets, tau: float, gamma: float) -> np.ndarray:
    t = len(sets)
    out = np.empty((t, t))
    for i in range(t):
        for j in range(t):
            out[i, j] = naive_kernel_entry(sets[i], sets[j], tau, gamma)
    return out


def reference_ward(points: np.ndarray) -> list[tuple[int, int, float, int]]:
    """Ward clustering recomputed from centroids and sizes at every step,
    with the same lowest-id tie rule as the production code."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    clusters = {i: (pts[i].copy(), 1, i) for i in range(len(pts))}
    next_id = len(pts)
    merges = []
    while len(clusters) > 1:
        best = None
        keys = sorted(clusters, key=lambda k: clusters[k][2])
        for pos, ka in enumerate(keys):
            for kb in keys[pos + 1 :]:
                ca, na, ida = clusters[ka]
                cb, nb, idb = clusters[kb]
                d = np.sqrt(2.0 * na * nb / (na + nb)) * np.linalg.norm(ca - cb)
                ids = (min(ida, idb), max(ida, idb))
                if best is None or d < best[0] - 1e-15 or (
                    abs(d - best[0]) <= 1e-15 and ids < best[1]
                ):
                    best = (d, ids, ka, kb)
        d, ids, ka, kb = best
        ca, na, _ = clusters[ka]
        cb, nb, _ = clusters[kb]
        merges.append((ids[0], ids[1], float(d), na + nb))
        clusters[ka] = ((na * ca + nb * cb) / (na + nb), na + nb, next_id)
        del clusters[kb]
        next_id += 1
    return merges


def haar_dense(dim: int, rng: np.random.Generator) -> np.ndarray:
    """QR-based Haar unitary, written out independently of the package."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_small_circuit(n: int, depth: int, rng: np.random.Generator):
    """Random circuit of Haar 1q gates and Haar 2q gates on random bonds."""
    from floqopt.circuits import Circuit
    from floqopt.statevector import Gate1Q, Gate2Q

    gates = []
    for _ in range(depth):
        if rng.random() < 0.5:
            gates.append(Gate1Q(haar_dense(2, rng), int(rng.integers(n))))
        else:
            i = int(rng.integers(n))
            j = (i + 1) % n
            gates.append(Gate2Q(haar_dense(4, rng), (i, j)))
    return Circuit(n, tuple(gates))
