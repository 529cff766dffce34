"""The two parametrized one-period circuit families, and Haar gate sampling.

Family 1 (kicked Ising): a layer of single-qubit rotations about a common
axis m_hat followed by a ring of Ising bond gates about a common axis s_hat,

    U = [bond gates exp(i J_i (sigma.s)(sigma.s)) on (i, i+1 mod n)]
        o [site gates exp(i h_i sigma.m)]

with the field layer acting first.  Both factors are exact because the
generators square to the identity: exp(i a G) = cos(a) + i sin(a) G.

Family 2 (brickwork): two single-qubit layers interleaved with two brickwork
layers of a shared symmetric two-qubit gate

    U_xyz = exp(i/4 (Jx XX + Jy YY + Jz ZZ)),

period = [odd bonds] o [1q layer B] o [even bonds] o [1q layer A], periodic
boundary, n even.  The brick is built by exact spectral decomposition of its
Hermitian generator; the closed form lives in the tests as an oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .statevector import (
    Gate1Q,
    Gate2Q,
    State,
    apply_1q_batch,
    apply_2q_batch,
)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

_AXIS_TOL = 1e-12


def pauli_dot(axis: np.ndarray) -> np.ndarray:
    """2x2 matrix sigma . axis for a real 3-vector axis."""
    ax = np.asarray(axis, dtype=float)
    return ax[0] * PAULI_X + ax[1] * PAULI_Y + ax[2] * PAULI_Z


def _check_unit(v: np.ndarray, name: str) -> None:
    if abs(np.linalg.norm(v) - 1.0) > _AXIS_TOL:
        raise ValueError(f"{name} must be a unit vector, |{name}| = {np.linalg.norm(v)}")


@dataclass(frozen=True)
class DtcParams:
    """Parameters of the kicked-Ising family: couplings, fields, and axes."""

    j: np.ndarray        # (n,) bond couplings, radians
    h: np.ndarray        # (n,) site fields, radians
    s_hat: np.ndarray    # Ising axis, unit 3-vector
    m_hat: np.ndarray    # rotation axis, unit 3-vector
    shared_j: bool = False

    def __post_init__(self):
        j = np.atleast_1d(np.asarray(self.j, dtype=float))
        h = np.atleast_1d(np.asarray(self.h, dtype=float))
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "s_hat", np.asarray(self.s_hat, dtype=float))
        object.__setattr__(self, "m_hat", np.asarray(self.m_hat, dtype=float))
        if j.shape != h.shape or j.ndim != 1:
            raise ValueError("j and h must be 1-d arrays of equal length")
        if len(j) < 2:
            raise ValueError("the ring needs at least 2 sites")
        _check_unit(self.s_hat, "s_hat")
        _check_unit(self.m_hat, "m_hat")
        if self.shared_j and np.ptp(j) > 0:
            raise ValueError("shared_j=True requires all couplings equal")

    @property
    def n(self) -> int:
        return len(self.j)


@dataclass(frozen=True)
class BrickworkParams:
    """Parameters of the brickwork family: shared couplings plus two layers of
    per-site single-qubit gates."""

    n: int
    j_xyz: tuple[float, float, float]
    layer_a: tuple[np.ndarray, ...] = field(default=())
    layer_b: tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError(f"brickwork needs an even qubit count, got n={self.n}")
        if len(self.j_xyz) != 3:
            raise ValueError("j_xyz must have three entries")
        layer_a = self.layer_a or tuple(np.eye(2, dtype=complex) for _ in range(self.n))
        layer_b = self.layer_b or tuple(np.eye(2, dtype=complex) for _ in range(self.n))
        object.__setattr__(self, "layer_a", tuple(layer_a))
        object.__setattr__(self, "layer_b", tuple(layer_b))
        for layer in (self.layer_a, self.layer_b):
            if len(layer) != self.n:
                raise ValueError("single-qubit layers must hold one gate per site")


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list making up one Floquet period; applied left to right."""

    n: int
    gates: tuple


def dtc_unitary(p: DtcParams) -> Circuit:
    """One period of the kicked-Ising family (field layer first)."""
    n = p.n
    sm = pauli_dot(p.m_hat)
    ss = pauli_dot(p.s_hat)
    bond_gen = np.kron(ss, ss)
    gates = []
    for i in range(n):
        g = np.cos(p.h[i]) * np.eye(2) + 1j * np.sin(p.h[i]) * sm
        gates.append(Gate1Q(g, i))
    for i in range(n):
        g = np.cos(p.j[i]) * np.eye(4) + 1j * np.sin(p.j[i]) * bond_gen
        gates.append(Gate2Q(g, (i, (i + 1) % n)))
    return Circuit(n, tuple(gates))


def xyz_brick(j_xyz: tuple[float, float, float]) -> np.ndarray:
    """exp(i/4 (Jx XX + Jy YY + Jz ZZ)) by spectral decomposition."""
    jx, jy, jz = j_xyz
    gen = 0.25 * (
        jx * np.kron(PAULI_X, PAULI_X)
        + jy * np.kron(PAULI_Y, PAULI_Y)
        + jz * np.kron(PAULI_Z, PAULI_Z)
    )
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(1j * w)) @ v.conj().T


def brickwork_unitary(p: BrickworkParams) -> Circuit:
    """One brickwork period: 1q layer A, even bonds, 1q layer B, odd bonds."""
    n = p.n
    brick = xyz_brick(p.j_xyz)
    gates = []
    for i in range(n):
        gates.append(Gate1Q(np.asarray(p.layer_a[i], dtype=complex), i))
    for i in range(0, n, 2):
        gates.append(Gate2Q(brick, (i, i + 1)))
    for i in range(n):
        gates.append(Gate1Q(np.asarray(p.layer_b[i], dtype=complex), i))
    for i in range(1, n, 2):
        gates.append(Gate2Q(brick, (i, (i + 1) % n)))
    return Circuit(n, tuple(gates))


def brickwork_unitary_fused(p: BrickworkParams) -> Circuit:
    """Same period matrix as brickwork_unitary with the single-qubit layers
    absorbed into the following bond gates (even bonds tile all sites, so
    each layer folds into its bond layer exactly); n two-qubit gates total.
    Used on trace-evaluation hot paths."""
    n = p.n
    brick = xyz_brick(p.j_xyz)
    gates = []
    for i in range(0, n, 2):
        fused = brick @ np.kron(p.layer_a[i], p.layer_a[i + 1])
        gates.append(Gate2Q(fused, (i, i + 1)))
    for i in range(1, n, 2):
        j = (i + 1) % n
        fused = brick @ np.kron(p.layer_b[i], p.layer_b[j])
        gates.append(Gate2Q(fused, (i, j)))
    return Circuit(n, tuple(gates))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with the
    R-diagonal phases folded back in (Mezzadri's construction)."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_1q(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary."""
    return haar_unitary(2, rng)


def haar_1q_stack(count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, 2, 2) stack of independent Haar 2x2 unitaries.

    Identical distribution to repeated haar_1q calls; drawn in one batch so
    randomized-measurement shots stay cheap.
    """
    z = (rng.normal(size=(count, 2, 2)) + 1j * rng.normal(size=(count, 2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def apply_circuit(c: Circuit, s: State) -> State:
    """Apply the circuit's gates in listed order to a single state."""
    if c.n != s.n:
        raise ValueError(f"circuit is on {c.n} qubits, state on {s.n}")
    amps = apply_circuit_batch(c, s.amps[:, None])
    return State(s.n, amps[:, 0])


def apply_circuit_batch(c: Circuit, amps: np.ndarray) -> np.ndarray:
    """Apply the circuit to every column of a (D, C) stack."""
    if amps.shape[0] != 2**c.n:
        raise ValueError(f"column stack has dimension {amps.shape[0]}, expected {2**c.n}")
    out = amps
    for g in c.gates:
        if isinstance(g, Gate1Q):
            out = apply_1q_batch(out, c.n, g.matrix, g.site)
        else:
            out = apply_2q_batch(out, c.n, g.matrix, g.sites)
    return out


def circuit_matrix(c: Circuit, max_qubits: int = 10) -> np.ndarray:
    """Full D x D matrix of the circuit, for small systems only."""
    if c.n > max_qubits:
        raise ValueError(f"dense matrix limited to n<={max_qubits}, got n={c.n}")
    return apply_circuit_batch(c, np.eye(2**c.n, dtype=complex))
