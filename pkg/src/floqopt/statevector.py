"""Dense statevector simulation of n-qubit pure states.

Site convention is little-endian throughout the package: site i is bit i of
the computational-basis index, so site 0 is the least significant bit.  A
two-qubit gate matrix on ordered sites (i, j) is indexed by 2*bit_i + bit_j,
i.e. its matrix equals kron(op_on_i, op_on_j).

States are value objects: gate application returns a new amplitude vector.
The batched helpers at the bottom operate on (D, C) arrays whose columns are
independent states; they are the hot path for trace evaluation and shot
sampling and are shared by the circuit and spectral modules.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 14
UNITARY_TOL = 1e-12


def _check_unitary(m: np.ndarray, dim: int) -> None:
    if m.shape != (dim, dim):
        raise ValueError(f"gate matrix must be {dim}x{dim}, got {m.shape}")
    dev = np.abs(m.conj().T @ m - np.eye(dim)).max()
    if dev > UNITARY_TOL:
        raise ValueError(f"gate matrix is not unitary (max deviation {dev:.2e})")


@dataclass(frozen=True)
class State:
    """Pure state of n qubits as a complex amplitude vector of length 2**n."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {self.n}")
        if self.amps.shape != (2**self.n,):
            raise ValueError(
                f"amplitude vector has length {self.amps.shape}, expected {2**self.n}"
            )

    @property
    def dim(self) -> int:
        return 2**self.n

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class Gate1Q:
    """Single-qubit gate: a 2x2 unitary acting on one target site."""

    matrix: np.ndarray
    site: int

    def __post_init__(self):
        _check_unitary(self.matrix, 2)
        if self.site < 0:
            raise ValueError("site must be non-negative")


@dataclass(frozen=True)
class Gate2Q:
    """Two-qubit gate: a 4x4 unitary on an ordered site pair (first site is
    the most significant index of the matrix)."""

    matrix: np.ndarray
    sites: tuple[int, int]

    def __post_init__(self):
        _check_unitary(self.matrix, 4)
        i, j = self.sites
        if i == j:
            raise ValueError("two-qubit gate requires distinct sites")
        if i < 0 or j < 0:
            raise ValueError("sites must be non-negative")


def basis_state(n: int, index: int) -> State:
    """Computational basis state |index> on n qubits."""
    if not 0 <= index < 2**n:
        raise ValueError(f"basis index {index} out of range for n={n}")
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1.0
    return State(n, amps)


def random_state(n: int, rng: np.random.Generator) -> State:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return State(n, v / np.linalg.norm(v))


def overlap(a: State, b: State) -> complex:
    """Inner product <a|b>."""
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} vs {b.n}")
    return complex(np.vdot(a.amps, b.amps))


def apply_1q(state: State, g: Gate1Q) -> State:
    if g.site >= state.n:
        raise ValueError(f"site {g.site} out of range for n={state.n}")
    out = apply_1q_batch(state.amps[:, None], state.n, g.matrix, g.site)
    return State(state.n, out[:, 0])


def apply_2q(state: State, g: Gate2Q) -> State:
    i, j = g.sites
    if i >= state.n or j >= state.n:
        raise ValueError(f"sites {g.sites} out of range for n={state.n}")
    out = apply_2q_batch(state.amps[:, None], state.n, g.matrix, g.sites)
    return State(state.n, out[:, 0])


# ---------------------------------------------------------------------------
# Batched low-level operations on (D, C) column stacks.
# ---------------------------------------------------------------------------

def apply_1q_batch(amps: np.ndarray, n: int, matrix: np.ndarray, site: int) -> np.ndarray:
    """Apply one 2x2 matrix to `site` of every column of a (D, C) stack."""
    d, c = amps.shape
    t = amps.reshape([2] * n + [c])
    axis = n - 1 - site
    t = np.moveaxis(t, axis, 0)
    shape = t.shape
    t = (matrix @ t.reshape(2, -1)).reshape(shape)
    return np.moveaxis(t, 0, axis).reshape(d, c)


def apply_2q_batch(
    amps: np.ndarray, n: int, matrix: np.ndarray, sites: tuple[int, int]
) -> np.ndarray:
    """Apply one 4x4 matrix to ordered `sites` of every column of a (D, C) stack."""
    d, c = amps.shape
    i, j = sites
    t = amps.reshape([2] * n + [c])
    t = np.moveaxis(t, (n - 1 - i, n - 1 - j), (0, 1))
    shape = t.shape
    t = (matrix @ t.reshape(4, -1)).reshape(shape)
    return np.moveaxis(t, (0, 1), (n - 1 - i, n - 1 - j)).reshape(d, c)


def apply_sitewise_1q_batch(amps: np.ndarray, n: int, gates: np.ndarray) -> np.ndarray:
    """Apply a different 2x2 gate per column and per site.

    gates has shape (C, n, 2, 2); gates[c, i] acts on site i of column c.
    Used for randomized-measurement protocols where every shot carries its
    own product of single-qubit rotations.  The contraction is written as
    broadcast arithmetic over the column axis, which is much faster here
    than a general einsum.
    """
    d, c = amps.shape
    if gates.shape != (c, n, 2, 2):
        raise ValueError(f"gates must have shape {(c, n, 2, 2)}, got {gates.shape}")
    t = amps.reshape([2] * n + [c])
    for site in range(n):
        axis = n - 1 - site
        t = np.moveaxis(t, axis, 0)
        g = gates[:, site]
        x0, x1 = t[0], t[1]
        t = np.stack(
            [x0 * g[:, 0, 0] + x1 * g[:, 0, 1], x0 * g[:, 1, 0] + x1 * g[:, 1, 1]]
        )
        t = np.moveaxis(t, 0, axis)
    return t.reshape(d, c)


def sample_basis_indices(amps: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw one basis index per column of a (D, C) stack from |amplitude|^2.

    One uniform variate is consumed per column, in column order.
    """
    prob = np.abs(amps) ** 2
    cum = np.cumsum(prob, axis=0)
    u = rng.random(amps.shape[1]) * cum[-1]
    return np.argmax(cum >= u[None, :], axis=0)
