"""Randomized single-qubit Pauli measurements and their shadow records.

A snapshot measures every site along one of three orthogonal directions,
chosen independently and uniformly per site from a measurement frame.  The
frame defaults to the lab axes rigidly rotated by 0.7 radians about y so
that the record is not accidentally aligned with any ordering axis of the
dynamics under study; the rotation axis choice is recorded here and carried
in the frame object.

A shadow set stores, per snapshot and per site, the chosen axis index and
the outcome sign.  The joint outcome is sampled by rotating each site into
its measurement basis and drawing a single basis index from the Born
distribution, which is equivalent to sequential per-site collapse but
cheaper and exactly seedable (axes first, then one uniform per snapshot).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import State, apply_sitewise_1q_batch

_ORTHO_TOL = 1e-12
_NORM_TOL = 1e-8

DEFAULT_FRAME_ANGLE = 0.7


@dataclass(frozen=True)
class MeasurementFrame:
    """Three orthonormal measurement directions, rows of a 3x3 matrix."""

    axes: np.ndarray

    def __post_init__(self):
        axes = np.asarray(self.axes, dtype=float)
        object.__setattr__(self, "axes", axes)
        if axes.shape != (3, 3):
            raise ValueError("frame needs three 3-vectors")
        gram = axes @ axes.T
        if np.abs(gram - np.eye(3)).max() > _ORTHO_TOL:
            raise ValueError("frame axes must be orthonormal")

    def __eq__(self, other):
        return isinstance(other, MeasurementFrame) and np.array_equal(self.axes, other.axes)


def lab_frame() -> MeasurementFrame:
    return MeasurementFrame(np.eye(3))


def frame_from_rotation(angle: float, axis: np.ndarray) -> MeasurementFrame:
    """Lab axes rigidly rotated by `angle` about a unit 3-vector `axis`."""
    ax = np.asarray(axis, dtype=float)
    if abs(np.linalg.norm(ax) - 1.0) > 1e-10:
        raise ValueError("rotation axis must be a unit vector")
    k = np.array(
        [[0.0, -ax[2], ax[1]], [ax[2], 0.0, -ax[0]], [-ax[1], ax[0], 0.0]]
    )
    rot = np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)
    # row k of the frame is the rotated lab axis R e_k, i.e. column k of R
    return MeasurementFrame(rot.T)


def default_frame() -> MeasurementFrame:
    """Frame used for headline runs: lab axes rotated 0.7 rad about y."""
    return frame_from_rotation(DEFAULT_FRAME_ANGLE, np.array([0.0, 1.0, 0.0]))


def basis_rotations(frame: MeasurementFrame) -> np.ndarray:
    """(3, 2, 2) stack of Vdag matrices mapping each frame axis to Z.

    Column k of V is the +1/-1 eigenvector of sigma.d for direction d, so
    (Vdag psi) holds the amplitudes of the two outcomes along d.
    """
    out = np.empty((3, 2, 2), dtype=complex)
    for a, d in enumerate(frame.axes):
        theta = np.arccos(np.clip(d[2], -1.0, 1.0))
        phi = np.arctan2(d[1], d[0])
        plus = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
        minus = np.array([-np.exp(-1j * phi) * np.sin(theta / 2), np.cos(theta / 2)])
        out[a] = np.stack([plus, minus], axis=1).conj().T
    return out


@dataclass(frozen=True)
class ShadowSet:
    """N_s snapshots of one state: per-site axis indices and outcome signs."""

    n: int
    axes: np.ndarray    # (N_s, n) uint8 in {0, 1, 2}
    signs: np.ndarray   # (N_s, n) int8 in {+1, -1}
    frame: MeasurementFrame

    def __post_init__(self):
        if self.axes.shape != self.signs.shape or self.axes.ndim != 2:
            raise ValueError("axes and signs must be (N_s, n) arrays")
        if self.axes.shape[0] < 1:
            raise ValueError("a shadow set needs at least one snapshot")
        if self.axes.shape[1] != self.n:
            raise ValueError("row length must equal the qubit count")

    @property
    def n_snapshots(self) -> int:
        return self.axes.shape[0]


def shadow_set(
    s: State, n_snapshots: int, frame: MeasurementFrame, rng: np.random.Generator
) -> ShadowSet:
    """Collect n_snapshots independent all-site Pauli measurements of `s`."""
    return shadow_sets_batched([s], n_snapshots, frame, [rng])[0]


def shadow_sets_batched(
    states: list[State],
    n_snapshots: int,
    frame: MeasurementFrame,
    rngs: list[np.random.Generator],
) -> list[ShadowSet]:
    """Shadow sets for several states of equal size in one linear-algebra pass.

    State k consumes only rngs[k], in the same order as a standalone
    shadow_set call (axis draws first, one uniform per snapshot), so the
    output is identical to sampling each state separately.
    """
    if n_snapshots < 1:
        raise ValueError("n_snapshots must be at least 1")
    if len(states) != len(rngs):
        raise ValueError("need exactly one rng stream per state")
    n = states[0].n
    for s in states:
        if s.n != n:
            raise ValueError("all states must have the same qubit count")
        if abs(s.norm() - 1.0) > _NORM_TOL:
            raise ValueError(
                f"state must be normalized, |norm - 1| = {abs(s.norm()-1):.2e}"
            )
    rots = basis_rotations(frame)
    axes = np.stack(
        [rng.integers(0, 3, size=(n_snapshots, n), dtype=np.uint8) for rng in rngs]
    )
    batch = np.concatenate(
        [np.broadcast_to(s.amps[:, None], (s.dim, n_snapshots)) for s in states],
        axis=1,
    )
    rotated = apply_sitewise_1q_batch(
        batch, n, rots[axes.reshape(len(states) * n_snapshots, n)]
    )
    prob = np.abs(rotated) ** 2
    cum = np.cumsum(prob, axis=0)
    u = np.concatenate([rng.random(n_snapshots) for rng in rngs]) * cum[-1]
    outcome = np.argmax(cum >= u[None, :], axis=0)
    bits = (outcome[:, None] >> np.arange(n)[None, :]) & 1
    signs = (1 - 2 * bits).astype(np.int8).reshape(len(states), n_snapshots, n)
    return [
        ShadowSet(n, axes[k], signs[k], frame) for k in range(len(states))
    ]


def sample_snapshot(
    s: State, frame: MeasurementFrame, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """One all-site snapshot; returns (axis indices, signs) for sites 0..n-1."""
    one = shadow_set(s, 1, frame, rng)
    return one.axes[0], one.signs[0]


def bloch_estimates(shadows: ShadowSet) -> np.ndarray:
    """(n, 3) estimated Bloch vectors in lab coordinates.

    Per snapshot and site the inverse measurement channel contributes
    3 * sign * d_axis; averaging over snapshots is unbiased for the true
    Bloch vector of the site's reduced state.
    """
    dirs = shadows.frame.axes[shadows.axes]          # (N_s, n, 3)
    contrib = 3.0 * shadows.signs[..., None] * dirs
    return contrib.mean(axis=0)
