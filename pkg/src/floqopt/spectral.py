"""Normalized traces of circuit powers and derived spectral statistics.

z_t = tr(U^t) / 2^n is evaluated exactly by evolving computational basis
columns period by period and accumulating diagonal amplitudes after every
period; the full 2^n x 2^n matrix is never formed at once, columns are
processed in memory-bounded chunks, and reduction order is fixed (ascending
column index) so sums are bit-reproducible.  Dense diagonalization is kept
only as a small-system oracle for eigenphases.

The subsystem-resolved statistic

    psff_t(A) = tr_Abar[ tr_A(U^t)^dag tr_A(U^t) ] / (D_Abar * D_A^2)

comes from the same column evolutions: for each value a of the A-bits the
evolved columns |a, bbar> contribute one D_Abar x D_Abar block of tr_A(U^t).
Its randomized-measurement estimator prepares a random product state, evolves
t periods, unrotates, measures once, and averages (-2)^(-hamming weight on A)
over shots; that sample mean is unbiased for psff_t (single-qubit Haar
2-design algebra), so no extra prefactor is applied.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.optimize import minimize_scalar

from .circuits import (
    BrickworkParams,
    Circuit,
    apply_circuit_batch,
    brickwork_unitary_fused,
    haar_1q_stack,
)
from .seeding import child_rng, seed_from
from .statevector import apply_sitewise_1q_batch, sample_basis_indices

_MAX_BATCH_BYTES = 1 << 27  # 128 MiB of complex amplitudes per column chunk
_FULL_MATRIX_MAX_DIM = 2048


@dataclass(frozen=True)
class TraceSeries:
    """Exact z_t for one circuit, t = 1..t_max."""

    n: int
    z: np.ndarray  # complex, (t_max,)

    @property
    def t_max(self) -> int:
        return len(self.z)

    @property
    def dim(self) -> int:
        return 2**self.n

    @property
    def sff(self) -> np.ndarray:
        return np.abs(self.z) ** 2


@dataclass(frozen=True)
class EnsembleSeries:
    """Moments of |z_t|^2 over an ensemble of circuit realizations."""

    n: int
    n_real: int
    mean_sq: np.ndarray
    stderr_sq: np.ndarray
    mean_quart: np.ndarray
    stderr_quart: np.ndarray

    @property
    def t_max(self) -> int:
        return len(self.mean_sq)

    @property
    def dim(self) -> int:
        return 2**self.n


@dataclass(frozen=True)
class Subsystem:
    """Sorted site subset A of an n-qubit chain; the complement is implied."""

    sites: tuple[int, ...]
    n: int

    def __post_init__(self):
        sites = tuple(sorted(int(s) for s in self.sites))
        object.__setattr__(self, "sites", sites)
        if len(set(sites)) != len(sites):
            raise ValueError("subsystem sites must be distinct")
        if sites and (sites[0] < 0 or sites[-1] >= self.n):
            raise ValueError("subsystem sites out of range")

    @property
    def size(self) -> int:
        return len(self.sites)

    @property
    def complement(self) -> tuple[int, ...]:
        inside = set(self.sites)
        return tuple(i for i in range(self.n) if i not in inside)

    @property
    def d_a(self) -> int:
        return 2**self.size

    @property
    def d_abar(self) -> int:
        return 2 ** (self.n - self.size)


@dataclass(frozen=True)
class DwFit:
    """Weighted fit of the ramp-correction timescale to an ensemble series."""

    dw_tension: float
    residual: float
    window: tuple[int, int]
    degenerate: bool
    delta_f_prediction: float


def _column_chunks(d: int, width: int | None = None):
    if width is None:
        width = max(1, min(d, _MAX_BATCH_BYTES // (16 * d)))
    for start in range(0, d, width):
        yield np.arange(start, min(start + width, d))


def trace_series(c: Circuit, t_max: int) -> TraceSeries:
    """Exact z_t = tr(U^t)/D for t = 1..t_max by chunked column evolution."""
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    d = 2**c.n
    z = np.zeros(t_max, dtype=complex)
    for cols in _column_chunks(d):
        batch = np.zeros((d, len(cols)), dtype=complex)
        batch[cols, np.arange(len(cols))] = 1.0
        for t in range(t_max):
            batch = apply_circuit_batch(c, batch)
            z[t] += batch[cols, np.arange(len(cols))].sum()
    return TraceSeries(c.n, z / d)


def eigenphases(c: Circuit) -> np.ndarray:
    """All D eigenphases of the one-period matrix, n <= 10 only."""
    if c.n > 10:
        raise ValueError(f"dense diagonalization limited to n<=10, got n={c.n}")
    m = apply_circuit_batch(c, np.eye(2**c.n, dtype=complex))
    return np.angle(np.linalg.eigvals(m))


def noninteracting_reference(phis: np.ndarray, t: int) -> float:
    """|z_t|^2 of a product of single-qubit rotations with half-gaps phis."""
    return float(np.prod(np.cos(np.asarray(phis, dtype=float) * t) ** 2))


def cue_reference(t, d: int):
    """Fully-random-unitary mean of |z_t|^2: the ramp t/D^2, then 1/D."""
    t_arr = np.asarray(t, dtype=float)
    out = np.where(t_arr < d, t_arr / d**2, 1.0 / d)
    return float(out) if np.isscalar(t) else out


# ---------------------------------------------------------------------------
# Brickwork ensembles with independent Haar single-qubit layers.
# ---------------------------------------------------------------------------

def _realization(j_xyz, n: int, rng: np.random.Generator) -> Circuit:
    gates = haar_1q_stack(2 * n, rng)
    params = BrickworkParams(
        n=n,
        j_xyz=tuple(j_xyz),
        layer_a=tuple(gates[:n]),
        layer_b=tuple(gates[n:]),
    )
    return brickwork_unitary_fused(params)


def trace_samples(
    j_xyz, n: int, indices, t_max: int, root_seed: int
) -> np.ndarray:
    """(len(indices), t_max) complex z_t draws; realization r is fully
    determined by (root_seed, r) so any index partition gives the same rows."""
    out = np.empty((len(indices), t_max), dtype=complex)
    for row, r in enumerate(indices):
        circ = _realization(j_xyz, n, child_rng(root_seed, int(r)))
        out[row] = trace_series(circ, t_max).z
    return out


def ensemble_stats(z_samples: np.ndarray, n: int) -> EnsembleSeries:
    """Reduce per-realization z_t rows to moment means and standard errors."""
    n_real = z_samples.shape[0]
    if n_real < 2:
        raise ValueError("an ensemble needs at least two realizations")
    sq = np.abs(z_samples) ** 2
    quart = sq**2
    return EnsembleSeries(
        n=n,
        n_real=n_real,
        mean_sq=sq.mean(axis=0),
        stderr_sq=sq.std(axis=0, ddof=1) / np.sqrt(n_real),
        mean_quart=quart.mean(axis=0),
        stderr_quart=quart.std(axis=0, ddof=1) / np.sqrt(n_real),
    )


def ensemble_sff(
    j_xyz, n: int, n_real: int, t_max: int, rng: np.random.Generator | int
) -> EnsembleSeries:
    """Moments of |z_t|^2 over n_real draws of all single-qubit gates."""
    root = seed_from(rng)
    samples = trace_samples(j_xyz, n, range(n_real), t_max, root)
    return ensemble_stats(samples, n)


# ---------------------------------------------------------------------------
# Partial spectral form factor, exact and sampled.
# ---------------------------------------------------------------------------

def _scatter_indices(bit_positions: tuple[int, ...]) -> np.ndarray:
    """Map 0..2^k-1 to basis indices with bit j placed at bit_positions[j]."""
    vals = np.arange(2 ** len(bit_positions), dtype=np.int64)
    out = np.zeros_like(vals)
    for k, pos in enumerate(bit_positions):
        out |= ((vals >> k) & 1) << pos
    return out


def psff_exact(c: Circuit, t_max: int, sub: Subsystem) -> np.ndarray:
    """(t_max,) exact psff_t of one circuit for subsystem `sub`."""
    if sub.n != c.n:
        raise ValueError("subsystem and circuit sizes differ")
    if c.n - sub.size > 10:
        raise ValueError("complement too large: partial-trace blocks exceed n=10")
    d = 2**c.n
    d_abar = sub.d_abar
    a_offsets = _scatter_indices(sub.sites)
    abar_offsets = _scatter_indices(sub.complement)
    blocks = np.zeros((t_max, d_abar, d_abar), dtype=complex)
    width = max(1, _MAX_BATCH_BYTES // (16 * d))
    for a_base in a_offsets:
        cols = a_base + abar_offsets
        for lo in range(0, d_abar, width):
            part = cols[lo : lo + width]
            batch = np.zeros((d, len(part)), dtype=complex)
            batch[part, np.arange(len(part))] = 1.0
            for t in range(t_max):
                batch = apply_circuit_batch(c, batch)
                blocks[t][:, lo : lo + len(part)] += batch[cols, :]
    norms = np.array([np.linalg.norm(b) ** 2 for b in blocks])
    return norms / (d_abar * sub.d_a**2)


def _psff_from_matrix(m: np.ndarray, n: int, sub: Subsystem) -> float:
    """psff value of an explicit D x D power matrix via block partial trace."""
    axes_a = [n - 1 - s for s in sub.sites]
    axes_abar = [n - 1 - s for s in sub.complement]
    perm = axes_a + axes_abar
    perm = perm + [ax + n for ax in perm]
    four = m.reshape([2] * (2 * n)).transpose(perm).reshape(
        sub.d_a, sub.d_abar, sub.d_a, sub.d_abar
    )
    block = np.einsum("abad->bd", four)
    return float((np.abs(block) ** 2).sum() / (sub.d_abar * sub.d_a**2))


def psff_exact_multi(
    c: Circuit, t_max: int, subs: list[Subsystem]
) -> np.ndarray:
    """(len(subs), t_max) exact psff curves sharing one column evolution.

    For small systems the full power matrix is held once per period and each
    subsystem's block trace is read from it; larger systems fall back to the
    per-subsystem chunked accumulation.
    """
    d = 2**c.n
    if d <= _FULL_MATRIX_MAX_DIM:
        m = np.eye(d, dtype=complex)
        out = np.empty((len(subs), t_max), dtype=float)
        for t in range(t_max):
            m = apply_circuit_batch(c, m)
            for si, sub in enumerate(subs):
                out[si, t] = _psff_from_matrix(m, c.n, sub)
        return out
    return np.stack([psff_exact(c, t_max, s) for s in subs])


def psff_samples(
    j_xyz, n: int, subs: list[Subsystem], indices, t_max: int, root_seed: int
) -> np.ndarray:
    """(len(indices), len(subs), t_max) per-realization exact psff rows of the
    brickwork ensemble, seeded exactly like trace_samples."""
    out = np.empty((len(indices), len(subs), t_max), dtype=float)
    for row, r in enumerate(indices):
        circ = _realization(j_xyz, n, child_rng(root_seed, int(r)))
        out[row] = psff_exact_multi(circ, t_max, subs)
    return out


def psff_sampled(
    c: Circuit,
    t: int,
    sub: Subsystem,
    n_shots: int,
    rng: np.random.Generator,
    block: int = 2048,
) -> float:
    """Randomized-measurement estimate of psff_t from n_shots single shots.

    Each shot draws fresh site rotations u_i, prepares prod_i u_i |0..0>,
    evolves t periods, applies u_i^dag, and measures once; the estimator is
    the mean of (-2)^(-|s_A|) over shots.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be at least 1")
    if sub.n != c.n:
        raise ValueError("subsystem and circuit sizes differ")
    d = 2**c.n
    mask = np.int64(sum(1 << s for s in sub.sites))
    total = 0.0
    done = 0
    while done < n_shots:
        m = min(block, n_shots - done)
        gates = haar_1q_stack(m * c.n, rng).reshape(m, c.n, 2, 2)
        amps = np.zeros((d, m), dtype=complex)
        amps[0, :] = 1.0
        amps = apply_sitewise_1q_batch(amps, c.n, gates)
        for _ in range(t):
            amps = apply_circuit_batch(c, amps)
        amps = apply_sitewise_1q_batch(amps, c.n, gates.conj().transpose(0, 1, 3, 2))
        outcomes = sample_basis_indices(amps, rng)
        weight = np.bitwise_count(outcomes.astype(np.int64) & mask).astype(np.int64)
        total += ((-0.5) ** weight).sum()  # (-2)^(-|s_A|)
        done += m
    return total / n_shots


def hadamard_test_sampled(
    c: Circuit,
    t: int,
    n_shots: int,
    rng: np.random.Generator,
    z: complex | None = None,
) -> complex:
    """Ancilla-sampled estimate of z_t: means of n_shots +-1 outcomes whose
    expectations are Re z_t and Im z_t."""
    if z is None:
        z = trace_series(c, t).z[t - 1]
    p_x = np.clip((1.0 + z.real) / 2.0, 0.0, 1.0)
    p_y = np.clip((1.0 + z.imag) / 2.0, 0.0, 1.0)
    x_mean = 2.0 * (rng.random(n_shots) < p_x).mean() - 1.0
    y_mean = 2.0 * (rng.random(n_shots) < p_y).mean() - 1.0
    return complex(x_mean, y_mean)


# ---------------------------------------------------------------------------
# Ramp-correction (domain-wall tension) fit.
# ---------------------------------------------------------------------------

def dw_model(t: np.ndarray, tau: float, n: int) -> np.ndarray:
    """Ensemble mean |z_t|^2 = (t/D^2) [1 + C(n,2)(t-1) exp(-2t/tau)]."""
    d = 2**n
    ramp = t / d**2
    if tau <= 0:
        return ramp
    return ramp * (1.0 + comb(n, 2) * (t - 1) * np.exp(-2.0 * t / tau))


def fit_dw_tension(ens: EnsembleSeries, n: int) -> DwFit:
    """Weighted least-squares fit of the tension over t in [2, t_max].

    The window starts at t=2 because the (t-1) factor removes all t=1
    information.  Data consistent with the bare ramp is reported as tension
    zero with the degenerate flag set.
    """
    t_all = np.arange(1, ens.t_max + 1, dtype=float)
    window = t_all >= 2
    t = t_all[window]
    y = ens.mean_sq[window]
    se = ens.stderr_sq[window]
    if np.all(se > 0):
        w = 1.0 / se**2
    else:
        w = np.ones_like(y)

    def loss(tau: float) -> float:
        return float((w * (y - dw_model(t, tau, n)) ** 2).sum())

    # coarse log grid, then bounded refinement around the grid minimum
    taus = np.logspace(-3, 3, 121)
    coarse = np.array([loss(tau) for tau in taus])
    k = int(np.argmin(coarse))
    lo = taus[max(0, k - 1)]
    hi = taus[min(len(taus) - 1, k + 1)]
    res = minimize_scalar(
        loss, bounds=(lo, hi), method="bounded", options={"xatol": 1e-8 * taus[k]}
    )
    loss_zero = loss(0.0)
    tau = float(res.x)
    best = float(res.fun)
    if loss_zero <= best * (1.0 + 1e-12) + 1e-300:
        return DwFit(0.0, loss_zero, (2, ens.t_max), True, 0.0)
    delta_f = -(n**2) * float(np.exp(-4.0 / tau))
    return DwFit(tau, best, (2, ens.t_max), False, delta_f)
