"""The two interest functions driving the search campaigns.

Classifiability interest (kicked-Ising campaign): evolve a random basis
state, collect a window of states as shadow sets, reduce them to the leading
kernel principal component, cluster with Ward linkage, and read off the
final-merge separation.  The returned value is the mean over independent
initial states, with its standard error.

Spectral interest (brickwork campaign): f = -sum_t V_t[z_t] for a polynomial
potential V_t(z) = a1_t/2 |z|^2 + a2_t/4 |z|^4, evaluated on exact moments of
a single circuit or on ensemble moments with error propagation.  The pure
quadratic choice a1=2 is the negative time-integrated form factor; the
double-well choice a1<0<a2 targets eigenphase densities modulated at radius
sqrt(|a1|/a2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuits import DtcParams, apply_circuit, dtc_unitary
from .clustering import classifiability, hac_ward
from .kernel_pca import KernelHyper, center_gram, gram_matrix, leading_components
from .seeding import child_rng, seed_from
from .shadows import MeasurementFrame, default_frame, shadow_sets_batched
from .spectral import EnsembleSeries, TraceSeries
from .statevector import basis_state


@dataclass(frozen=True)
class DtcInterestConfig:
    """Estimation hyperparameters for the classifiability interest."""

    n_init: int = 32          # independent initial states averaged over
    t1: int = 10              # first collected time step
    window: int = 40          # number of collected steps (t1 <= t < t1+window)
    n_snapshots: int = 500    # shadows per state
    frame: MeasurementFrame = field(default_factory=default_frame)
    hyper: KernelHyper = field(default_factory=KernelHyper)
    mode: str = "raw"         # classifiability readout
    initial_state: str = "random"  # or "polarized" (basis index 0)

    def __post_init__(self):
        if self.t1 < 0 or self.window < 2 or self.n_init < 1:
            raise ValueError("need t1 >= 0, window >= 2, n_init >= 1")
        if self.initial_state not in ("random", "polarized"):
            raise ValueError(f"unknown initial_state {self.initial_state!r}")


def polarized_preset(**overrides) -> DtcInterestConfig:
    """Late-window variant for the fully polarized initial state."""
    base = dict(initial_state="polarized", t1=1, window=100)
    base.update(overrides)
    return DtcInterestConfig(**base)


@dataclass(frozen=True)
class PotentialSpec:
    """Per-step coefficients of the polynomial potential in |z|^2."""

    alpha1: np.ndarray
    alpha2: np.ndarray

    def __post_init__(self):
        a1 = np.atleast_1d(np.asarray(self.alpha1, dtype=float))
        a2 = np.atleast_1d(np.asarray(self.alpha2, dtype=float))
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "alpha2", a2)
        if a1.shape != a2.shape:
            raise ValueError("alpha1 and alpha2 must have equal length")
        if not (np.all(np.isfinite(a1)) and np.all(np.isfinite(a2))):
            raise ValueError("potential coefficients must be finite")
        if len(a1) < 1:
            raise ValueError("potential needs t_max >= 1")

    @property
    def t_max(self) -> int:
        return len(self.alpha1)

    @classmethod
    def sff(cls, t_max: int) -> "PotentialSpec":
        """Quadratic potential whose interest is the negative time-integrated
        form factor."""
        return cls(2.0 * np.ones(t_max), np.zeros(t_max))

    @classmethod
    def mexican_hat(cls, t_max: int, a1: float = -1.0, a2: float = 1.0) -> "PotentialSpec":
        return cls(a1 * np.ones(t_max), a2 * np.ones(t_max))


@dataclass(frozen=True)
class InterestEstimate:
    value: float
    stderr: float
    components: np.ndarray
    sim_applications: int = 0
    hardware_applications: int = 0

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("stderr must be non-negative")


def _window_shadow_sets(
    params: DtcParams,
    cfg: DtcInterestConfig,
    basis_index: int,
    shadow_seed_root: int,
) -> list:
    """Evolve one trajectory and measure every state in the window."""
    circ = dtc_unitary(params)
    state = basis_state(params.n, basis_index)
    collected = []
    if cfg.t1 == 0:
        collected.append(state)
    for t in range(1, cfg.t1 + cfg.window):
        state = apply_circuit(circ, state)
        if t >= cfg.t1:
            collected.append(state)
    rngs = [child_rng(shadow_seed_root, ti) for ti in range(len(collected))]
    return shadow_sets_batched(collected, cfg.n_snapshots, cfg.frame, rngs)


def trajectory_pc1(
    params: DtcParams,
    cfg: DtcInterestConfig,
    basis_index: int,
    shadow_seed_root: int,
) -> np.ndarray:
    """Leading principal-component coordinate of every state in the window."""
    sets = _window_shadow_sets(params, cfg, basis_index, shadow_seed_root)
    gram = center_gram(gram_matrix(sets, cfg.hyper))
    return leading_components(gram, k=1).coords[:, 0]


def classifiability_of_trajectory(
    params: DtcParams,
    cfg: DtcInterestConfig,
    basis_index: int,
    shadow_seed_root: int,
) -> float:
    """Classifiability of the state window generated from one initial state."""
    sets = _window_shadow_sets(params, cfg, basis_index, shadow_seed_root)
    gram = center_gram(gram_matrix(sets, cfg.hyper))
    eigvals = np.linalg.eigvalsh(gram.values)
    if eigvals.max() <= 0:
        return 0.0  # all states indistinguishable: no structure to separate
    coords = leading_components(gram, k=1).coords
    return classifiability(hac_ward(coords), cfg.mode)


def dtc_interest(
    params: DtcParams,
    cfg: DtcInterestConfig,
    rng: np.random.Generator | int,
) -> InterestEstimate:
    """Mean classifiability over cfg.n_init independent initial states."""
    root = seed_from(rng)
    values = np.empty(cfg.n_init)
    for k in range(cfg.n_init):
        init_rng = child_rng(root, k, 0)
        if cfg.initial_state == "polarized":
            idx = 0
        else:
            idx = int(init_rng.integers(0, 2**params.n))
        values[k] = classifiability_of_trajectory(
            params, cfg, idx, seed_from(child_rng(root, k, 1))
        )
    stderr = float(values.std(ddof=1) / np.sqrt(cfg.n_init)) if cfg.n_init > 1 else 0.0
    periods = cfg.t1 + cfg.window - 1
    steps = np.arange(cfg.t1, cfg.t1 + cfg.window)
    return InterestEstimate(
        value=float(values.mean()),
        stderr=stderr,
        components=values,
        sim_applications=cfg.n_init * periods,
        hardware_applications=int(cfg.n_init * cfg.n_snapshots * steps.sum()),
    )


def spectral_interest(
    series: TraceSeries | EnsembleSeries, pot: PotentialSpec
) -> InterestEstimate:
    """f = -sum_t V_t evaluated on the series' moments of |z_t|^2."""
    if pot.t_max > series.t_max:
        raise ValueError(
            f"potential needs t_max={pot.t_max} but series covers {series.t_max}"
        )
    needs_quartic = bool(np.any(pot.alpha2 != 0.0))
    if isinstance(series, TraceSeries):
        sq = series.sff[: pot.t_max]
        quart = sq**2
        se_sq = np.zeros(pot.t_max)
        se_quart = np.zeros(pot.t_max)
    else:
        sq = series.mean_sq[: pot.t_max]
        se_sq = series.stderr_sq[: pot.t_max]
        if needs_quartic:
            if series.mean_quart is None:
                raise ValueError("potential needs |z|^4 moments the ensemble lacks")
            quart = series.mean_quart[: pot.t_max]
            se_quart = series.stderr_quart[: pot.t_max]
        else:
            quart = np.zeros(pot.t_max)
            se_quart = np.zeros(pot.t_max)
    per_t = -(pot.alpha1 / 2.0 * sq + pot.alpha2 / 4.0 * quart)
    var = ((pot.alpha1 / 2.0) * se_sq) ** 2 + ((pot.alpha2 / 4.0) * se_quart) ** 2
    return InterestEstimate(
        value=float(per_t.sum()),
        stderr=float(np.sqrt(var.sum())),
        components=per_t,
    )


def mexican_hat_target(pot: PotentialSpec) -> np.ndarray:
    """Target radii sqrt(|a1_t| / a2_t) for every step of a double-well
    potential; requires a1 < 0 < a2 throughout."""
    if not (np.all(pot.alpha1 < 0) and np.all(pot.alpha2 > 0)):
        raise ValueError("double-well potential requires alpha1 < 0 < alpha2")
    return np.sqrt(np.abs(pot.alpha1) / pot.alpha2)
