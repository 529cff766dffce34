"""Nelder-Mead maximization with periodic simplex restarts.

The simplex method tolerates noisy objectives without gradient estimates; on
such objectives it compares single estimates and never re-averages, the
noise handling being the caller's business.  Because the simplex contracts
within a few tens of steps, it is re-initialized around the incumbent best
point at a fixed iteration cadence with fresh axis-aligned edges.

Parameters that are angles can be declared periodic; coordinates are folded
into [0, period) only when the objective is evaluated, so the simplex
geometry itself stays unconstrained.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class NmConfig:
    initial_step: float = 1.0
    restart_every: int = 25
    max_iters: int = 200
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5

    def __post_init__(self):
        if self.restart_every < 1:
            raise ValueError("restart_every must be at least 1")
        if not (self.reflection > 0 and self.expansion > 1 and 0 < self.contraction < 1
                and 0 < self.shrink < 1):
            raise ValueError("simplex coefficients outside admissible ranges")


@dataclass
class OptTrajectory:
    """Per-iteration log plus the best-so-far record (by recorded estimates)."""

    iterations: list[int] = field(default_factory=list)
    params: list[np.ndarray] = field(default_factory=list)
    estimates: list[float] = field(default_factory=list)
    best_x: np.ndarray | None = None
    best_f: float = -np.inf
    n_evals: int = 0
    n_restarts: int = 0
    final_simplex: np.ndarray | None = None

    def record(self, iteration: int, x: np.ndarray, f: float) -> None:
        self.iterations.append(iteration)
        self.params.append(x.copy())
        self.estimates.append(f)
        if f > self.best_f:
            self.best_f = f
            self.best_x = x.copy()


def _fold(x: np.ndarray, periods: np.ndarray | None) -> np.ndarray:
    if periods is None:
        return x
    out = x.copy()
    finite = np.isfinite(periods)
    out[finite] = np.mod(out[finite], periods[finite])
    return out


def maximize(
    obj: Callable[[np.ndarray, np.random.Generator], float],
    x0: np.ndarray,
    cfg: NmConfig,
    rng: np.random.Generator,
    periods: np.ndarray | None = None,
) -> OptTrajectory:
    """Maximize a (possibly stochastic) objective from x0.

    obj(x, rng) -> float is evaluated at folded coordinates; a non-finite
    return aborts with a diagnostic.  Returns the trajectory of per-iteration
    incumbents together with the best-so-far record.
    """
    x0 = np.asarray(x0, dtype=float)
    p = x0.size
    if p < 1:
        raise ValueError("need at least one parameter")
    if periods is not None:
        periods = np.asarray(periods, dtype=float)
        if periods.shape != x0.shape:
            raise ValueError("periods must match the parameter vector shape")

    traj = OptTrajectory()

    def evaluate(x: np.ndarray) -> float:
        val = float(obj(_fold(x, periods), rng))
        traj.n_evals += 1
        if not np.isfinite(val):
            raise RuntimeError(
                f"objective returned non-finite value {val!r} at x={_fold(x, periods)!r}"
            )
        return -val  # minimize internally

    def build_simplex(center: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        simplex = np.tile(center, (p + 1, 1))
        for k in range(p):
            simplex[k + 1, k] += cfg.initial_step
        values = np.array([evaluate(v) for v in simplex])
        return simplex, values

    simplex, values = build_simplex(x0)
    traj.record(0, _fold(simplex[0], periods), -values[0])

    for iteration in range(1, cfg.max_iters + 1):
        if iteration > 1 and (iteration - 1) % cfg.restart_every == 0:
            best = simplex[np.argmin(values)].copy()
            simplex, values = build_simplex(best)
            traj.n_restarts += 1

        order = np.argsort(values, kind="stable")
        simplex = simplex[order]
        values = values[order]
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]

        xr = centroid + cfg.reflection * (centroid - worst)
        fr = evaluate(xr)
        if fr < values[0]:
            xe = centroid + cfg.expansion * (xr - centroid)
            fe = evaluate(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
        elif fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
        else:
            if fr < values[-1]:
                xc = centroid + cfg.contraction * (xr - centroid)
            else:
                xc = centroid + cfg.contraction * (worst - centroid)
            fc = evaluate(xc)
            if fc < min(fr, values[-1]):
                simplex[-1], values[-1] = xc, fc
            else:
                best = simplex[0]
                for k in range(1, p + 1):
                    simplex[k] = best + cfg.shrink * (simplex[k] - best)
                    values[k] = evaluate(simplex[k])

        i_best = int(np.argmin(values))
        traj.record(iteration, _fold(simplex[i_best], periods), -values[i_best])

    traj.final_simplex = simplex.copy()
    return traj


def simplex_diameter(simplex: np.ndarray) -> float:
    """Largest vertex-to-vertex distance of a simplex."""
    diffs = simplex[:, None, :] - simplex[None, :, :]
    return float(np.sqrt((diffs**2).sum(axis=2)).max())
