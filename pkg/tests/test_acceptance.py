"""Acceptance criteria, one test per criterion, at their stated sizes and
tolerances.  Each test prints one summary line; `pytest -v` adds the
PASSED/FAILED verdict per criterion.  The statistical campaigns (4-11) carry
the `slow` marker; criterion 6 dominates the runtime (ten 500-iteration
optimization runs).
"""
import json
from pathlib import Path

import numpy as np
import pytest

from floqopt.campaigns import circular_distance, run_campaign
from floqopt.clustering import hac_ward
from floqopt.config import resolve_config
from floqopt.interest import DtcInterestConfig, classifiability_of_trajectory
from floqopt.kernel_pca import KernelHyper, gram_matrix
from floqopt.seeding import child_rng, seed_from
from floqopt.shadows import bloch_estimates, default_frame, shadow_set
from floqopt.spectral import _realization, trace_series
from floqopt.statevector import basis_state, random_state
from floqopt.circuits import DtcParams, apply_circuit

from _oracles import (
    dense_circuit_matrix,
    naive_gram,
    random_small_circuit,
    reference_ward,
)
from test_shadows import true_bloch_vectors

Z_AXIS = np.array([0.0, 0.0, 1.0])
X_AXIS = np.array([1.0, 0.0, 0.0])
PI = np.pi


def report(criterion: int, detail: str) -> None:
    print(f"[criterion {criterion:02d}] {detail}")


# ---------------------------------------------------------------------------
# 1. Oracle equivalence of the simulator.
# ---------------------------------------------------------------------------

def test_criterion_01_simulator_oracle_equivalence():
    rng = np.random.default_rng(101)
    worst_trace, worst_apply = 0.0, 0.0
    sizes = [4] * 8 + [6] * 6 + [8] * 6
    for n in sizes:
        circ = random_small_circuit(n, 12, rng)
        dense = dense_circuit_matrix(circ)

        phases = np.angle(np.linalg.eigvals(dense))
        ts = trace_series(circ, 8)
        ref = np.array([np.exp(1j * t * phases).mean() for t in range(1, 9)])
        worst_trace = max(worst_trace, float(np.abs(ts.z - ref).max()))

        psi = random_state(n, rng)
        direct = apply_circuit(circ, psi).amps
        worst_apply = max(worst_apply, float(np.abs(direct - dense @ psi.amps).max()))
    report(1, f"20 circuits: trace dev {worst_trace:.2e} (<1e-9), "
              f"apply dev {worst_apply:.2e} (<1e-10)")
    assert worst_trace < 1e-9
    assert worst_apply < 1e-10


# ---------------------------------------------------------------------------
# 2. Shadow channel unbiasedness.
# ---------------------------------------------------------------------------

def test_criterion_02_shadow_unbiasedness():
    rng = np.random.default_rng(102)
    worst = 0.0
    for k in range(5):
        state = random_state(2, rng)
        truth = true_bloch_vectors(state)
        shadows = shadow_set(state, 100_000, default_frame(), child_rng(102, k))
        est = bloch_estimates(shadows)
        worst = max(worst, float(np.abs(est - truth).max()))
    report(2, f"5 states x 2 sites x 3 components: worst error {worst:.4f} (<0.02)")
    assert worst < 0.02


# ---------------------------------------------------------------------------
# 3. Kernel and clustering against naive references.
# ---------------------------------------------------------------------------

def test_criterion_03_kernel_and_clustering_oracles():
    rng = np.random.default_rng(103)
    hp = KernelHyper()
    worst_gram = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 4))
        sets = [
            shadow_set(random_state(n, rng), 5, default_frame(), rng)
            for _ in range(3)
        ]
        fast = gram_matrix(sets, hp).values
        slow = naive_gram(sets, hp.kernel_tau, hp.gamma)
        worst_gram = max(worst_gram, float(np.abs(fast - slow).max() / slow.max()))

    worst_hac = 0.0
    for _ in range(50):
        t = int(rng.integers(2, 65))
        k = int(rng.integers(1, 4))
        pts = rng.normal(size=(t, k))
        tree = hac_ward(pts)
        ref = reference_ward(pts)
        for m, (left, right, dist, size) in zip(tree.merges, ref):
            assert (m.left, m.right, m.size) == (left, right, size)
            worst_hac = max(worst_hac, abs(m.distance - dist) / max(dist, 1.0))
    report(3, f"50 gram instances rel dev {worst_gram:.2e} (<1e-12); "
              f"50 ward instances rel dev {worst_hac:.2e} (<1e-9)")
    assert worst_gram < 1e-12
    assert worst_hac < 1e-9


# ---------------------------------------------------------------------------
# 4. Classifiability landscape contrast.
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_04_dtc_landscape_contrast(tmp_path):
    cfg = resolve_config({
        "kind": "dtc-landscape", "seed": 104, "workers": 2,
        "out": str(tmp_path / "c4"),
        "n": 6, "j_values": [PI / 4], "h_values": [PI / 2, 0.2],
        "disorder": 0.4, "n_init": 30, "window": 32, "n_snapshots": 500,
    })
    res = run_campaign(cfg)
    f_dtc, se_dtc = res["f"][0, 0], res["stderr"][0, 0]
    f_triv, se_triv = res["f"][0, 1], res["stderr"][0, 1]
    report(4, f"f(pi/4, pi/2) = {f_dtc:.2f}+-{se_dtc:.2f}, "
              f"f(pi/4, 0.2) = {f_triv:.2f}+-{se_triv:.2f}, ratio {f_dtc/f_triv:.1f}")
    assert f_dtc > 2 * f_triv
    assert f_dtc - 2 * se_dtc > f_triv + 2 * se_triv


# ---------------------------------------------------------------------------
# 5. Square-root growth of the score with the window length.
# ---------------------------------------------------------------------------

def _windowed_score(h_mean: float, window: int, seed_a: int, seed_b: int,
                    n_init: int = 12) -> tuple[float, float]:
    n = 6
    cfg = DtcInterestConfig(
        n_init=1, t1=10, window=window, n_snapshots=250, mode="balanced"
    )
    vals = []
    for k in range(n_init):
        rng = child_rng(seed_a, window, k)
        j = rng.uniform(PI / 4 - 0.2, PI / 4 + 0.2, n)
        h = rng.uniform(h_mean - 0.2, h_mean + 0.2, n)
        params = DtcParams(j, h, Z_AXIS, X_AXIS)
        idx = int(rng.integers(0, 2**n))
        vals.append(classifiability_of_trajectory(
            params, cfg, idx, seed_from(child_rng(seed_b, window, k))
        ))
    v = np.array(vals)
    return float(v.mean()), float(v.std(ddof=1) / np.sqrt(n_init))


@pytest.mark.slow
def test_criterion_05_sqrt_window_scaling():
    windows = [8, 16, 32, 64]
    deep, trivial = [], []
    for window in windows:
        deep.append(_windowed_score(PI / 2, window, 105, 1105))
        trivial.append(_windowed_score(0.2, window, 205, 1205))
    exponent = np.polyfit(np.log(windows), np.log([m for m, _ in deep]), 1)[0]
    ratios = [t[0] / d[0] for d, t in zip(deep, trivial)]
    report(5, f"deep-phase exponent {exponent:.3f} (0.5+-0.15); "
              f"trivial/deep ratios {np.round(ratios, 2)} (<1/3 each)")
    assert abs(exponent - 0.5) < 0.15
    for (f_deep, _), (f_triv, _) in zip(deep, trivial):
        assert f_triv < f_deep / 3


# ---------------------------------------------------------------------------
# 6. Rediscovery campaign: ten seeded optimization runs.
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_06_dtc_rediscovery(tmp_path):
    cfg = resolve_config({
        "kind": "dtc-optimize", "seed": 106, "workers": 2,
        "out": str(tmp_path / "c6"),
        "runs": 10, "iterations": 500, "n": 6, "shared_j": True,
    })
    records = run_campaign(cfg)

    improved = sum(r.f_final > r.f_initial for r in records)
    ranked = sorted(records, key=lambda r: r.f_final, reverse=True)
    top = ranked[: len(records) // 2]
    lines = []
    for r in top:
        j_dist = circular_distance(float(r.params.j[0]), PI / 4, PI / 2)
        h_med = float(np.median(r.params.h % PI))
        lines.append(
            f"run {r.run}: f={r.f_final:.1f} |s.m|={r.s_dot_m:.2f} "
            f"dJ={j_dist:.2f} h_med={h_med:.2f}"
        )
    report(6, f"{improved}/10 improved; top half: " + "; ".join(lines))

    assert improved >= 8
    for r in top:
        assert r.s_dot_m < 0.2
        assert circular_distance(float(r.params.j[0]), PI / 4, PI / 2) < 0.15
        assert abs(np.median(r.params.h % PI) - PI / 2) < 0.3


# ---------------------------------------------------------------------------
# 7. Dual-unitary form factor follows the fully-random ramp.
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_07_dual_unitary_sff(tmp_path):
    cfg = resolve_config({
        "kind": "sff-landscape", "seed": 107, "workers": 2,
        "out": str(tmp_path / "c7"),
        "n": 8, "jx_values": [PI], "jy_values": [PI], "n_real": 20, "t_max": 20,
        "series_points": [[PI, PI], [PI / 2, PI / 2]], "series_n_real": 4000,
    })
    res = run_campaign(cfg)
    d = 256
    dual = res["series"][(PI, PI)]
    generic = res["series"][(PI / 2, PI / 2)]

    t = np.arange(1, 21)
    ramp = t / d**2
    within = np.abs(dual.mean_sq - ramp) <= 3 * dual.stderr_sq
    # the stated generic-point check at t=1 is unattainable (one Haar layer
    # forces mean|z_1|^2 = 1/D^2 exactly); the intended contrast is tested at
    # the earliest step where it can exist, t=3 -- see the decisions ledger
    generic_value = generic.mean_sq[2]
    report(7, f"dual within 3 sigma of t/D^2 for {within.sum()}/20 steps (>=18); "
              f"generic mean|z_3|^2 = {generic_value:.3e} > 10/D^2 = {10/d**2:.3e}")
    assert within.sum() >= 18
    assert generic_value > 10 / d**2


# ---------------------------------------------------------------------------
# 8. Landscape maximum on the dual lines; monotone diagonal cut.
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_08_sff_landscape_maximum(tmp_path):
    grid = [0.4 * PI + 0.12 * PI * k for k in range(11)]
    cfg = resolve_config({
        "kind": "sff-landscape", "seed": 108, "workers": 2,
        "out": str(tmp_path / "c8"),
        "n": 8, "jx_values": grid, "jy_values": grid,
        "n_real": 150, "t_max": 20, "series_points": [],
    })
    res = run_campaign(cfg)
    f = res["f"]
    se = res["stderr"]
    ix, iy = np.unravel_index(np.argmax(f), f.shape)
    on_lines = (ix == 5) or (iy == 5)

    diag = np.array([f[k, k] for k in range(11)])
    diag_se = np.array([se[k, k] for k in range(11)])
    violations = []
    for k in range(10):
        j_here, j_next = grid[k], grid[k + 1]
        both_outside = (
            abs(j_here - PI) > 0.2 * PI - 1e-9 and abs(j_next - PI) > 0.2 * PI - 1e-9
        )
        if not both_outside:
            continue
        comb = 2 * np.hypot(diag_se[k], diag_se[k + 1])
        if j_next < PI:  # approaching the dual point from below
            ok = diag[k + 1] >= diag[k] - comb
        else:            # moving away above the dual point
            ok = diag[k] >= diag[k + 1] - comb
        if not ok:
            violations.append(k)
    report(8, f"argmax at grid ({ix},{iy}), on dual lines: {on_lines}; "
              f"diagonal monotonicity violations: {violations}")
    assert on_lines
    assert not violations


# ---------------------------------------------------------------------------
# 9. Subsystem form factor: plateau, estimator, and ordering.
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_09_psff(tmp_path):
    cfg = resolve_config({
        "kind": "psff-demo", "seed": 109, "workers": 2,
        "out": str(tmp_path / "c9"),
        "n": 10, "subsystem_sizes": [2, 3], "n_real": 80, "t_max": 12,
        "sampled_t": 1, "sampled_subsystem_size": 3,
        "sampled_reps": 200, "sampled_shots": 1000,
    })
    res = run_campaign(cfg)
    dual_mean, dual_se = res["curves"][("dual", 3)]
    gen_mean, gen_se = res["curves"][("generic", 3)]

    plateau = 1.0 / 64.0
    floor = 1e-10
    plateau_ok = [
        abs(dual_mean[t] - plateau) <= 3 * dual_se[t] + floor for t in (0, 1)
    ]
    ordering_ok = [
        gen_mean[t] - dual_mean[t] > 2 * np.hypot(gen_se[t], dual_se[t])
        for t in (0, 1)
    ]
    rep = res["report"]
    z_sampled = abs(rep["sampled_mean"] - rep["exact"]) / rep["sampled_stderr"]
    report(9, f"dual pSFF t=1,2: {dual_mean[0]:.3e},{dual_mean[1]:.3e} "
              f"(plateau {plateau:.3e}, ok {plateau_ok}); "
              f"generic exceeds dual: {ordering_ok}; sampled z = {z_sampled:.2f} (<3)")
    assert all(plateau_ok)
    assert all(ordering_ok)
    assert z_sampled < 3.0


# ---------------------------------------------------------------------------
# 10. Hadamard-test sample complexity.
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_10_hadamard_sample_complexity():
    from floqopt.spectral import hadamard_test_sampled

    n = 8
    dual = _realization((PI, PI, PI / 10), n, child_rng(110, 0))
    generic = _realization((PI / 2, PI / 2, PI / 10), n, child_rng(110, 1))
    z_dual = trace_series(dual, 20).z
    z_gen = trace_series(generic, 20).z
    t_probe = int(np.argmax(np.abs(z_gen.real - z_dual.real))) + 1
    gap = abs(z_gen.real[t_probe - 1] - z_dual.real[t_probe - 1])

    separations = {}
    for m_shots in (100, 1_000_000):
        est_d = np.array([
            hadamard_test_sampled(dual, t_probe, m_shots, child_rng(210, r),
                                  z=z_dual[t_probe - 1]).real
            for r in range(25)
        ])
        est_g = np.array([
            hadamard_test_sampled(generic, t_probe, m_shots, child_rng(211, r),
                                  z=z_gen[t_probe - 1]).real
            for r in range(25)
        ])
        se = np.hypot(est_d.std(ddof=1), est_g.std(ddof=1)) / np.sqrt(25)
        separations[m_shots] = abs(est_g.mean() - est_d.mean()) / se
    report(10, f"t={t_probe}, true gap {gap:.4f}: separation "
               f"{separations[100]:.2f} sigma at M=100 (<3), "
               f"{separations[1_000_000]:.1f} sigma at M=1e6 (>3)")
    assert separations[100] < 3.0
    assert separations[1_000_000] > 3.0


# ---------------------------------------------------------------------------
# 11. Byte-identical outputs regardless of worker count.
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_11_determinism_under_workers(tmp_path):
    # reduced-size instances of the criterion 4/7/8 campaign kinds, executed
    # with one and with two workers; all CSV outputs must agree byte for byte
    cases = {
        "dtc-landscape": {
            "n": 4, "j_values": [PI / 4], "h_values": [PI / 2, 0.2],
            "n_init": 6, "window": 8, "n_snapshots": 64, "t1": 2,
        },
        "sff-landscape": {
            "n": 6, "jx_values": [PI, 2.0], "jy_values": [PI],
            "n_real": 8, "t_max": 6, "series_points": [[PI, PI]],
            "series_n_real": 10,
        },
        "psff-demo": {
            "n": 6, "subsystem_sizes": [2], "n_real": 6, "t_max": 4,
            "sampled_t": 1, "sampled_subsystem_size": 2,
            "sampled_reps": 8, "sampled_shots": 100,
        },
    }
    mismatches = []
    for kind, options in cases.items():
        outputs = {}
        for workers in (1, 2):
            out = tmp_path / f"{kind}-w{workers}"
            cfg = resolve_config({
                "kind": kind, "seed": 111, "workers": workers, "out": str(out),
                **options,
            })
            run_campaign(cfg)
            outputs[workers] = {
                p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))
            }
        if outputs[1] != outputs[2]:
            mismatches.append(kind)
        if not outputs[1]:
            mismatches.append(f"{kind}: no CSVs written")
    report(11, f"kinds checked: {sorted(cases)}; mismatches: {mismatches or 'none'}")
    assert not mismatches
