"""Campaign orchestration: optimization runs, landscape scans, demos.

Every stochastic task is seeded by a fixed integer path under the campaign
seed (namespace, grid indices, task index), never by worker identity, and
partial results are reduced in fixed index order, so output files are
byte-identical for any worker count.  Floats are written with shortest
round-trip formatting for the same reason.

Output files per campaign directory: resolved-config.json plus, depending on
the kind, trajectories.csv, histograms.csv, landscape.csv, series.csv,
pc1.csv, sampled.csv, report.json; headers are written on the first row.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circuits import DtcParams
from .interest import (
    DtcInterestConfig,
    PotentialSpec,
    classifiability_of_trajectory,
    dtc_interest,
    spectral_interest,
    trajectory_pc1,
)
from .kernel_pca import KernelHyper
from .nelder_mead import NmConfig, maximize
from .seeding import child_rng, seed_from
from .shadows import frame_from_rotation
from .spectral import (
    Subsystem,
    ensemble_stats,
    psff_exact_multi,
    psff_samples,
    psff_sampled,
    trace_samples,
    _realization,
)

# seed namespaces, fixed forever for reproducibility
_NS_OPTIMIZE = 0
_NS_DTC_LANDSCAPE = 1
_NS_SFF_GRID = 2
_NS_SFF_SERIES = 3
_NS_PSFF = 4
_NS_CUT = 5

_SFF_BLOCK = 250      # realizations per parallel job
_PSFF_BLOCK = 10
_LANDSCAPE_BLOCK = 6  # initial states per parallel job

Y_AXIS = np.array([0.0, 1.0, 0.0])


# ---------------------------------------------------------------------------
# Small shared helpers.
# ---------------------------------------------------------------------------

def circular_distance(x: float, target: float, period: float) -> float:
    """Distance from x to target on a circle of the given period."""
    d = (x - target) % period
    return min(d, period - d)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _run_jobs(fn, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _blocks(total: int, width: int) -> list[range]:
    return [range(lo, min(lo + width, total)) for lo in range(0, total, width)]


def _interest_config(opts: dict) -> DtcInterestConfig:
    return DtcInterestConfig(
        n_init=opts["n_init"],
        t1=opts["t1"],
        window=opts["window"],
        n_snapshots=opts["n_snapshots"],
        frame=frame_from_rotation(opts["frame_angle"], Y_AXIS),
        hyper=KernelHyper(opts["kernel_tau"], opts["gamma"]),
        mode=opts["mode"],
    )


def sphere_point(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )


def vector_to_dtc_params(x: np.ndarray, n: int, shared_j: bool) -> DtcParams:
    """Decode an optimizer vector: [couplings] + [fields] + 4 axis angles."""
    x = np.asarray(x, dtype=float)
    if shared_j:
        j = np.full(n, x[0])
        h = x[1 : n + 1]
        ang = x[n + 1 :]
    else:
        j = x[:n]
        h = x[n : 2 * n]
        ang = x[2 * n :]
    s_hat = sphere_point(ang[0], ang[1])
    m_hat = sphere_point(ang[2], ang[3])
    return DtcParams(j, h, s_hat, m_hat, shared_j=shared_j)


def dtc_parameter_periods(n: int, shared_j: bool) -> np.ndarray:
    """Natural wrap periods of the optimizer vector (angles of the axes keep
    the polar angle unbounded; the direction map is already periodic)."""
    n_j = 1 if shared_j else n
    periods = [np.pi] * n_j + [np.pi] * n + [np.inf, 2 * np.pi, np.inf, 2 * np.pi]
    return np.array(periods)


def draw_dtc_start(n: int, shared_j: bool, rng: np.random.Generator) -> np.ndarray:
    """Random initialization: couplings and fields uniform in [0, pi/2],
    both axes uniform on the sphere."""
    n_j = 1 if shared_j else n
    j = rng.uniform(0.0, np.pi / 2, size=n_j)
    h = rng.uniform(0.0, np.pi / 2, size=n)
    angles = np.empty(4)
    for k in (0, 2):
        angles[k] = np.arccos(1.0 - 2.0 * rng.uniform())
        angles[k + 1] = rng.uniform(0.0, 2 * np.pi)
    return np.concatenate([j, h, angles])


# ---------------------------------------------------------------------------
# dtc-optimize
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunRecord:
    run: int
    f_initial: float
    f_final: float
    params: DtcParams
    s_dot_m: float
    s_dot_z: float
    iterations: np.ndarray
    estimates: np.ndarray
    param_rows: np.ndarray


def _job_optimize(args) -> dict:
    seed, run, opts = args
    n = opts["n"]
    shared = opts["shared_j"]
    cfg_i = _interest_config(opts)
    nm = NmConfig(
        initial_step=opts["initial_step"],
        restart_every=opts["restart_every"],
        max_iters=opts["iterations"],
    )
    x0 = draw_dtc_start(n, shared, child_rng(seed, _NS_OPTIMIZE, run, 0))

    def objective(x, rng):
        return dtc_interest(vector_to_dtc_params(x, n, shared), cfg_i, rng).value

    traj = maximize(
        objective,
        x0,
        nm,
        child_rng(seed, _NS_OPTIMIZE, run, 1),
        periods=dtc_parameter_periods(n, shared),
    )
    best = traj.best_x
    params = vector_to_dtc_params(best, n, shared)
    return {
        "run": run,
        "f_initial": traj.estimates[0],
        "f_final": traj.best_f,
        "best_x": best,
        "s_dot_m": float(abs(params.s_hat @ params.m_hat)),
        "s_dot_z": float(abs(params.s_hat[2])),
        "iterations": np.array(traj.iterations),
        "estimates": np.array(traj.estimates),
        "param_rows": np.array(traj.params),
    }


def run_dtc_optimize(cfg: dict) -> list[RunRecord]:
    opts = cfg["options"]
    seed = cfg["seed"]
    jobs = [(seed, r, opts) for r in range(opts["runs"])]
    raw = _run_jobs(_job_optimize, jobs, cfg["workers"])

    records = []
    traj_rows = []
    hist_rows = []
    n = opts["n"]
    for res in raw:
        params = vector_to_dtc_params(res["best_x"], n, opts["shared_j"])
        rec = RunRecord(
            run=res["run"],
            f_initial=res["f_initial"],
            f_final=res["f_final"],
            params=params,
            s_dot_m=res["s_dot_m"],
            s_dot_z=res["s_dot_z"],
            iterations=res["iterations"],
            estimates=res["estimates"],
            param_rows=res["param_rows"],
        )
        records.append(rec)
        for it, est, row in zip(rec.iterations, rec.estimates, rec.param_rows):
            traj_rows.append((rec.run, int(it), float(est)) + tuple(float(v) for v in row))
        hist_rows.append((rec.run, "f_initial", 0, rec.f_initial))
        hist_rows.append((rec.run, "f_final", 0, rec.f_final))
        hist_rows.append((rec.run, "s_dot_m", 0, rec.s_dot_m))
        hist_rows.append((rec.run, "s_dot_z", 0, rec.s_dot_z))
        j_vals = [params.j[0]] if opts["shared_j"] else list(params.j)
        for i, v in enumerate(j_vals):
            hist_rows.append((rec.run, "J", i, float(v % np.pi)))
        for i, v in enumerate(params.h):
            hist_rows.append((rec.run, "h", i, float(v % np.pi)))

    out = Path(cfg["out"])
    dim = raw[0]["param_rows"].shape[1]
    _write_csv(
        out / "trajectories.csv",
        ["run", "iteration", "f"] + [f"p{k}" for k in range(dim)],
        traj_rows,
    )
    _write_csv(out / "histograms.csv", ["run", "quantity", "index", "value"], hist_rows)
    return records


# ---------------------------------------------------------------------------
# dtc-landscape
# ---------------------------------------------------------------------------

def _landscape_value(seed, ix, iy, k, j_mean, h_mean, opts) -> float:
    rng = child_rng(seed, _NS_DTC_LANDSCAPE, ix, iy, k, 0)
    n = opts["n"]
    w = opts["disorder"]
    j = rng.uniform(j_mean - w / 2, j_mean + w / 2, size=n)
    h = rng.uniform(h_mean - w / 2, h_mean + w / 2, size=n)
    params = DtcParams(j, h, np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
    basis_index = int(rng.integers(0, 2**n))
    shadow_root = seed_from(child_rng(seed, _NS_DTC_LANDSCAPE, ix, iy, k, 1))
    cfg_i = _interest_config(opts)
    return classifiability_of_trajectory(params, cfg_i, basis_index, shadow_root)


def _job_dtc_point_chunk(args):
    seed, ix, iy, j_mean, h_mean, ks, opts = args
    vals = [_landscape_value(seed, ix, iy, k, j_mean, h_mean, opts) for k in ks]
    return ix, iy, ks[0], vals


def run_dtc_landscape(cfg: dict) -> dict:
    opts = cfg["options"]
    seed = cfg["seed"]
    j_values = list(opts["j_values"])
    h_values = list(opts["h_values"])
    n_init = opts["n_init"]

    jobs = []
    for ix, j_mean in enumerate(j_values):
        for iy, h_mean in enumerate(h_values):
            for ks in _blocks(n_init, _LANDSCAPE_BLOCK):
                jobs.append((seed, ix, iy, j_mean, h_mean, list(ks), opts))
    raw = _run_jobs(_job_dtc_point_chunk, jobs, cfg["workers"])

    per_point: dict[tuple[int, int], list] = {}
    for ix, iy, k0, vals in raw:
        per_point.setdefault((ix, iy), []).append((k0, vals))

    f_grid = np.zeros((len(j_values), len(h_values)))
    se_grid = np.zeros_like(f_grid)
    rows = []
    for ix, j_mean in enumerate(j_values):
        for iy, h_mean in enumerate(h_values):
            chunks = sorted(per_point[(ix, iy)])
            vals = np.array([v for _, chunk in chunks for v in chunk])
            f = vals.mean()
            se = vals.std(ddof=1) / np.sqrt(len(vals)) if len(vals) > 1 else 0.0
            f_grid[ix, iy] = f
            se_grid[ix, iy] = se
            rows.append((j_mean, h_mean, float(f), float(se)))

    out = Path(cfg["out"])
    _write_csv(out / "landscape.csv", ["j_mean", "h_mean", "f", "stderr"], rows)

    pc1_rows = []
    for j_mean, h_mean in opts["pc1_points"]:
        ix = int(np.argmin(np.abs(np.array(j_values) - j_mean)))
        iy = int(np.argmin(np.abs(np.array(h_values) - h_mean)))
        rng = child_rng(seed, _NS_DTC_LANDSCAPE, ix, iy, 0, 0)
        n = opts["n"]
        w = opts["disorder"]
        j = rng.uniform(j_values[ix] - w / 2, j_values[ix] + w / 2, size=n)
        h = rng.uniform(h_values[iy] - w / 2, h_values[iy] + w / 2, size=n)
        params = DtcParams(j, h, np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
        basis_index = int(rng.integers(0, 2**n))
        shadow_root = seed_from(child_rng(seed, _NS_DTC_LANDSCAPE, ix, iy, 0, 1))
        coords = trajectory_pc1(params, _interest_config(opts), basis_index, shadow_root)
        for ti, coord in enumerate(coords):
            pc1_rows.append(
                (j_values[ix], h_values[iy], opts["t1"] + ti, float(coord))
            )
    if pc1_rows:
        _write_csv(out / "pc1.csv", ["j_mean", "h_mean", "t", "coord"], pc1_rows)

    return {"j_values": j_values, "h_values": h_values, "f": f_grid, "stderr": se_grid}


# ---------------------------------------------------------------------------
# sff-landscape / sff-cut
# ---------------------------------------------------------------------------

def _job_sff_point(args):
    seed, ix, iy, jx, jy, opts = args
    root = seed_from(child_rng(seed, _NS_SFF_GRID, ix, iy))
    samples = trace_samples(
        (jx, jy, opts["jz"]), opts["n"], range(opts["n_real"]), opts["t_max"], root
    )
    ens = ensemble_stats(samples, opts["n"])
    est = spectral_interest(ens, PotentialSpec.sff(opts["t_max"]))
    return ix, iy, est.value, est.stderr


def _job_sff_series_block(args):
    seed, point_index, jx, jy, block, opts = args
    root = seed_from(child_rng(seed, _NS_SFF_SERIES, point_index))
    return point_index, block.start, trace_samples(
        (jx, jy, opts["jz"]), opts["n"], list(block), opts["t_max"], root
    )


def run_sff_landscape(cfg: dict) -> dict:
    opts = cfg["options"]
    seed = cfg["seed"]
    jx_values = list(opts["jx_values"])
    jy_values = list(opts["jy_values"])

    jobs = [
        (seed, ix, iy, jx, jy, opts)
        for ix, jx in enumerate(jx_values)
        for iy, jy in enumerate(jy_values)
    ]
    raw = _run_jobs(_job_sff_point, jobs, cfg["workers"])
    f_grid = np.zeros((len(jx_values), len(jy_values)))
    se_grid = np.zeros_like(f_grid)
    for ix, iy, f, se in raw:
        f_grid[ix, iy] = f
        se_grid[ix, iy] = se
    rows = [
        (jx, jy, float(f_grid[ix, iy]), float(se_grid[ix, iy]))
        for ix, jx in enumerate(jx_values)
        for iy, jy in enumerate(jy_values)
    ]
    out = Path(cfg["out"])
    _write_csv(out / "landscape.csv", ["Jx", "Jy", "f", "stderr"], rows)

    series = {}
    series_rows = []
    points = [tuple(p) for p in opts["series_points"]]
    if points:
        jobs = []
        for k, (jx, jy) in enumerate(points):
            for block in _blocks(opts["series_n_real"], _SFF_BLOCK):
                jobs.append((seed, k, jx, jy, block, opts))
        raw = _run_jobs(_job_sff_series_block, jobs, cfg["workers"])
        for k, (jx, jy) in enumerate(points):
            chunks = sorted(
                ((start, z) for kk, start, z in raw if kk == k), key=lambda p: p[0]
            )
            samples = np.vstack([z for _, z in chunks])
            ens = ensemble_stats(samples, opts["n"])
            series[(jx, jy)] = ens
            for t in range(ens.t_max):
                series_rows.append(
                    (k, jx, jy, t + 1, float(ens.mean_sq[t]), float(ens.stderr_sq[t]))
                )
        _write_csv(
            out / "series.csv",
            ["point", "Jx", "Jy", "t", "mean_sq", "stderr_sq"],
            series_rows,
        )
    return {
        "jx_values": jx_values,
        "jy_values": jy_values,
        "f": f_grid,
        "stderr": se_grid,
        "series": series,
    }


def _job_cut_point(args):
    seed, i_n, ij, n, jd, opts = args
    root = seed_from(child_rng(seed, _NS_CUT, i_n, ij))
    samples = trace_samples(
        (jd, jd, opts["jz"]), n, range(opts["n_real"]), opts["t_max"], root
    )
    ens = ensemble_stats(samples, n)
    est = spectral_interest(ens, PotentialSpec.sff(opts["t_max"]))
    return i_n, ij, est.value, est.stderr


def run_sff_cut(cfg: dict) -> dict:
    opts = cfg["options"]
    seed = cfg["seed"]
    n_values = list(opts["n_values"])
    j_values = list(opts["j_values"])
    jobs = [
        (seed, i_n, ij, n, jd, opts)
        for i_n, n in enumerate(n_values)
        for ij, jd in enumerate(j_values)
    ]
    raw = _run_jobs(_job_cut_point, jobs, cfg["workers"])
    f = np.zeros((len(n_values), len(j_values)))
    se = np.zeros_like(f)
    for i_n, ij, val, err in raw:
        f[i_n, ij] = val
        se[i_n, ij] = err
    rows = [
        (n, jd, float(f[i_n, ij]), float(se[i_n, ij]))
        for i_n, n in enumerate(n_values)
        for ij, jd in enumerate(j_values)
    ]
    _write_csv(Path(cfg["out"]) / "landscape.csv", ["n", "Jx", "f", "stderr"], rows)
    return {"n_values": n_values, "j_values": j_values, "f": f, "stderr": se}


# ---------------------------------------------------------------------------
# psff-demo
# ---------------------------------------------------------------------------

def _job_psff_block(args):
    seed, e_index, jxy, block, subs_sizes, opts = args
    n = opts["n"]
    subs = [Subsystem(tuple(range(size)), n) for size in subs_sizes]
    root = seed_from(child_rng(seed, _NS_PSFF, e_index))
    return e_index, block.start, psff_samples(
        (jxy[0], jxy[1], opts["jz"]), n, subs, list(block), opts["t_max"], root
    )


def _job_psff_sampled_block(args):
    seed, reps, circuit_args, t, size, n, shots = args
    circ = _realization(circuit_args["j_xyz"], n, child_rng(circuit_args["root"], 0))
    sub = Subsystem(tuple(range(size)), n)
    out = []
    for rep in reps:
        rng = child_rng(seed, _NS_PSFF, 1000, rep)
        out.append((rep, psff_sampled(circ, t, sub, shots, rng)))
    return out


def run_psff_demo(cfg: dict) -> dict:
    opts = cfg["options"]
    seed = cfg["seed"]
    n = opts["n"]
    sizes = list(opts["subsystem_sizes"])
    ensembles = [("dual", tuple(opts["dual_jxy"])), ("generic", tuple(opts["generic_jxy"]))]

    jobs = []
    for e_index, (_, jxy) in enumerate(ensembles):
        for block in _blocks(opts["n_real"], _PSFF_BLOCK):
            jobs.append((seed, e_index, jxy, block, sizes, opts))
    raw = _run_jobs(_job_psff_block, jobs, cfg["workers"])

    series_rows = []
    curves = {}
    for e_index, (label, jxy) in enumerate(ensembles):
        chunks = sorted(
            ((start, arr) for idx, start, arr in raw if idx == e_index),
            key=lambda p: p[0],
        )
        samples = np.concatenate([arr for _, arr in chunks], axis=0)
        for si, size in enumerate(sizes):
            mean = samples[:, si, :].mean(axis=0)
            se = samples[:, si, :].std(axis=0, ddof=1) / np.sqrt(samples.shape[0])
            curves[(label, size)] = (mean, se)
            for t in range(opts["t_max"]):
                series_rows.append(
                    (label, size, t + 1, float(mean[t]), float(se[t]))
                )
    out = Path(cfg["out"])
    _write_csv(out / "series.csv", ["ensemble", "size_a", "t", "mean", "stderr"], series_rows)

    # sampled-estimator validation on realization 0 of the dual ensemble
    t_probe = opts["sampled_t"]
    size = opts["sampled_subsystem_size"]
    dual_root = seed_from(child_rng(seed, _NS_PSFF, 0))
    circ = _realization(tuple(opts["dual_jxy"]) + (opts["jz"],), n, child_rng(dual_root, 0))
    sub = Subsystem(tuple(range(size)), n)
    exact = float(psff_exact_multi(circ, t_probe, [sub])[0, t_probe - 1])

    circuit_args = {"j_xyz": tuple(opts["dual_jxy"]) + (opts["jz"],), "root": dual_root}
    jobs = [
        (seed, list(reps), circuit_args, t_probe, size, n, opts["sampled_shots"])
        for reps in _blocks(opts["sampled_reps"], 20)
    ]
    raw = _run_jobs(_job_psff_sampled_block, jobs, cfg["workers"])
    sampled = sorted(pair for chunk in raw for pair in chunk)
    estimates = np.array([v for _, v in sampled])
    _write_csv(out / "sampled.csv", ["rep", "estimate"], sampled)

    report = {
        "exact": exact,
        "sampled_mean": float(estimates.mean()),
        "sampled_stderr": float(estimates.std(ddof=1) / np.sqrt(len(estimates))),
        "n_real": opts["n_real"],
        "plateau_reference": 1.0 / (2 ** opts["sampled_subsystem_size"]) ** 2,
    }
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    return {"curves": curves, "report": report, "sizes": sizes}


# ---------------------------------------------------------------------------
# Entry point used by the CLI.
# ---------------------------------------------------------------------------

_RUNNERS = {
    "dtc-optimize": run_dtc_optimize,
    "dtc-landscape": run_dtc_landscape,
    "sff-landscape": run_sff_landscape,
    "sff-cut": run_sff_cut,
    "psff-demo": run_psff_demo,
}


def run_campaign(cfg: dict):
    """Dispatch a resolved config; writes resolved-config.json first."""
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "resolved-config.json", "w") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
    return _RUNNERS[cfg["kind"]](cfg)
