"""Command-line entry point.

Subcommands run one campaign each (dtc-optimize, dtc-landscape,
sff-landscape, sff-cut, psff-demo) plus `selftest`, which exercises the
oracle-equivalence suite on small systems in under a minute.  Config files
are optional; flags override file values.  Exit codes: 0 success, 1 runtime
failure, 2 usage errors.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import campaigns
from .config import KINDS, parse_config, resolve_config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floqopt",
        description="Search parametrized Floquet circuits for interesting dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} campaign")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="master seed (overrides config)")
        p.add_argument("--workers", type=int, help="worker process count")
        p.add_argument("--out", help="output directory")
    sub.add_parser("selftest", help="run the fast oracle-equivalence suite")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "selftest":
        return run_selftest()
    try:
        if args.config:
            cfg = parse_config(args.config)
            if cfg["kind"] != args.command:
                print(
                    f"error: config kind {cfg['kind']!r} does not match "
                    f"subcommand {args.command!r}",
                    file=sys.stderr,
                )
                return 1
        else:
            cfg = resolve_config({"kind": args.command})
        for key in ("seed", "workers", "out"):
            value = getattr(args, key)
            if value is not None:
                cfg[key] = value
        campaigns.run_campaign(cfg)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"campaign {cfg['kind']} finished; outputs in {cfg['out']}")
    return 0


# ---------------------------------------------------------------------------
# Self-test: fast cross-checks of independent computation routes.
# ---------------------------------------------------------------------------

def _dense_1q(matrix: np.ndarray, site: int, n: int) -> np.ndarray:
    return np.kron(np.eye(2 ** (n - 1 - site)), np.kron(matrix, np.eye(2**site)))


def _dense_2q(matrix: np.ndarray, sites: tuple[int, int], n: int) -> np.ndarray:
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


def _dense_matrix(circ) -> np.ndarray:
    from .statevector import Gate1Q

    full = np.eye(2**circ.n, dtype=complex)
    for g in circ.gates:
        if isinstance(g, Gate1Q):
            full = _dense_1q(g.matrix, g.site, circ.n) @ full
        else:
            full = _dense_2q(g.matrix, g.sites, circ.n) @ full
    return full


def run_selftest() -> int:
    """Cross-check the main computation routes on n <= 6; prints one line per
    check and exits nonzero on any failure."""
    from .circuits import (
        BrickworkParams,
        DtcParams,
        brickwork_unitary,
        brickwork_unitary_fused,
        dtc_unitary,
        haar_1q_stack,
    )
    from .clustering import hac_ward
    from .interest import DtcInterestConfig, classifiability_of_trajectory
    from .kernel_pca import KernelHyper, gram_matrix, kernel_entry, site_kernel
    from .seeding import child_rng
    from .shadows import ShadowSet, bloch_estimates, lab_frame, shadow_set
    from .spectral import eigenphases, psff_exact, Subsystem, trace_series
    from .statevector import basis_state, random_state
    from .circuits import apply_circuit

    t0 = time.time()
    failures = 0

    def check(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures += 1

    rng = np.random.default_rng(20240817)

    # circuit application vs independent dense product
    ok = True
    for n in (4, 5, 6):
        gates = haar_1q_stack(2 * n, child_rng(7, n))
        params = BrickworkParams(
            n=(n if n % 2 == 0 else n + 1),
            j_xyz=(1.1, 0.7, 0.3),
            layer_a=tuple(haar_1q_stack(n if n % 2 == 0 else n + 1, child_rng(8, n))),
            layer_b=tuple(haar_1q_stack(n if n % 2 == 0 else n + 1, child_rng(9, n))),
        )
        circ = brickwork_unitary(params)
        psi = random_state(circ.n, rng)
        direct = apply_circuit(circ, psi).amps
        dense = _dense_matrix(circ) @ psi.amps
        ok &= bool(np.abs(direct - dense).max() < 1e-10)
    check("gate application matches dense kron products", ok)

    # fused and layered brickwork agree
    params = BrickworkParams(
        n=4,
        j_xyz=(0.9, 0.4, 0.2),
        layer_a=tuple(haar_1q_stack(4, child_rng(10, 0))),
        layer_b=tuple(haar_1q_stack(4, child_rng(10, 1))),
    )
    ok = bool(
        np.abs(
            _dense_matrix(brickwork_unitary(params))
            - _dense_matrix(brickwork_unitary_fused(params))
        ).max()
        < 1e-12
    )
    check("fused brickwork equals layered brickwork", ok)

    # trace series vs eigenphase sums
    ok = True
    for n in (4, 6):
        p = DtcParams(
            j=child_rng(11, n).uniform(0, np.pi / 2, n),
            h=child_rng(12, n).uniform(0, np.pi / 2, n),
            s_hat=np.array([0.0, 0.0, 1.0]),
            m_hat=np.array([1.0, 0.0, 0.0]),
        )
        circ = dtc_unitary(p)
        z = trace_series(circ, 8).z
        phases = eigenphases(circ)
        ref = np.array(
            [np.exp(1j * t * phases).mean() for t in range(1, 9)]
        )
        ok &= bool(np.abs(z - ref).max() < 1e-9)
    check("trace series matches eigenphase reconstruction", ok)

    # shadow channel unbiasedness on |0>
    shadows = shadow_set(basis_state(1, 0), 20000, lab_frame(), child_rng(13))
    bloch = bloch_estimates(shadows)[0]
    check(
        "shadow estimator reproduces the Bloch vector of |0>",
        bool(np.abs(bloch - np.array([0.0, 0.0, 1.0])).max() < 0.05),
    )

    # kernel fast path vs naive double loop
    sets = [
        shadow_set(random_state(2, rng), 6, lab_frame(), child_rng(14, k))
        for k in range(3)
    ]
    hp = KernelHyper()
    ok = True
    for a in sets:
        for b in sets:
            naive = 0.0
            for c in range(a.n_snapshots):
                for cb in range(b.n_snapshots):
                    s = sum(
                        site_kernel(
                            (a.axes[c, i], a.signs[c, i]), (b.axes[cb, i], b.signs[cb, i])
                        )
                        for i in range(a.n)
                    )
                    naive += np.exp(hp.gamma / a.n * s)
            naive = np.exp(hp.kernel_tau * naive / (a.n_snapshots * b.n_snapshots))
            ok &= bool(abs(kernel_entry(a, b, hp) - naive) < 1e-12 * naive)
    check("kernel entries match the naive double sum", ok)

    # ward clustering vs centroid reference
    pts = child_rng(15).normal(size=(12, 2))
    tree = hac_ward(pts)
    ref = _reference_ward(pts)
    ok = all(
        m.left == r[0] and m.right == r[1] and abs(m.distance - r[2]) < 1e-9
        for m, r in zip(tree.merges, ref)
    )
    check("ward clustering matches centroid reference", ok)

    # psff sanity: full subsystem equals |z_t|^2, empty subsystem equals 1
    p = DtcParams(
        j=child_rng(16).uniform(0, np.pi / 2, 4),
        h=child_rng(17).uniform(0, np.pi / 2, 4),
        s_hat=np.array([0.0, 0.0, 1.0]),
        m_hat=np.array([1.0, 0.0, 0.0]),
    )
    circ = dtc_unitary(p)
    ts = trace_series(circ, 5)
    full = psff_exact(circ, 5, Subsystem(tuple(range(4)), 4))
    empty = psff_exact(circ, 5, Subsystem((), 4))
    check(
        "psff limits: full subsystem -> |z_t|^2, empty -> 1",
        bool(np.abs(full - ts.sff).max() < 1e-10 and np.abs(empty - 1).max() < 1e-10),
    )

    # classifiability pipeline runs end to end
    cfgi = DtcInterestConfig(n_init=1, t1=1, window=8, n_snapshots=64)
    f = classifiability_of_trajectory(p, cfgi, 3, 99)
    check("classifiability pipeline produces a finite value", bool(np.isfinite(f)))

    print(f"selftest finished in {time.time() - t0:.1f} s, {failures} failure(s)")
    return 1 if failures else 0


def _reference_ward(points: np.ndarray):
    """Independent Ward clustering from cluster centroids and sizes."""
    clusters = {i: (points[i].astype(float), 1, i) for i in range(len(points))}
    next_id = len(points)
    merges = []
    while len(clusters) > 1:
        best = None
        keys = sorted(clusters, key=lambda k: clusters[k][2])
        for i_pos, ka in enumerate(keys):
            for kb in keys[i_pos + 1 :]:
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
        merges.append((ids[0], ids[1], d, na + nb))
        clusters[ka] = ((na * ca + nb * cb) / (na + nb), na + nb, next_id)
        del clusters[kb]
        next_id += 1
    return merges


if __name__ == "__main__":
    sys.exit(main())
