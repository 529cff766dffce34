"""Run-config files: JSON schema, defaults, validation, resolution.

A config file is a flat JSON object carrying the campaign kind, the master
seed and common run settings, plus kind-specific options.  Unknown keys are
rejected by name; missing keys are filled from the documented defaults and
the fully resolved config is echoed next to the outputs, so a resolved file
re-parses to itself.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

SCHEMA_TAG = "floqopt-run/1"

KINDS = ("dtc-optimize", "dtc-landscape", "sff-landscape", "sff-cut", "psff-demo")

_PI = math.pi

_COMMON_DEFAULTS = {
    "schema": SCHEMA_TAG,
    "seed": 1234,
    "workers": 1,
}

_DTC_ESTIMATION_DEFAULTS = {
    "t1": 10,
    "mode": "raw",
    "frame_angle": 0.7,
    "kernel_tau": 4.0,
    "gamma": 0.1,
}

KIND_DEFAULTS: dict[str, dict] = {
    # desk-scale estimation settings: the optimizer tolerates a noisier
    # objective than the landscape scans, so it uses fewer initial states
    # and fewer shadows per state; the balanced readout is what separates
    # interacting order from decoupled site oscillations at this size
    "dtc-optimize": {
        **_DTC_ESTIMATION_DEFAULTS,
        "n": 6,
        "runs": 10,
        "iterations": 500,
        "shared_j": True,
        "initial_step": math.pi / 2,
        "restart_every": 25,
        "n_init": 8,
        "window": 32,
        "n_snapshots": 192,
        "mode": "balanced",
    },
    "dtc-landscape": {
        **_DTC_ESTIMATION_DEFAULTS,
        "n": 6,
        "j_values": [round(0.15 + 0.12 * k, 10) for k in range(6)],
        "h_values": [round(0.1 + 0.3 * k, 10) for k in range(6)],
        "disorder": 0.4,
        "n_init": 30,
        "window": 32,
        "n_snapshots": 500,
        "pc1_points": [],
    },
    "sff-landscape": {
        "n": 8,
        "jz": _PI / 10,
        "jx_values": [0.4 * _PI + 0.12 * _PI * k for k in range(11)],
        "jy_values": [0.4 * _PI + 0.12 * _PI * k for k in range(11)],
        "n_real": 150,
        "t_max": 20,
        "series_points": [[_PI, _PI], [_PI / 2, _PI / 2]],
        "series_n_real": 4000,
    },
    "sff-cut": {
        "n_values": [6, 8],
        "jz": _PI / 10,
        "j_values": [0.4 * _PI + 0.06 * _PI * k for k in range(11)],
        "n_real": 300,
        "t_max": 20,
    },
    "psff-demo": {
        "n": 10,
        "jz": _PI / 10,
        "subsystem_sizes": [2, 3],
        "dual_jxy": [_PI, _PI],
        "generic_jxy": [_PI / 2, _PI / 2],
        "n_real": 80,
        "t_max": 12,
        "sampled_t": 1,
        "sampled_subsystem_size": 3,
        "sampled_reps": 200,
        "sampled_shots": 1000,
    },
}


def resolve_config(raw: dict) -> dict:
    """Validate a raw config dict and fill in all documented defaults."""
    if "kind" not in raw:
        raise ValueError("config is missing the required key 'kind'")
    kind = raw["kind"]
    if kind not in KINDS:
        raise ValueError(f"unknown campaign kind {kind!r}; valid: {', '.join(KINDS)}")
    if raw.get("schema", SCHEMA_TAG) != SCHEMA_TAG:
        raise ValueError(f"unsupported schema tag {raw['schema']!r}, expected {SCHEMA_TAG!r}")

    known = {"kind", "out", "options"} | set(_COMMON_DEFAULTS) | set(KIND_DEFAULTS[kind])
    unknown = sorted((set(raw) | set(raw.get("options", {}))) - known)
    if unknown:
        raise ValueError(f"unknown config keys for kind {kind!r}: {', '.join(unknown)}")

    options = dict(KIND_DEFAULTS[kind])
    flat_opts = {k: v for k, v in raw.items() if k in KIND_DEFAULTS[kind]}
    options.update(raw.get("options", {}))
    options.update(flat_opts)

    resolved = {
        "schema": SCHEMA_TAG,
        "kind": kind,
        "seed": int(raw.get("seed", _COMMON_DEFAULTS["seed"])),
        "workers": int(raw.get("workers", _COMMON_DEFAULTS["workers"])),
        "out": str(raw.get("out", f"runs/{kind}")),
        "options": options,
    }
    return resolved


def parse_config(path: str | Path) -> dict:
    """Load, validate and resolve a JSON config file."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config file not found: {p}")
    with open(p) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file {p} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"config file {p} must hold a JSON object")
    return resolve_config(raw)
