import json
import subprocess
import sys

import numpy as np
import pytest

from floqopt.cli import main
from floqopt.config import KINDS, parse_config, resolve_config


class TestResolveConfig:
    def test_minimal_config_gets_documented_defaults(self):
        cfg = resolve_config({"kind": "dtc-landscape", "seed": 3})
        assert cfg["seed"] == 3
        assert cfg["workers"] == 1
        assert cfg["options"]["n_snapshots"] == 500
        assert cfg["options"]["n_init"] == 30
        assert cfg["options"]["t1"] == 10
        assert cfg["options"]["disorder"] == 0.4
        assert cfg["options"]["kernel_tau"] == 4.0
        assert cfg["options"]["gamma"] == 0.1

    def test_sff_defaults(self):
        cfg = resolve_config({"kind": "sff-landscape"})
        assert cfg["options"]["t_max"] == 20
        assert cfg["options"]["jz"] == pytest.approx(np.pi / 10)
        assert len(cfg["options"]["jx_values"]) == 11
        assert cfg["options"]["series_n_real"] == 4000

    def test_unknown_key_named_in_error(self):
        with pytest.raises(ValueError, match="wibble"):
            resolve_config({"kind": "psff-demo", "wibble": 3})

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown campaign kind"):
            resolve_config({"kind": "quantum-volume"})

    def test_missing_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            resolve_config({"seed": 1})

    def test_round_trip_fixed_point(self):
        first = resolve_config({"kind": "sff-cut", "seed": 9, "n_real": 5})
        second = resolve_config(first)
        assert first == second

    def test_flat_option_keys_accepted(self):
        cfg = resolve_config({"kind": "dtc-optimize", "runs": 3, "iterations": 7})
        assert cfg["options"]["runs"] == 3
        assert cfg["options"]["iterations"] == 7


class TestParseConfig:
    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"kind": "psff-demo", "seed": 4, "n_real": 6}))
        cfg = parse_config(path)
        assert cfg["options"]["n_real"] == 6
        resolved_path = tmp_path / "resolved.json"
        resolved_path.write_text(json.dumps(cfg))
        assert parse_config(resolved_path) == cfg

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            parse_config(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        with pytest.raises(ValueError, match="not valid JSON"):
            parse_config(path)


class TestCli:
    def test_bad_flags_exit_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["dtc-optimize", "--bogus"])
        assert exc.value.code == 2

    def test_no_command_exit_two(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_kind_mismatch_fails(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"kind": "sff-cut"}))
        code = main(["psff-demo", "--config", str(path)])
        assert code == 1
        assert "does not match" in capsys.readouterr().err

    def test_config_error_reported(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"kind": "sff-cut", "mystery": 1}))
        code = main(["sff-cut", "--config", str(path)])
        assert code == 1
        assert "mystery" in capsys.readouterr().err

    def test_tiny_sff_cut_campaign(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({
            "kind": "sff-cut", "seed": 5,
            "n_values": [4], "j_values": [1.0, np.pi], "n_real": 4, "t_max": 3,
        }))
        out = tmp_path / "out"
        code = main(["sff-cut", "--config", str(path), "--out", str(out)])
        assert code == 0
        landscape = (out / "landscape.csv").read_text().splitlines()
        assert landscape[0] == "n,Jx,f,stderr"
        assert len(landscape) == 3

    def test_seed_override_recorded_in_fingerprint(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({
            "kind": "sff-cut", "seed": 5,
            "n_values": [4], "j_values": [1.0], "n_real": 4, "t_max": 2,
        }))
        out = tmp_path / "out"
        code = main([
            "sff-cut", "--config", str(path), "--seed", "77", "--out", str(out)
        ])
        assert code == 0
        resolved = json.loads((out / "resolved-config.json").read_text())
        assert resolved["seed"] == 77

    def test_console_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "floqopt.cli", "--help"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        for kind in KINDS:
            assert kind in proc.stdout
        assert "selftest" in proc.stdout
