import json
import os
from pathlib import Path

import numpy as np
import pytest

from pairdfs.cli import main
from pairdfs.config import ConfigError, config_from_dict, load_config
from pairdfs.dynamics import EvolutionTrace
from pairdfs.scenarios import run_scenario, write_trace_csv

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

MINIMAL_DFS = {
    "scenario": "dfs_immunity",
    "system": {"pairs": [[0, 1]], "axes": [{"direction": [0, 0, 1], "strength": 1.0}]},
    "bath": {"modes": [{"omega": 1.0, "n_max": 4}], "couplings": [[0.3], [0.3]]},
    "params": {"epsilon": 0.0, "logical_state": "plus"},
    "times": [0.0, 0.5, 1.0],
}


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


class TestLoadConfig:
    def test_defaults_and_round_trip(self, tmp_path):
        cfg = load_config(write_config(tmp_path, MINIMAL_DFS))
        assert cfg.tolerances == {"kernel_tol": 1e-9, "hermitian_tol": 1e-12}
        again = config_from_dict(json.loads(cfg.dumps()))
        assert again.dumps() == cfg.dumps()

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError, match="unknown scenario"):
            config_from_dict({**MINIMAL_DFS, "scenario": "warp_drive"})

    def test_times_not_increasing(self):
        with pytest.raises(ConfigError, match="times not increasing"):
            config_from_dict({**MINIMAL_DFS, "times": [1.0, 0.5]})

    def test_missing_field_named(self):
        data = json.loads(json.dumps(MINIMAL_DFS))
        del data["params"]["epsilon"]
        with pytest.raises(ConfigError, match="params.epsilon"):
            config_from_dict(data)

    def test_grid_times(self):
        cfg = config_from_dict({**MINIMAL_DFS, "times": {"start": 0, "stop": 10, "num": 101}})
        assert len(cfg.times) == 101 and cfg.times[-1] == 10.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_config(str(tmp_path / "nope.json"))

    @pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
    def test_committed_examples_load(self, path):
        assert load_config(str(path)).scenario == path.stem


class TestTraceCSV:
    def trace(self):
        return EvolutionTrace(np.array([0.0, 0.5, 1.0]), np.array([1.0, 0.9, 1 / 3]),
                              np.zeros(3), np.ones(3), np.array([0.0, 0.1, 0.2]))

    def test_layout(self, tmp_path):
        path = tmp_path / "t.csv"
        write_trace_csv(self.trace(), path)
        text = path.read_text()
        lines = text.splitlines()
        assert len(lines) == 4
        assert lines[0] == "time,fidelity,coherence,purity,leakage"
        assert text.endswith("\n")
        assert lines[3].split(",")[1] == "0.33333333333333331"

    def test_scenario_t0_row(self, tmp_path):
        cfg = config_from_dict(MINIMAL_DFS)
        report = run_scenario(cfg, str(tmp_path))
        row = Path(report.csv_paths[0]).read_text().splitlines()[1].split(",")
        assert float(row[0]) == 0.0
        assert float(row[1]) == pytest.approx(1.0, abs=1e-15)
        assert float(row[4]) == pytest.approx(0.0, abs=1e-15)

    def test_deterministic(self, tmp_path):
        data = json.loads((CONFIGS / "singlet_code.json").read_text())
        data["times"] = {"start": 0, "stop": 2, "num": 5}
        cfg = config_from_dict(data)
        a = run_scenario(cfg, str(tmp_path / "a"))
        b = run_scenario(cfg, str(tmp_path / "b"))
        for pa, pb in zip(a.csv_paths, b.csv_paths):
            assert Path(pa).read_bytes() == Path(pb).read_bytes()
        assert [v.line() for v in a.verdicts] == [v.line() for v in b.verdicts]


class TestExitCodes:
    def test_pass(self, tmp_path, capsys):
        code = main(["--config", write_config(tmp_path, MINIMAL_DFS),
                     "--out", str(tmp_path / "out")])
        assert code == 0
        assert "PASS fidelity_min" in capsys.readouterr().out
        assert (tmp_path / "out" / "report.txt").exists()

    def test_missing_config(self, tmp_path):
        assert main(["--config", str(tmp_path / "missing.json")]) == 2

    def test_bad_config(self, tmp_path):
        path = write_config(tmp_path, {**MINIMAL_DFS, "scenario": "warp_drive"})
        assert main(["--config", path]) == 2

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        path = write_config(tmp_path, MINIMAL_DFS)
        assert main(["--config", path, "--out", str(blocker / "sub")]) == 2

    def test_numerical_violation(self, tmp_path):
        data = {"scenario": "gate_check",
                "system": {"pairs": [[0, 1]],
                           "axes": [{"direction": [0, 0, 1], "strength": 0.0}]},
                "params": {"seed": 1, "samples": 2, "gate_times": [1.0]}}
        assert main(["--config", write_config(tmp_path, data),
                     "--out", str(tmp_path / "o")]) == 3

    def test_fail_verdict(self, tmp_path, capsys):
        data = {**MINIMAL_DFS, "params": {"epsilon": 0.2, "logical_state": "plus"},
                "times": [0.0, 5.0]}
        code = main(["--config", write_config(tmp_path, data),
                     "--out", str(tmp_path / "o")])
        assert code == 4
        assert "FAIL fidelity_min" in capsys.readouterr().out

    def test_seed_override_and_tol_scale(self, tmp_path, capsys):
        path = str(CONFIGS / "gate_check.json")
        code = main(["--config", path, "--out", str(tmp_path), "--seed", "99",
                     "--tol-scale", "2"])
        assert code == 0
        out = capsys.readouterr().out
        assert "seed: 99" in out
        assert "tolerances scaled by 2" in out


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_committed_examples_pass(path, tmp_path):
    report = run_scenario(load_config(str(path)), str(tmp_path))
    assert report.all_passed, report.text()
    assert all(os.path.exists(p) for p in report.csv_paths)
