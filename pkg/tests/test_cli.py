import json
import subprocess
import sys

import numpy as np
import pytest

from coxkernel import streams
from coxkernel.cli import main
from coxkernel.dataset import read_dataset


def run(*argv):
    return main([str(a) for a in argv])


def snapshot(folder):
    return {p.name: p.read_bytes() for p in sorted(folder.iterdir()) if p.is_file()}


def test_simulate_identity_time_change(tmp_path):
    out = tmp_path / "sim"
    assert run("simulate", "--beta0", 0, "--a", 1, "--b", 1, "--n", 1, "--seed", 7, "--out-dir", out) == 0
    data = read_dataset(out)
    # with unit intensity the jumps are the unit-rate arrivals themselves:
    # a Poisson(1) count of sorted uniforms drawn after the covariates
    rng = streams.replication_stream(7, 0)
    rng.standard_normal((1, len(data.schedule), 1))
    k = rng.poisson(1.0)
    expected = np.sort(rng.random(k))
    assert np.allclose(data.jump_times, expected, rtol=0, atol=1e-12)


def test_large_renewal_floor_gives_one_time(tmp_path):
    assert run("simulate", "--renewal-eps", 0.6, "--n", 3, "--out-dir", tmp_path) == 0
    assert len(read_dataset(tmp_path).schedule) <= 1


def test_manifest_contents(tmp_path):
    assert run("simulate", "--n", 4, "--seed", 5, "--out-dir", tmp_path) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed"] == 5 and manifest["subcommand"] == "simulate"
    assert manifest["config"]["n"] == 4
    assert set(manifest["outputs"]) >= {"schedule.csv", "covariates.csv", "jumps.csv", "scenario.ini"}
    assert "--seed" in manifest["argv"]


def test_scenario_file_and_flag_override(tmp_path):
    run("simulate", "--n", 4, "--seed", 5, "--beta0", 0.3, "--out-dir", tmp_path / "a")
    assert run("simulate", "--config", tmp_path / "a" / "scenario.ini", "--n", 6, "--out-dir", tmp_path / "b") == 0
    manifest = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert manifest["config"]["beta0"] == 0.3 and manifest["config"]["n"] == 6 and manifest["seed"] == 5


def test_estimate_outputs(tmp_path):
    run("simulate", "--n", 30, "--out-dir", tmp_path / "sim")
    assert run("estimate", "--data-dir", tmp_path / "sim", "--grid", 8, "--out-dir", tmp_path / "est") == 0
    rows = (tmp_path / "est" / "estimates.csv").read_text().splitlines()
    assert len(rows) == 9
    assert run("estimate", "--data-dir", tmp_path / "sim", "--grid", 4, "--h", 0.3, "--eta", 1,
               "--eval-replicate", 2, "--out-dir", tmp_path / "fixed") == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--n", 0],
        ["simulate", "--renewal-eps", -1],
        ["mc", "--n-mc", 0],
        ["mc", "--trim-eps", 0.7],
        ["mc", "--h", 0.2],
        ["clt", "--t", 1.5],
    ],
)
def test_invalid_values_exit_2(tmp_path, argv, capsys):
    assert run(*argv, "--out-dir", tmp_path) == 2
    assert "error" in capsys.readouterr().err


def test_mc_grid_rows(tmp_path):
    assert run("mc", "--n", 40, "--n-mc", 1, "--grid", 5, "--plot-data", "--out-dir", tmp_path) == 0
    assert len((tmp_path / "summary.csv").read_text().splitlines()) == 6
    assert (tmp_path / "plot_data.csv").exists()
    assert json.loads((tmp_path / "summary.json").read_text())["n_mc"] == 1


def test_clt_outputs(tmp_path):
    assert run("clt", "--n", 200, "--n-mc", 120, "--out-dir", tmp_path) == 0
    info = json.loads((tmp_path / "clt.json").read_text())
    assert info["n_mc"] == 120 and "ks_distance" in info


def test_realdata_fixture(tmp_path, data_dir):
    argv = ["realdata", "--equity", data_dir / "agilent.csv", "--oil", data_dir / "crude_oil.csv",
            "--grid", 5, "--out-dir", tmp_path]
    assert run(*argv) == 0
    events = json.loads((tmp_path / "events.json").read_text())
    assert "2015-06-12" in events["schedule_dates"] and "2015-06-15" not in events["schedule_dates"]
    assert events["jump_dates"] == {"agilent": ["2015-06-15"]}
    assert len((tmp_path / "curves.csv").read_text().splitlines()) == 6


def test_realdata_empty_schedule(tmp_path, data_dir, capsys):
    code = run("realdata", "--equity", data_dir / "agilent.csv", "--oil", data_dir / "crude_oil.csv",
               "--alpha", -1, "--out-dir", tmp_path)
    assert code == 1
    assert "no observation times" in capsys.readouterr().err


def test_realdata_needs_oil(tmp_path, data_dir):
    with pytest.raises(SystemExit) as exc:
        run("realdata", "--equity", data_dir / "agilent.csv", "--out-dir", tmp_path)
    assert exc.value.code == 2


def test_parse_error_exit_1(tmp_path, data_dir, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("Date,Open,High,Low,Close,Volume,Adj.Close\n2015-06-23,N/A,1,1,1,1,1\n")
    code = run("realdata", "--equity", bad, "--oil", data_dir / "crude_oil.csv", "--out-dir", tmp_path / "o")
    assert code == 1
    assert "row 1" in capsys.readouterr().err


def test_rerun_and_replay_are_byte_identical(tmp_path):
    argv = ["mc", "--n", 40, "--n-mc", 3, "--grid", 4, "--seed", 9]
    run(*argv, "--out-dir", tmp_path / "a")
    run(*argv, "--out-dir", tmp_path / "b")
    assert snapshot(tmp_path / "a") == {**snapshot(tmp_path / "b"), "manifest.json": snapshot(tmp_path / "a")["manifest.json"]}
    before = snapshot(tmp_path / "a")
    assert run("replay", tmp_path / "a" / "manifest.json") == 0
    assert snapshot(tmp_path / "a") == before


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "coxkernel", "simulate", "--n", "2", "--out-dir", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip().endswith("manifest.json")
