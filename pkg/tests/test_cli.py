import json
import os
import subprocess
import sys

import pytest

from symcirc.cli import main
from symcirc.outputs import read_csv


def run(*argv):
    return main([str(a) for a in argv])


def test_theory_coe(capsys):
    assert run("theory", "--class", "coe", "--q", 2) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["v_B"]["exact"] == "153/305"
    assert data["reference_v_B"]["match"]


def test_theory_series_and_all_classes(capsys):
    assert run("theory", "--series", 6) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["classes"]) == 5
    assert all(c["series"]["match"] for c in data["classes"])


@pytest.mark.parametrize(
    "argv",
    [("theory", "--class", "bogus"), ("theory", "--q", 1), ("frobnicate",),
     ("simulate", "--sites", 20, "--layers", 30), ("simulate", "--window", "5,200"),
     ("gue", "--qubits", 9), ("kernels", "--format", "xml"), ("simulate", "--threads", 0)],
)
def test_invalid_arguments_exit_2(argv, capsys):
    assert run(*argv) == 2
    assert capsys.readouterr().err


def test_kernels_csv_and_json(capsys, tmp_path):
    assert run("kernels", "--class", "cse", "--exact") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("in,II,IX")
    assert lines[5].split(",")[5] == "1/3"  # XI -> XI
    out = tmp_path / "k.json"
    assert run("kernels", "--class", "unitary", "--format", "json", "--out", out) == 0
    data = json.loads(out.read_text())
    assert data["exact"][3][7] == "1/15"
    assert (tmp_path / "k.json.manifest.json").exists()


def test_table(capsys):
    assert run("table") == 0
    out = capsys.readouterr().out
    assert "153/305" in out and "alternative derivation" in out and "MISMATCH" not in out


def test_simulate_outputs(tmp_path, capsys):
    prefix = tmp_path / "u"
    assert run("simulate", "--sites", 120, "--layers", 50, "--ensemble", 400, "--seed", 7,
               "--out", prefix, "--occupancy") == 0
    fit = json.loads((tmp_path / "u_fit.json").read_text())
    assert fit["class"] == "unitary" and fit["seed"] == 7
    assert abs(fit["v_B_hat"] - 0.6) < 0.05
    header, edges = read_csv(tmp_path / "u_edges.csv")
    assert header == ["t", "mean_R", "var_R", "mean_L", "var_L"] and len(edges) == 51
    header, rho = read_csv(tmp_path / "u_rho.csv")
    assert header == ["t", "x", "rho_R", "rho_L"]
    manifest = json.loads((tmp_path / "u_manifest.json").read_text())
    assert manifest["seed"] == 7 and len(manifest["outputs"]) == 4
    assert manifest["config"]["fit_window"] == [20, 50]


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\nsites = 120\nlayers = 40\nensemble = 100\nclass = orthogonal\nseed = 3\n")
    prefix = tmp_path / "c"
    assert run("simulate", "--config", cfg, "--seed", 5, "--out", prefix) == 0
    m = json.loads((tmp_path / "c_manifest.json").read_text())
    assert m["config"]["cls"] == "orthogonal" and m["config"]["n"] == 120
    assert m["seed"] == 5
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    assert run("simulate", "--config", bad) == 2


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SYMCIRC_SEED", "0x2a")
    assert run("gue", "--qubits", 2, "--samples", 3, "--times", 50, "--out", tmp_path / "g.csv") == 0
    assert json.loads((tmp_path / "g_manifest.json").read_text())["seed"] == 42
    monkeypatch.setenv("SYMCIRC_SEED", "abc")
    assert run("gue", "--qubits", 2, "--samples", 3, "--out", tmp_path / "h.csv") == 2


def test_runtime_failure_exit_3(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run("simulate", "--sites", 120, "--layers", 30, "--ensemble", 10,
               "--out", blocker / "x") == 3
    assert "failed" in capsys.readouterr().err


def _digest(paths):
    return {p.name: p.read_bytes() for p in paths}


@pytest.mark.parametrize(
    "argv, outputs",
    [
        (["simulate", "--class", "cse", "--sites", "140", "--layers", "60", "--ensemble", "3000",
          "--seed", "11", "--occupancy"], ["_edges.csv", "_rho.csv", "_fit.json", "_occupancy.csv"]),
        (["oracle", "--class", "sp", "--class", "coe", "--samples", "3000", "--seed", "2"], [".json"]),
        (["gue", "--qubits", "3", "--samples", "16", "--times", "60", "--seed", "4"], [".csv", "_summary.json"]),
    ],
)
def test_byte_identical_across_threads(tmp_path, argv, outputs):
    env = {**os.environ, "NUMBA_NUM_THREADS": "4"}
    digests = []
    for threads in (1, 3):
        prefix = tmp_path / f"r{threads}"
        subprocess.run([sys.executable, "-m", "symcirc", *argv, "--threads", str(threads), "--out",
                        str(prefix) + (".json" if argv[0] == "oracle" else ".csv" if argv[0] == "gue" else "")],
                       env=env, check=True, capture_output=True)
        files = sorted(tmp_path.glob(f"r{threads}*"))
        names = {p.name[len(f"r{threads}"):] for p in files}
        assert {o for o in outputs} <= names
        digests.append({p.name[len(f"r{threads}"):]: p.read_bytes() for p in files if "manifest" not in p.name})
    assert digests[0] == digests[1]
