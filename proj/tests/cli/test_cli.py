import json
import os
import subprocess

import pytest

CLI = os.environ.get("DNLSKAM_CLI", "dnlskam")
SMALL = {"J_max": 4, "fourier_max": 12, "per_axis": 2, "r": 1e-20, "c": 1e-80, "max_steps": 2}


def cli(*args, config=None, tmp_path=None):
    cmd = [CLI]
    if config is not None:
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"schema_version": 1, **config}))
        cmd += ["--config", str(path)]
    return subprocess.run(cmd + list(args), capture_output=True, text=True)


def test_admissible_exit_codes(tmp_path):
    ok = cli("admissible", config={"J": [-1, 2]}, tmp_path=tmp_path)
    assert ok.returncode == 0
    assert json.loads(ok.stdout)["admissible"] is True
    bad = cli("admissible", config={"J": [-1, 1]}, tmp_path=tmp_path)
    assert bad.returncode == 1
    assert json.loads(bad.stdout)["reason"] == "divisibility"
    one = cli("admissible", config={"J": [2]}, tmp_path=tmp_path)
    assert one.returncode == 2
    assert "J:" in one.stderr


@pytest.mark.parametrize(
    "bad,key",
    [({"tau": 4}, "tau"), ({"p": 2.5}, "p"), ({"s0": 1.2}, "s0"), ({"r": 0}, "r"),
     ({"k_max": 0}, "k_max"), ({"quintic": [{"u": 2, "ubar": 1}]}, "quintic"), ({"nope": 1}, "nope")],
)
def test_config_errors_are_named(tmp_path, bad, key):
    res = cli("admissible", config=bad, tmp_path=tmp_path)
    assert res.returncode == 2
    assert res.stderr.startswith("config error: " + key)


def test_schema_version_required(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{}")
    res = subprocess.run([CLI, "--config", str(path), "admissible"], capture_output=True, text=True)
    assert res.returncode == 2
    assert "schema_version" in res.stderr


def test_assumptions_affine(tmp_path):
    res = cli("assumptions", config={"r": 1e-3, "k_max": 8, "mode_max": 12}, tmp_path=tmp_path)
    assert res.returncode == 0
    rep = json.loads(res.stdout)
    assert rep["m"] >= 0.5
    assert rep["M2"] == pytest.approx(2 / 1.5, rel=1e-12)
    bypass = cli("assumptions", config={"J": [-1, 1], "r": 1e-3, "k_max": 8, "mode_max": 8,
                                        "bypass_admissibility": True}, tmp_path=tmp_path)
    assert bypass.returncode == 1
    wit = json.loads(bypass.stdout)["witnesses"]
    assert any(w["value"] == 0.0 for w in wit)


def test_kam_deterministic_and_files(tmp_path):
    a = cli("kam", config=SMALL, tmp_path=tmp_path)
    b = cli("kam", config=SMALL, tmp_path=tmp_path)
    assert a.returncode == 0, a.stderr
    assert a.stdout == b.stdout
    out = tmp_path / "out"
    c = cli("--out", str(out), "kam", config=SMALL, tmp_path=tmp_path)
    assert c.returncode == 0
    lines = (out / "kam.jsonl").read_text().splitlines()
    assert len(lines) == 2
    assert a.stdout.startswith((out / "kam.jsonl").read_text())
    assert json.loads((out / "kam_summary.json").read_text())["contraction_verified"]


def test_kam_zero_steps(tmp_path):
    res = cli("kam", config={**SMALL, "max_steps": 0}, tmp_path=tmp_path)
    assert res.returncode == 0
    assert json.loads(res.stdout)["steps"] == 0


def test_measure(tmp_path):
    cfg = {"r": 0.05, "per_axis": 6, "k_max": 6, "mode_max": 8, "measure_Pi": 5}
    empty = cli("measure", config=cfg, tmp_path=tmp_path)
    assert empty.returncode == 2
    out = tmp_path / "m"
    res = cli("--out", str(out), "--alpha-sweep", "1e-5,2e-5,4e-5", "measure", config=cfg, tmp_path=tmp_path)
    assert res.returncode == 0
    assert (out / "measure.csv").read_text().startswith("alpha,")
    assert (out / "zones_0.csv").exists()
    bypass = cli("--alpha-sweep", "1e-5", "measure",
                 config={**cfg, "J": [-1, 1], "k_max": 8, "bypass_admissibility": True}, tmp_path=tmp_path)
    assert json.loads(bypass.stdout)["full_exclusion"] is True
