import json
import subprocess
import sys

import numpy as np
import pytest

from caplab.cli import EXIT_NO_CONTACT, EXIT_SINGULAR, EXIT_TRUNCATION, main
from caplab.io import load_surface, read_json, read_sweep_csv, validate_manifest


def run(*argv):
    return main([str(a) for a in argv])


def test_solve_clifford(tmp_path, capsys):
    out = tmp_path / "s"
    assert run("solve", "--r0", 1 / np.sqrt(2), "--n-t", 64, "--n-s", 16, "--out", out) == 0
    assert "R = 1.570796326795" in capsys.readouterr().out
    assert validate_manifest(out / "manifest.json") == []
    m = read_json(out / "manifest.json")
    assert m["command"] == "solve" and m["arguments"]["out"] == str(out)
    assert {o["path"] for o in m["outputs"]} == {"profile.csv", "surface.csv", "surface.json", "contact.json"}


def test_solve_target_and_dual(tmp_path):
    s = tmp_path / "s"
    assert run("solve", "--target-R", 0.98, "--n-t", 64, "--n-s", 16, "--out", s) == 0
    assert read_json(s / "contact.json")["R"] == pytest.approx(0.98, abs=1e-12)
    d = tmp_path / "d"
    assert run("dual", "--surface", s / "surface.json", "--out", d) == 0
    head = read_json(d / "dual.json")
    assert head["contact"]["R"] == pytest.approx(np.pi / 2, abs=1e-12)
    assert head["contact"]["gamma"] == pytest.approx(0.98, abs=1e-10)
    assert validate_manifest(d / "manifest.json") == []


def test_dual_from_neck(tmp_path):
    d = tmp_path / "d"
    assert run("dual", "--r0", 0.6, "--n-t", 64, "--n-s", 16, "--out", d) == 0
    assert (d / "base.json").exists()
    assert load_surface(d / "base.json").contact.params.R > np.pi / 2


def test_dual_needs_a_source(tmp_path):
    with pytest.raises(SystemExit):
        run("dual", "--out", tmp_path / "d")


def test_solve_capillary_and_catenoid(tmp_path):
    assert run("solve", "--r0", 0.6, "--t-b", 1.0, "--n-t", 64, "--n-s", 16, "--out", tmp_path / "c") == 0
    assert read_json(tmp_path / "c" / "contact.json")["kind"] == "capillary"
    assert run("solve", "--catenoid", "--n-t", 64, "--n-s", 16, "--out", tmp_path / "k") == 0
    assert validate_manifest(tmp_path / "k" / "manifest.json") == []


def test_singular_neck_exit_code_and_no_files(tmp_path, capsys):
    out = tmp_path / "s"
    assert run("solve", "--r0", 0.999, "--out", out) == EXIT_SINGULAR
    assert not out.exists() and list(tmp_path.iterdir()) == []
    assert "singular" in capsys.readouterr().err


def test_unreachable_radius_exit_code(tmp_path):
    assert run("solve", "--target-R", 2.5, "--out", tmp_path / "s") == EXIT_NO_CONTACT
    assert list(tmp_path.iterdir()) == []


def test_sweep(tmp_path):
    assert run("sweep", "--n", 8, "--out", tmp_path / "w") == 0
    assert len(read_sweep_csv(tmp_path / "w" / "sweep.csv")) == 8
    assert validate_manifest(tmp_path / "w" / "manifest.json") == []


def test_spectrum_builtin(tmp_path):
    out = tmp_path / "spectrum.json"
    assert run("spectrum", "--builtin", "clifford", "--out", out) == 0
    d = read_json(out)
    assert (d["ind"], d["nul"], d["ind0"]) == (1, 3, 4)


def test_spectrum_truncation_exit_code(tmp_path):
    assert run("spectrum", "--builtin", "clifford", "--modes", 1, "--out", tmp_path / "x.json") == EXIT_TRUNCATION


def test_spectrum_from_file(tmp_path, capsys):
    run("solve", "--catenoid", "--out", tmp_path / "k")
    capsys.readouterr()
    assert run("spectrum", "--surface", tmp_path / "k" / "surface.json") == 0
    assert json.loads(capsys.readouterr().out)["ind0"] == 4


def test_verify_suite(tmp_path, capsys):
    assert run("verify", "--suite", "foliation", "--seed", 2, "--out", tmp_path / "v.json") == 0
    assert read_json(tmp_path / "v.json")["seed"] == 2
    assert "pass" in capsys.readouterr().out


def test_figure1_bytes_stable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("figure1", "--out", a) == 0 and run("figure1", "--out", b) == 0
    svgs = sorted(p.name for p in a.glob("*.svg"))
    assert len(svgs) == 10
    assert all((a / n).read_bytes() == (b / n).read_bytes() for n in svgs)
    assert validate_manifest(a / "manifest.json") == []


def test_console_script_help():
    r = subprocess.run([sys.executable, "-m", "caplab.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("solve", "sweep", "dual", "spectrum", "verify", "figure1"):
        assert cmd in r.stdout
