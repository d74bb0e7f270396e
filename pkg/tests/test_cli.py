import hashlib
import json

import pytest
from click.testing import CliRunner

from exactwkb.cli import OUT_ENV, main


@pytest.fixture
def run(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "out"))
    runner = CliRunner()

    def _run(*args):
        return runner.invoke(main, list(args), catch_exceptions=False)

    return _run


def _load(tmp_path, name):
    return json.loads((tmp_path / "out" / name).read_text())


def test_stokes_writes_json_svg_manifest(run, tmp_path):
    res = run("stokes", "-p", "x^2/2", "-E", "0.5")
    assert res.exit_code == 0, res.output
    out = tmp_path / "out"
    assert _load(tmp_path, "stokes.json")["n_sectors"] == 4
    man = _load(tmp_path, "stokes.manifest.json")
    assert man["request"] == {"potential": "x^2/2", "energy": [0.5, 0.0], "arg_lambda": 0.0}
    assert man["defaults"] == ["arg_lambda"]
    for name, digest in man["outputs"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    assert set(man["outputs"]) == {"stokes.json", "stokes.svg"}


def test_reruns_are_bit_identical(run, tmp_path):
    run("borel", "-p", "x/2", "-x", "1")
    first = {p.name: p.read_bytes() for p in (tmp_path / "out").iterdir()}
    run("borel", "-p", "x/2", "-x", "1")
    second = {p.name: p.read_bytes() for p in (tmp_path / "out").iterdir()}
    assert first == second


def test_airy_sector_table(run, tmp_path):
    assert run("stokes", "-p", "x/2").exit_code == 0
    assert len(_load(tmp_path, "stokes.json")["graph"]["sectors"]) == 3


def test_parse_error_exit_2(run):
    res = run("stokes", "-p", "x^^2")
    assert res.exit_code == 2
    assert "ParseError" in res.output and "position 2" in res.output


def test_pole_on_ray_exit_3(run):
    res = run("borel", "-p", "x/2", "-x", "1", "--ray", "0")
    assert res.exit_code == 3
    assert "pole-on-ray" in res.output


def test_borel_nearest_cluster_and_two_rays(run, tmp_path):
    res = run("borel", "-p", "x/2", "-x", "1", "-N", "20", "--pade", "10,10",
              "--ray", "2.8", "--ray", "-2.9")
    assert res.exit_code == 0, res.output
    body = _load(tmp_path, "borel.json")
    assert abs(abs(complex(*body["nearest_pole"]["pole"])) - 2.0 / 3.0) < 0.02
    assert all(s["rays_consistent"] for s in body["sums"])
    assert (tmp_path / "out" / "borel.svg").exists()


def test_config_file_wins_over_flags(run, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"potential": "x/2", "x": [2.0, 0.0], "order": 4}))
    res = run("--config", str(cfg), "--csv", "coeffs", "-p", "x^2/2", "-x", "1")
    assert res.exit_code == 0, res.output
    body = _load(tmp_path, "coeffs.json")
    assert body["x"] == [2.0, 0.0] and len(body["rows"]) == 5
    assert (tmp_path / "out" / "coeffs.csv").read_text().startswith("n,c_re")


def test_unknown_config_key_exit_2(run, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"potential": "x/2", "colour": "red"}))
    res = run("--config", str(cfg), "stokes")
    assert res.exit_code == 2 and "colour" in res.output


def test_potential_from_coefficient_file(run, tmp_path):
    f = tmp_path / "V.json"
    f.write_text("[0, 0, 0.5]")
    assert run("stokes", "-p", f"@{f}", "-E", "0.5").exit_code == 0
    assert _load(tmp_path, "stokes.json")["n_sectors"] == 4


def test_out_flag_beats_env(run, tmp_path):
    res = run("--out", str(tmp_path / "elsewhere"), "stokes", "-p", "x/2")
    assert res.exit_code == 0
    assert (tmp_path / "elsewhere" / "stokes.json").exists()


def test_verify_suite(run, tmp_path):
    res = run("verify", "eq21")
    assert res.exit_code == 0, res.output
    assert "PASS eq21/translation-airy" in res.output
    assert _load(tmp_path, "verify.json")["passed"] is True


def test_verify_unknown_suite_exit_2(run):
    res = run("verify", "nope")
    assert res.exit_code == 2 and "unknown suite" in res.output


def test_eigen_both_methods(run, tmp_path):
    res = run("eigen", "-p", "x^2/2", "-n", "1", "--bracket", "0,1", "--method", "both")
    assert res.exit_code == 0, res.output
    assert _load(tmp_path, "eigen.json")["method_gap"] < 1e-8


def test_connect(run, tmp_path):
    res = run("connect", "-p", "x/2", "--source", "3", "--basis", "1,2", "-l", "10")
    assert res.exit_code == 0, res.output
    row = _load(tmp_path, "connect.json")["rows"][0]
    assert abs(complex(*row["beta"]) + 1j) < 1e-8
