import json
import xml.etree.ElementTree as ET

import pytest

from wvamp import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(out):
    return dict(line.split(": ", 1) for line in out.strip().splitlines())


def test_weak_value_fock(capsys):
    code, out, _ = run(capsys, "weak-value", "--input", "fock", "--delta", "0.1")
    assert code == 0
    rep = report(out)
    assert float(rep["weak_value"]) == pytest.approx(5.5)
    assert float(rep["arm2_weak_value"]) == pytest.approx(-4.5)
    assert rep["anomalous"] == "true"


def test_weak_value_coherent(capsys):
    code, out, _ = run(capsys, "weak-value", "--input", "coherent", "--alpha", "3", "--delta", "0.1")
    rep = report(out)
    assert code == 0
    assert float(rep["weak_value"]) == pytest.approx(10.0)
    assert rep["anomalous"] == "true"
    assert float(rep["weak_value"]) + float(rep["arm2_weak_value"]) == pytest.approx(10.0)


def test_weak_value_json(capsys):
    code, out, _ = run(capsys, "weak-value", "--delta", "0.2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["weak_value"] == pytest.approx(3.0)
    assert data["first_order_valid"] is True


@pytest.mark.parametrize("argv,code", [
    (["weak-value", "--delta", "0"], 3),
    (["weak-value", "--delta", "1.5"], 3),
    (["weak-value", "--input", "coherent", "--delta", "0.1"], 2),
    (["weak-value"], 2),
    (["frobnicate"], 2),
    (["shift", "--method", "exact", "--delta", "0.1"], 2),
    (["shift", "--method", "exact", "--delta", "0.1", "--e0", "-1", "--sigma", "0.5"], 3),
    (["mc", "--trials", "100"], 4),
    (["mc", "--trials", "0"], 2),
    (["figures", "--which", "fig9"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0


def test_shift_examples(capsys):
    _, out, _ = run(capsys, "shift", "--method", "vacuum", "--delta", "0.1")
    assert float(report(out)["shift"]) == pytest.approx(5.5)
    _, out, _ = run(capsys, "shift", "--method", "exact", "--delta", "0.1", "--e0", "10", "--sigma", "0.5")
    rep = report(out)
    assert float(rep["shift"]) == pytest.approx(4.843, abs=5e-4)
    assert rep["regime"] == "marginal"
    _, out, _ = run(capsys, "shift", "--method", "quadrature", "--delta", "1", "--e0", "10",
                    "--sigma", "0.5", "--bs", "exact")
    assert float(report(out)["shift"]) == pytest.approx(0.5, abs=0.02)


def test_mc_deterministic_and_worker_invariant(capsys):
    args = ["mc", "--trials", "300000", "--seed", "77"]
    _, a, _ = run(capsys, *args, "--workers", "1")
    _, b, _ = run(capsys, *args, "--workers", "1")
    _, c, _ = run(capsys, *args, "--workers", "8")
    assert a == b == c
    rep = report(a)
    assert rep["seed"] == "77"
    assert abs(float(rep["z_score"])) < 3


def test_mc_default_setting_matches_quadrature(capsys):
    code, out, _ = run(capsys, "mc", "--estimator", "weighted")
    rep = report(out)
    assert code == 0 and rep["seed"] == str(cli.DEFAULT_SEED)
    assert abs(float(rep["shift"]) - float(rep["quadrature_reference"])) < 3 * float(rep["stderr"])


def test_mc_env_workers(capsys, monkeypatch):
    _, a, _ = run(capsys, "mc", "--trials", "200000")
    monkeypatch.setenv("WVAMP_WORKERS", "4")
    _, b, _ = run(capsys, "mc", "--trials", "200000")
    assert a == b


@pytest.mark.parametrize("which", ["fig2", "fig3", "fig4a", "fig4b"])
def test_figures_byte_identical(tmp_path, capsys, which):
    for d in ("a", "b"):
        assert run(capsys, "figures", "--which", which, "--out", str(tmp_path / d))[0] == 0
    a = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert a == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in a:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_fig3_marker_columns(tmp_path, capsys):
    run(capsys, "figures", "--which", "fig3", "--out", str(tmp_path))
    lines = (tmp_path / "fig3_markers.csv").read_text().splitlines()
    header = lines[0].split(",")
    for col in ("prior_mean", "posterior_mean", "likelihood_zero"):
        assert col in header
    assert len(lines) == 1 + 4
    assert (tmp_path / "fig3_density.csv").exists()


def test_fig4b_base_shift(tmp_path, capsys):
    run(capsys, "figures", "--which", "fig4b", "--out", str(tmp_path), "--format", "json")
    data = json.loads((tmp_path / "fig4b.json").read_text())
    assert data["metadata"]["base_shift"] == 0.5
    base = [r for r in data["rows"] if r["curve"] == "base shift"]
    assert base and all(r["delta"] == 1.0 and r["D_quantum_exact"] == pytest.approx(0.5) for r in base)


@pytest.mark.parametrize("which", ["fig2", "fig3", "fig4a", "fig4b"])
def test_svg_is_well_formed(capsys, which):
    code, out, _ = run(capsys, "figures", "--which", which, "--format", "svg")
    assert code == 0
    root = ET.fromstring(out)
    assert root.tag.endswith("svg")
    if which == "fig4b":
        assert "base shift 1/2" in out


def test_scenario_config(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("name = mini\ndelta = 0.1 0.2\nE0 = 10\nmethods = quantum exact\n")
    code, out, _ = run(capsys, "scenario", "--config", str(cfg))
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("key,curve,delta")
    assert len(lines) == 3
    assert run(capsys, "scenario", "--config", str(tmp_path / "missing.cfg"))[0] == 2
    assert run(capsys, "scenario", "--config", str(cfg), "--format", "svg")[0] == 3


def test_precision_flag(capsys):
    _, out, _ = run(capsys, "shift", "--method", "quantum", "--delta", "0.3", "--precision", "3")
    assert report(out)["shift"] == "2.17"
