import json
import math

import pytest

from wvamp import experiments as ex
from wvamp.quantum import BSMode
from wvamp.stochastic import validity_ratio


def test_fig2_grid():
    spec = ex.scenario_fig2()
    theory = [p for p in spec.points if p.curve == "theory"]
    d2 = [p.delta ** 2 for p in theory]
    assert min(d2) == pytest.approx(0.01) and max(d2[:-1]) == pytest.approx(0.1)
    assert theory[-1].delta == 1.0
    assert spec.metadata["reconstructed"]


def test_fig2_curve_and_flags():
    res = ex.run_scenario(ex.scenario_fig2())
    at01 = min((r for r in res.rows if r.curve == "theory"), key=lambda r: abs(r.delta ** 2 - 0.01))
    assert at01.D_quantum == pytest.approx(5.5)
    one = [r for r in res.rows if r.curve == "theory" and r.delta == 1.0][0]
    assert not one.amplifying
    assert all(r.amplifying for r in res.rows if r.delta < 1)


def test_reconstructed_settings():
    pairs = ex.reconstructed_settings()
    assert pairs[0][0] * pairs[0][1] == pytest.approx(1.25)
    ratios = [validity_ratio(0.5, d, a) for d, a in pairs]
    assert ratios == pytest.approx(list(ex.PUBLISHED_RATIOS))
    for d, a in pairs[:4]:
        assert 10 <= a * a <= 95


def test_fig3_markers():
    res = ex.run_scenario(ex.scenario_fig3())
    assert [m["delta"] for m in res.marker_rows] == list(ex.FIG3_DELTAS)
    for m, row in zip(res.marker_rows, res.rows):
        assert m["prior_mean"] == pytest.approx(10.0)
        d = m["delta"]
        assert m["likelihood_zero"] == pytest.approx(10 * (1 - d) / (1 + d), rel=1e-12)
        # posterior second-moment shift is consistent with the first-moment marker
        assert m["posterior_mean"] > m["prior_mean"]
        assert row.D_quadrature == pytest.approx(row.D_exact, rel=1e-6)
    ks = [m["ks_distance"] for m in res.marker_rows]
    assert ks == sorted(ks, reverse=True)
    assert len(res.density_rows) == 361 * len(ex.FIG3_DELTAS)


def test_fig3_posterior_mean_from_quadrature():
    from wvamp.stochastic import posterior_mean
    res = ex.run_scenario(ex.scenario_fig3())
    for m, pt in zip(res.marker_rows, res.spec.points):
        assert m["posterior_mean"] == posterior_mean(pt.params(), pt.prior())


def test_fig4_large_intensity_converges():
    spec = ex.scenario_fig4("vs_darkport_intensity")
    res = ex.run_scenario(spec)
    rows = [r for r in res.rows if r.delta == 0.1 and r.darkport_intensity >= 100 - 1e-9]
    assert rows
    for r in rows:
        assert abs(r.D_exact - r.D_quantum) / r.D_quantum < 0.01


def test_fig4_small_intensity_diverges():
    res = ex.run_scenario(ex.scenario_fig4("vs_darkport_intensity"))
    r = [r for r in res.rows if r.delta == 0.1 and r.darkport_intensity <= 0.011][0]
    assert abs(r.D_quadrature - r.D_quantum) / r.D_quantum > 0.5


def test_fig4_base_shift_curve():
    res = ex.run_scenario(ex.scenario_fig4("vs_darkport_intensity"))
    base = [r for r in res.rows if r.curve == "base shift"]
    assert base and all(r.D_quantum_exact == pytest.approx(0.5) for r in base)
    # the stochastic curve approaches the base shift once fluctuations are small
    assert base[-1].D_quadrature == pytest.approx(0.5, abs=0.02)


def test_fig4a_monotone_convergence():
    res = ex.run_scenario(ex.scenario_fig4("vs_delta"))
    for n in ex.FIG4A_PHOTONS:
        rows = [r for r in res.rows if r.curve == f"|alpha|^2={n:g}" and r.delta <= 0.2]
        gaps = [abs(r.D_quadrature - r.D_quantum) for r in rows]
        # at fixed alpha, larger delta means larger dark-port intensity
        assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))


def test_scenario_validation():
    with pytest.raises(ValueError):
        ex.ScenarioSpec("empty", ())
    with pytest.raises(ValueError):
        ex.ScenarioSpec.from_grid("x", [0.1], [10], methods={"bogus"})
    with pytest.raises(ValueError):
        ex.scenario_fig4("sideways")


def test_empty_method_set_gives_parameters_only():
    res = ex.run_scenario(ex.ScenarioSpec.from_grid("p", [0.1, 0.2], [10.0], methods=()))
    for r in res.rows:
        assert r.D_quantum is r.D_exact is r.D_approx is r.D_quadrature is r.D_mc is None
        assert r.darkport_intensity == pytest.approx((r.delta * 10) ** 2)
        assert r.error == ""


def test_validity_limit_row():
    res = ex.run_scenario(ex.ScenarioSpec.from_grid("lim", [0.1], [1000.0], bs_modes=("first",),
                                                    methods={"quantum", "exact"}))
    r = res.rows[0]
    assert r.D_quantum == pytest.approx(5.5)
    assert r.D_exact == pytest.approx(5.5, rel=1e-3)


def test_mc_smoke_grid_consistent():
    spec = ex.ScenarioSpec.from_grid("smoke", [0.05, 0.1, 0.3], [5.0, 20.0],
                                     methods={"quadrature", "mc"}, mc_trials=200_000)
    for r in ex.run_scenario(spec).rows:
        assert abs(r.D_mc - r.D_quadrature) < 3 * r.D_mc_stderr


def test_soft_errors_do_not_abort():
    spec = ex.ScenarioSpec.from_grid("soft", [0.1], [10.0], sigma2s=(0.0, 0.3),
                                     methods={"exact", "mc"}, mc_trials=50)
    rows = ex.run_scenario(spec).rows
    assert len(rows) == 2
    assert all("mc: StatisticsError" in r.error for r in rows)
    assert all(r.D_exact is not None for r in rows)


CONFIG = """
# custom sweep
name = custom_test
delta = 0.05, 0.1
E0 = 10 20
sigma = 0.5
bs_mode = first
methods = quantum exact quadrature
"""


def test_config_parser():
    spec = ex.parse_scenario_config(CONFIG)
    assert spec.name == "custom_test"
    assert len(spec.points) == 4
    assert {p.bs_mode for p in spec.points} == {BSMode.FIRST_ORDER}
    assert spec.methods == {"quantum", "exact", "quadrature"}


def test_config_darkport_and_base():
    spec = ex.parse_scenario_config("delta = 0.1\ndarkport_intensity = 1, 100\n")
    assert [p.E0 for p in spec.points] == pytest.approx([10.0, 100.0])
    base = ex.parse_scenario_config("base = fig3\nmethods = exact\n")
    assert base.name == "fig3" and base.methods == {"exact"}
    with pytest.raises(ValueError):
        ex.parse_scenario_config("delta = 0.1\nE0 = 10\ncolour = red\n")
    with pytest.raises(ValueError):
        ex.parse_scenario_config("sigma = 0.5\n")
    with pytest.raises(ValueError):
        ex.parse_scenario_config("delta = 0.1\ndelta = 0.2\nE0 = 1\n")


def test_config_file_rerun_byte_identical(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text(CONFIG.replace("quadrature", "mc") + "mc_trials = 100000\nmc_seed = 4\n")
    a = ex.rows_to_csv(ex.run_scenario(ex.load_scenario(path)).rows)
    b = ex.rows_to_csv(ex.run_scenario(ex.load_scenario(path)).rows)
    assert a == b
    assert a.splitlines()[0] == ",".join(ex.COLUMNS)


def test_json_rows_match_fields():
    rows = ex.run_scenario(ex.ScenarioSpec.from_grid("j", [0.1], [10.0])).rows
    data = json.loads(ex.rows_to_json(rows))
    assert list(data[0]) == list(ex.COLUMNS)
    assert data[0]["D_mc"] is None
    assert data[0]["D_exact"] == pytest.approx(rows[0].D_exact, rel=1e-8)
    wrapped = json.loads(ex.rows_to_json(rows, metadata={"k": 1}))
    assert wrapped["metadata"] == {"k": 1} and len(wrapped["rows"]) == 1


def test_fmt():
    assert ex.fmt(None) == ""
    assert ex.fmt(True) == "true"
    assert ex.fmt(0.1 + 0.2) == "0.3"
    assert math.isnan(float(ex.fmt(float("nan")))) or ex.fmt(float("nan")) == "nan"
