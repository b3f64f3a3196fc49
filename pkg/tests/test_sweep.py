import numpy as np
import pytest

from limitlab.errors import (CertificateRefused, InsufficientPoints,
                             NonPositiveError)
from limitlab.grid import PeriodicGrid
from limitlab.sweep import SweepConfig, fit_order, run_sweep


class TestFitOrder:
    def test_exact_linear(self):
        fit = fit_order([(0.1, 0.1), (0.05, 0.05), (0.025, 0.025)])
        assert fit.slope == pytest.approx(1.0, abs=1e-12)
        assert all(p == pytest.approx(1.0, abs=1e-12)
                   for p in fit.pair_orders)

    def test_exact_quadratic(self):
        fit = fit_order([(0.1, 0.01), (0.05, 0.0025), (0.025, 0.000625)])
        assert fit.slope == pytest.approx(2.0, abs=1e-12)

    def test_noisy_first_order(self, rng):
        eps = [0.1 / 2 ** k for k in range(5)]
        errors = [(e, 0.7 * e * (1 + rng.uniform(-0.05, 0.05))) for e in eps]
        fit = fit_order(errors)
        assert 0.9 <= fit.slope <= 1.1
        assert fit.fit_residual < 0.1

    def test_too_few_points(self):
        with pytest.raises(InsufficientPoints):
            fit_order([(0.1, 0.1), (0.05, 0.05)])

    def test_nonpositive_error(self):
        with pytest.raises(NonPositiveError):
            fit_order([(0.1, 0.1), (0.05, 0.0), (0.025, 0.025)])


class TestSweepConfig:
    def test_epsilons_must_decrease(self, material_demo):
        with pytest.raises(ValueError):
            SweepConfig(params=material_demo, epsilons=(0.05, 0.1),
                        grid=PeriodicGrid(32, 32), dt=0.002, t_end=0.1)

    def test_certificate_refusal(self, material_demo):
        import dataclasses
        bad_visc = dataclasses.replace(material_demo.visc, beta5=1.0,
                                       beta6=3.0)
        bad = dataclasses.replace(material_demo, visc=bad_visc)
        cfg = SweepConfig(params=bad, epsilons=(0.1, 0.05),
                          grid=PeriodicGrid(32, 32), dt=0.002, t_end=0.01)
        with pytest.raises(CertificateRefused):
            run_sweep(cfg)


class TestDegenerateSweep:
    def test_equilibrium_recipe_stays_at_fixed_point(self, material_demo):
        cfg = SweepConfig(params=material_demo, epsilons=(0.2, 0.1),
                          grid=PeriodicGrid(32, 32), dt=0.005, t_end=0.05,
                          recipe={"name": "equilibrium"}, order=0,
                          n_output=5)
        report = run_sweep(cfg)
        for run in report["runs"]:
            assert max(run["e_Q"]) <= 1e-10
            assert max(run["e_v"]) <= 1e-12

    def test_report_embeds_configuration(self, material_demo):
        cfg = SweepConfig(params=material_demo, epsilons=(0.2, 0.1),
                          grid=PeriodicGrid(32, 32), dt=0.005, t_end=0.02,
                          recipe={"name": "equilibrium"}, order=0,
                          n_output=2)
        report = run_sweep(cfg)
        assert report["certificates"]["qs"]["ok"]
        assert report["certificates"]["el"]["ok"]
        assert report["params"]["visc"]["beta7"] == material_demo.visc.beta7
        assert report["epsilons"] == [0.2, 0.1]
        assert report["recipe"] == {"name": "equilibrium"}

    def test_shared_timestamps(self, material_demo):
        cfg = SweepConfig(params=material_demo, epsilons=(0.2, 0.1, 0.05),
                          grid=PeriodicGrid(32, 32), dt=0.005, t_end=0.05,
                          recipe={"name": "equilibrium"}, order=0,
                          n_output=5)
        report = run_sweep(cfg)
        times = [run["t"] for run in report["runs"]]
        assert times[0] == times[1] == times[2]


def test_parallel_runs_match_serial(material_demo):
    base = dict(params=material_demo, epsilons=(0.2, 0.1),
                grid=PeriodicGrid(32, 32), dt=0.005, t_end=0.03,
                recipe={"name": "smooth"}, order=0, n_output=3)
    serial = run_sweep(SweepConfig(**base, threads=1))
    parallel = run_sweep(SweepConfig(**base, threads=2))
    assert serial["sup_e_Q"] == parallel["sup_e_Q"]
    assert serial["runs"][0]["e_Q"] == parallel["runs"][0]["e_Q"]


def test_proportional_dt_rule(material_demo):
    cfg = SweepConfig(params=material_demo, epsilons=(0.2, 0.1),
                      grid=PeriodicGrid(32, 32), dt=0.004, t_end=0.02,
                      recipe={"name": "smooth"}, order=0, n_output=2,
                      dt_rule="proportional")
    report = run_sweep(cfg)
    # output timestamps still shared despite the per-eps dt
    assert report["runs"][0]["t"] == report["runs"][1]["t"]


@pytest.mark.slow
def test_smooth_recipe_first_order_convergence(material_demo):
    # compact version of the headline experiment (full size in acceptance)
    cfg = SweepConfig(params=material_demo, epsilons=(0.1, 0.05, 0.025),
                      grid=PeriodicGrid(32, 32), dt=0.0025, t_end=0.25,
                      recipe={"name": "smooth"}, order=1, n_output=10)
    report = run_sweep(cfg)
    assert report["fitted_order_Q"]["slope"] >= 0.8
    sup_ev = report["sup_e_v"]
    assert all(sup_ev[i + 1] < sup_ev[i] for i in range(len(sup_ev) - 1))
