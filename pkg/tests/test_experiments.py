import math
import os

import numpy as np
import pytest

from randinfo.experiments import (
    CouponReport,
    TrialConfig,
    exact_quantile,
    fit_loglog,
    fourier_radius,
    run_concentration,
    run_coupon,
    run_gaussian_theorem,
    run_mls_rates,
    run_sobolev_rates,
    run_wce_trials,
)
from randinfo.spectra import DivergentSpectrumError, Spectrum

SIN = {"sin2pi": lambda x: np.sin(2.0 * np.pi * np.asarray(x, dtype=float))}


def test_fit_loglog_exact_cases():
    xs = np.array([2.0, 4.0, 8.0, 16.0])
    fit = fit_loglog(xs, xs**-2.0)
    assert fit.slope == pytest.approx(-2.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    const = fit_loglog(xs, np.full(4, 2.5))
    assert const.slope == pytest.approx(0.0, abs=1e-12)
    assert const.r_squared == 1.0
    scaled = fit_loglog(xs, 3.0 * xs**-0.5)
    assert scaled.slope == pytest.approx(-0.5, abs=1e-12)
    assert scaled.intercept == pytest.approx(math.log(3.0), rel=1e-12)


def test_fit_loglog_validation():
    with pytest.raises(ValueError):
        fit_loglog([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        fit_loglog([1.0, 2.0, 3.0], [1.0, -2.0, 3.0])


def test_exact_quantile_nearest_rank():
    vals = [5.0, 1.0, 3.0, 2.0, 4.0]
    assert exact_quantile(vals, 0.5) == 3.0
    assert exact_quantile(vals, 0.0) == 1.0
    assert exact_quantile(vals, 0.99) == 5.0


def test_fourier_radius_examples():
    spec = Spectrum.power_law(1.0, 16)
    radius, missing = fourier_radius([1, 2, 4], spec)
    assert radius == pytest.approx(1.0 / 3.0) and missing == 3
    radius, missing = fourier_radius([], spec)
    assert radius == 1.0 and missing == 1
    radius, missing = fourier_radius(range(1, 17), spec)
    assert missing == 17 and radius == pytest.approx(1.0 / 17.0)
    # head fully covered: radius at most the next axis
    radius, missing = fourier_radius([1, 2, 3, 4, 6], spec)
    assert missing == 5 and radius <= spec.semi_axis(5)
    with pytest.raises(ValueError):
        fourier_radius([0], spec)


def test_run_coupon_zero_draws_and_duality():
    spec = Spectrum.power_law(1.0, 512)
    report = run_coupon(spec, n=8, n_info=0, trials=10, master_seed=3)
    assert all(r["radius"] == 1.0 for r in report.rows)
    report = run_coupon(spec, n=8, n_info=60, trials=50, master_seed=3)
    assert report.prob_radius_le_next + report.prob_radius_ge_head >= 1.0
    assert report.coverage_probability == report.prob_radius_le_next
    assert set(report.rows[0]) == set(CouponReport.columns)


def test_run_coupon_deterministic():
    spec = Spectrum.power_law(1.0, 512)
    a = run_coupon(spec, 16, 100, 25, master_seed=9)
    b = run_coupon(spec, 16, 100, 25, master_seed=9)
    assert a.rows == b.rows and a.digest() == b.digest()


@pytest.fixture
def small_config():
    return TrialConfig(
        channel="fourier",
        density="rho",
        spectrum=Spectrum.power_law(1.0),
        n_values=(8,),
        trials=5,
        master_seed=11,
        oversample=3.0,
    )


def test_run_wce_trials_rows_and_determinism(small_config):
    summary = run_wce_trials(small_config)
    assert len(summary.rows) == 5
    again = run_wce_trials(small_config)
    assert summary.rows == again.rows
    for row in summary.rows:
        assert set(row) == set(summary.columns)
        if row["pass"]:
            assert row["wce_exact"] <= row["wce_bound"] + 1e-9


def test_run_wce_single_trial_is_single_row(small_config):
    cfg = TrialConfig(**{**small_config.__dict__, "trials": 1})
    assert len(run_wce_trials(cfg).rows) == 1


def test_run_wce_optimal_density_degenerates_to_projection():
    cfg = TrialConfig(
        channel="fourier",
        density="optimal",
        spectrum=Spectrum.power_law(1.0),
        n_values=(4, 8),
        trials=3,
        master_seed=2,
    )
    summary = run_wce_trials(cfg)
    for row in summary.rows:
        assert row["N"] == row["n"]
        assert row["wce_exact"] == pytest.approx(1.0 / (row["n"] + 1), rel=1e-10)


def test_run_wce_refuses_divergent_spectrum():
    cfg = TrialConfig(
        channel="fourier",
        density="rho",
        spectrum=Spectrum.power_law(0.4),
        n_values=(8,),
        trials=2,
        master_seed=1,
    )
    with pytest.raises(DivergentSpectrumError):
        run_wce_trials(cfg)


def test_pass_fraction_monotone_under_bound_tightening(small_config):
    rows = run_wce_trials(small_config).rows
    full = np.mean([r["wce_exact"] <= r["theorem_bound"] for r in rows])
    tight = np.mean([r["wce_exact"] <= 0.5 * r["theorem_bound"] for r in rows])
    assert tight <= full


def test_parallel_trials_match_serial(small_config):
    serial = run_wce_trials(small_config)
    os.environ["RANDINFO_THREADS"] = "3"
    try:
        parallel = run_wce_trials(small_config)
    finally:
        del os.environ["RANDINFO_THREADS"]
    assert serial.rows == parallel.rows


def test_run_gaussian_zero_tail_gives_zero_error():
    spec = Spectrum.explicit(np.linspace(1.0, 0.25, 8))
    summary = run_gaussian_theorem(spec, [8], trials=10, master_seed=5)
    for row in summary.rows:
        assert row["N"] == 16
        if row["pass"]:
            assert row["wce_exact"] == 0.0
    assert summary.by_n["8"]["pass_fraction_theorem"] == 1.0


def test_run_gaussian_deterministic_summary():
    spec = Spectrum.power_law(1.0)
    a = run_gaussian_theorem(spec, [8], 5, master_seed=6)
    b = run_gaussian_theorem(spec, [8], 5, master_seed=6)
    assert a.rows == b.rows and a.digest() == b.digest()


def test_run_concentration_fourier():
    cfg = TrialConfig(
        channel="fourier",
        density="rho",
        spectrum=Spectrum.geometric(0.5),
        n_values=(4,),
        trials=10,
        master_seed=8,
        n_info=10_000,
        dim=512,
    )
    summary = run_concentration(cfg)
    assert summary.by_n["4"]["fraction_below_half"] == 1.0
    assert all(r["stat"] < 0.1 for r in summary.rows)
    assert run_concentration(cfg).rows == summary.rows


def test_run_concentration_needs_weighted_density():
    cfg = TrialConfig(
        channel="point",
        density="uniform",
        spectrum=Spectrum.power_law(1.0),
        n_values=(4,),
        trials=1,
        master_seed=8,
    )
    with pytest.raises(ValueError):
        run_concentration(cfg)


def test_concentration_degrades_without_oversampling():
    # N = n draws concentrate far worse than N = ceil(5 n ln n)
    spec = Spectrum.power_law(1.0)
    base = dict(channel="fourier", density="rho", spectrum=spec, n_values=(64,), master_seed=4)
    tight = run_concentration(TrialConfig(trials=10, n_info=64, **base))
    loose = run_concentration(TrialConfig(trials=10, oversample=5.0, **base))
    med_tight = exact_quantile([r["stat"] for r in tight.rows], 0.5)
    med_loose = exact_quantile([r["stat"] for r in loose.rows], 0.5)
    assert med_tight > med_loose
    assert tight.by_n["64"]["fraction_below_half"] <= loose.by_n["64"]["fraction_below_half"]


def test_run_sobolev_rates_small():
    summary = run_sobolev_rates(1, [1.0], [32, 64, 128, 256], trials=20, master_seed=10)
    fit = summary.fits["norm_gamma_1"]
    assert -1.3 <= fit.slope <= -0.7
    assert summary.fits["covering_radius"].slope < -0.5
    assert summary.ratio_band["max_over_min"] < 3.0
    again = run_sobolev_rates(1, [1.0], [32, 64, 128, 256], trials=20, master_seed=10)
    assert again.rows == summary.rows


def test_run_sobolev_rates_2d():
    summary = run_sobolev_rates(2, [1.0], [16, 32, 64], trials=5, master_seed=10, grid=96)
    assert -0.8 <= summary.fits["norm_gamma_1"].slope <= -0.2


def test_run_mls_rates_polynomial_hits_noise_floor():
    fns = {"line": lambda x: 0.5 - 0.25 * np.asarray(x, dtype=float)}
    summary = run_mls_rates(2, math.inf, fns, [64, 128, 256], trials=3, master_seed=12)
    assert summary.fits["line"] is None


def test_run_mls_rates_sin_slope_small_run():
    summary = run_mls_rates(2, math.inf, SIN, [64, 128, 256, 512], trials=10, master_seed=13)
    fit = summary.fits["sin2pi"]
    assert fit is not None and fit.slope < -1.0
    assert run_mls_rates(2, math.inf, SIN, [64, 128, 256, 512], trials=10, master_seed=13).rows == summary.rows
