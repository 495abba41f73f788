"""Seeded Monte Carlo harness for the recovery and geometry experiments.

Each experiment draws its per-trial randomness from a stream derived as
``mix64(mix64(mix64(master_seed, salt), n), t)`` with a fixed salt per
experiment kind, so trials are reproducible, order-independent, and safe to
run in parallel (RANDINFO_THREADS caps the worker count; results are
aggregated in trial order regardless of scheduling).  Aggregates use exact
order statistics on the sorted per-trial values.

Experiments refuse spectra whose infinite tail diverges, since the bound
comparisons they report are meaningless there.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import channels, recovery
from .geometry import PointSet, covering_radius, dist_norm
from .mls import MovingLeastSquares, error_norm
from .model import COORDINATE, TRIG, ModelSpace
from .rng import mix64, trial_rng
from .spectra import Spectrum, default_truncation

_SALTS = {
    "wce": 0x57CE,
    "gaussian": 0x6A55,
    "coupon": 0xC0_0B,
    "concentration": 0xC0_2C,
    "sobolev": 0x50B0,
    "mls": 0x315,
}

WCE_COLUMNS = [
    "channel",
    "density",
    "n",
    "N",
    "M",
    "alpha_hat",
    "beta_hat",
    "wce_exact",
    "wce_bound",
    "theorem_bound",
    "truncation_bias",
    "pass",
    "seed",
]

QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


def _worker_count() -> int:
    raw = os.environ.get("RANDINFO_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_trials(fn, count: int) -> list:
    workers = _worker_count()
    if workers <= 1:
        return [fn(t) for t in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def exact_quantile(values, q: float) -> float:
    """Nearest-rank quantile on the sorted values (no interpolation)."""
    ordered = sorted(float(v) for v in values)
    idx = min(len(ordered) - 1, int(math.floor(q * len(ordered))))
    return ordered[idx]


def quantile_table(values) -> dict:
    return {str(q): exact_quantile(values, q) for q in QUANTILES}


@dataclass(frozen=True)
class RateFit:
    """Ordinary least squares of log y against log x."""

    xs: tuple
    ys: tuple
    slope: float
    intercept: float
    r_squared: float

    def to_json(self) -> dict:
        return {
            "xs": list(self.xs),
            "ys": list(self.ys),
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
        }


def fit_loglog(xs, ys) -> RateFit:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3:
        raise ValueError("need at least three points for a rate fit")
    if (xs <= 0).any() or (ys <= 0).any():
        raise ValueError("log-log fit needs positive values")
    lx, ly = np.log(xs), np.log(ys)
    design = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ (slope, intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return RateFit(tuple(xs), tuple(ys), float(slope), float(intercept), r2)


# -- worst-case error trials --------------------------------------------


@dataclass(frozen=True)
class TrialConfig:
    """One worst-case-error experiment: channel, density, sizes, seeds.

    The number of measurements per n comes from the first applicable rule:
    explicit ``n_info``, ``double_n`` (N = 2n), else N = ceil(oversample *
    n * ln n).  The working dimension defaults to max(8N, 4n, 512) unless
    ``dim`` pins it.
    """

    channel: str
    density: str
    spectrum: Spectrum
    n_values: tuple[int, ...]
    trials: int
    master_seed: int
    oversample: float = 5.0
    n_info: int | None = None
    double_n: bool = False
    dim: int | None = None

    def resolve_n_info(self, n: int) -> int:
        if self.n_info is not None:
            return self.n_info
        if self.double_n:
            return 2 * n
        return max(n + 1, math.ceil(self.oversample * n * math.log(n)))

    def resolve_dim(self, n: int, n_info: int) -> int:
        if self.dim is not None:
            return self.dim
        if self.spectrum.kind == "explicit":
            return self.spectrum.dim
        return default_truncation(n, n_info)

    def echo(self) -> dict:
        return {
            "channel": self.channel,
            "density": self.density,
            "spectrum": self.spectrum.to_json(),
            "n_values": list(self.n_values),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "oversample": self.oversample,
            "n_info": self.n_info,
            "double_n": self.double_n,
            "dim": self.dim,
        }


def _draw_for(cfg: TrialConfig, model: ModelSpace, n: int, n_info: int, rng, seed):
    pair = (cfg.channel, cfg.density)
    if pair == (channels.FOURIER, channels.OPTIMAL):
        return channels.optimal_fourier_draw(n)
    if pair == (channels.POINT, channels.RHO):
        return channels.sample_points_rho(model, n, n_info, rng, seed=seed)
    if pair == (channels.POINT, channels.UNIFORM):
        return channels.sample_points_uniform(n_info, rng, seed=seed)
    if pair == (channels.FOURIER, channels.RHO):
        return channels.sample_fourier(model.spectrum, n, n_info, rng, seed=seed)
    if pair == (channels.GAUSS, channels.PLAIN):
        return channels.sample_gaussian(model, n, n_info, rng, weighted=False, seed=seed)
    if pair == (channels.GAUSS, channels.RHO):
        return channels.sample_gaussian(model, n, n_info, rng, weighted=True, seed=seed)
    raise ValueError(f"unsupported channel/density pair {pair}")


def theorem_bound(cfg_channel: str, cfg_density: str, spectrum: Spectrum, n: int) -> float:
    """Per-channel reference bound the trials are compared against.

    Plain Gaussian draws with N = 2n carry the explicit constant 5 in front
    of sigma_{n+1} + sqrt(tail/n); the density-weighted (and uniform point)
    channels are compared against the oversampled benchmark sqrt(tail/n).
    """
    bench = spectrum.benchmark_bound(n)
    if cfg_channel == channels.GAUSS and cfg_density == channels.PLAIN:
        return 5.0 * (spectrum.axis_or_zero(n + 1) + bench)
    return bench


@dataclass(eq=False)
class WceSummary:
    config: dict
    rows: list[dict] = field(default_factory=list)
    by_n: dict = field(default_factory=dict)

    @property
    def columns(self) -> list[str]:
        return WCE_COLUMNS

    def digest(self) -> dict:
        return {"config": self.config, "by_n": self.by_n}


def run_wce_trials(cfg: TrialConfig, salt: int = _SALTS["wce"]) -> WceSummary:
    """Draw, assemble, check, and measure the exact worst-case error.

    Each row records the spectral certificate (alpha_hat, beta_hat), the
    exact truncated worst-case error, its certified bound
    sigma_{n+1} + beta/alpha, the per-channel theorem bound, and the
    truncation bias.  Rank-deficient draws keep pass=false and fall back to
    the zero estimator; aggregates count them as bound violations.
    """
    cfg.spectrum.require_square_summable()
    summary = WceSummary(config=cfg.echo())
    for n in cfg.n_values:
        n_info = n if cfg.density == channels.OPTIMAL else cfg.resolve_n_info(n)
        dim = cfg.resolve_dim(n, n_info)
        spectrum = cfg.spectrum.with_dim(dim)
        basis = TRIG if cfg.channel == channels.POINT else COORDINATE
        model = ModelSpace(spectrum, basis)
        bound_ref = theorem_bound(cfg.channel, cfg.density, spectrum, n)
        sigma_next = spectrum.axis_or_zero(n + 1)
        sigma_floor = spectrum.axis_or_zero(n_info + 1)
        cell_key = mix64(mix64(cfg.master_seed, salt), n)

        def one_trial(t: int, _model=model, _n=n, _n_info=n_info, _key=cell_key):
            seed = mix64(_key, t)
            rng = trial_rng(_key, t)
            draw = _draw_for(cfg, _model, _n, _n_info, rng, seed)
            mats = recovery.assemble(draw, _model, _n)
            check = recovery.spectral_check(mats)
            wce = recovery.wce_exact(mats, _model.spectrum, check)
            return draw, check, wce, seed

        results = _map_trials(one_trial, cfg.trials)
        wces, ok_theorem, ok_sigma3, sandwich_bad, failed = [], 0, 0, 0, 0
        for draw, check, wce, seed in results:
            bias = recovery.truncation_bias(check, spectrum)
            row = {
                "channel": cfg.channel,
                "density": cfg.density,
                "n": n,
                "N": n_info,
                "M": dim,
                "alpha_hat": check.alpha_hat,
                "beta_hat": check.beta_hat,
                "wce_exact": wce,
                "wce_bound": recovery.wce_bound(check, spectrum, n),
                "theorem_bound": bound_ref,
                "truncation_bias": bias,
                "pass": check.passed,
                "seed": seed,
            }
            summary.rows.append(row)
            wces.append(wce)
            ok_theorem += wce <= bound_ref
            ok_sigma3 += wce <= 3.0 * sigma_next
            if check.passed:
                lower = sigma_floor - bias - 1e-9
                upper = row["wce_bound"] + 1e-9
                if not lower <= wce <= upper:
                    sandwich_bad += 1
            else:
                failed += 1
        summary.by_n[str(n)] = {
            "N": n_info,
            "M": dim,
            "pass_fraction_theorem": ok_theorem / cfg.trials,
            "pass_fraction_sigma3": ok_sigma3 / cfg.trials,
            "failed_checks": failed,
            "sandwich_violations": sandwich_bad,
            "wce_quantiles": quantile_table(wces),
            "theorem_bound": bound_ref,
            "sigma_next": sigma_next,
        }
    return summary


def run_gaussian_theorem(
    spectrum: Spectrum,
    n_values,
    trials: int,
    master_seed: int,
    dim: int | None = None,
) -> WceSummary:
    """Plain Gaussian draws with N = 2n against the constant-5 bound."""
    cfg = TrialConfig(
        channel=channels.GAUSS,
        density=channels.PLAIN,
        spectrum=spectrum,
        n_values=tuple(n_values),
        trials=trials,
        master_seed=master_seed,
        double_n=True,
        dim=dim,
    )
    return run_wce_trials(cfg, salt=_SALTS["gaussian"])


# -- coefficient coverage (coupon collector) ----------------------------


def fourier_radius(observed, spectrum: Spectrum) -> tuple[float, int]:
    """Radius of coefficient information: sigma at the smallest unobserved
    index (optimal recovery zero-fills unobserved coordinates).

    Returns (radius, min_missing); when every index up to the truncation is
    observed the radius degrades to the beyond-truncation proxy
    sigma_{M+1} with min_missing = M + 1.
    """
    seen = np.zeros(spectrum.dim + 1, dtype=bool)
    idx = np.asarray(list(observed), dtype=int)
    if idx.size:
        if idx.min() < 1 or idx.max() > spectrum.dim:
            raise ValueError("observed indices must lie in 1..M")
        seen[idx - 1] = True
    missing = np.flatnonzero(~seen[: spectrum.dim])
    min_missing = int(missing[0]) + 1 if missing.size else spectrum.dim + 1
    return spectrum.axis_or_zero(min_missing), min_missing


@dataclass(eq=False)
class CouponReport:
    config: dict
    rows: list[dict]
    coverage_probability: float  # all of 1..n observed
    prob_radius_ge_head: float  # radius >= sigma_n
    prob_radius_le_next: float  # radius <= sigma_{n+1}
    radius_quantiles: dict

    columns = ["n", "N", "trial", "seed", "radius", "min_missing", "covered"]

    def digest(self) -> dict:
        return {
            "config": self.config,
            "coverage_probability": self.coverage_probability,
            "prob_radius_ge_head": self.prob_radius_ge_head,
            "prob_radius_le_next": self.prob_radius_le_next,
            "radius_quantiles": self.radius_quantiles,
        }


def run_coupon(
    spectrum: Spectrum,
    n: int,
    n_info: int,
    trials: int,
    master_seed: int,
    dim: int | None = None,
) -> CouponReport:
    """Sample coefficient indices from the rho_n table and record the radius
    of the observed set; with too few draws some head index is missed and
    the radius stays at head scale."""
    dim = dim if dim is not None else default_truncation(n, max(n_info, 1))
    spectrum = spectrum.with_dim(dim)
    cell_key = mix64(mix64(master_seed, _SALTS["coupon"]), n)
    table, _ = channels.fourier_density_table(spectrum, n)

    def one_trial(t: int):
        seed = mix64(cell_key, t)
        rng = trial_rng(cell_key, t)
        idx = rng.choice(spectrum.dim, size=n_info, p=table) + 1 if n_info else np.array([], int)
        radius, min_missing = fourier_radius(idx, spectrum)
        return seed, radius, min_missing

    results = _map_trials(one_trial, trials)
    rows, radii, covered, ge_head, le_next = [], [], 0, 0, 0
    sig_head = spectrum.semi_axes[n - 1]
    sig_next = spectrum.axis_or_zero(n + 1)
    for t, (seed, radius, min_missing) in enumerate(results):
        is_covered = min_missing > n
        rows.append(
            {
                "n": n,
                "N": n_info,
                "trial": t,
                "seed": seed,
                "radius": radius,
                "min_missing": min_missing,
                "covered": is_covered,
            }
        )
        radii.append(radius)
        covered += is_covered
        ge_head += radius >= sig_head
        le_next += radius <= sig_next
    config = {
        "spectrum": spectrum.to_json(),
        "n": n,
        "N": n_info,
        "trials": trials,
        "master_seed": master_seed,
    }
    return CouponReport(
        config,
        rows,
        covered / trials,
        ge_head / trials,
        le_next / trials,
        quantile_table(radii),
    )


# -- concentration of the empirical second-moment matrix -----------------


@dataclass(eq=False)
class ConcentrationSummary:
    config: dict
    rows: list[dict]
    by_n: dict

    columns = ["channel", "n", "N", "trial", "seed", "stat", "below_half"]

    def digest(self) -> dict:
        return {"config": self.config, "by_n": self.by_n}


def run_concentration(cfg: TrialConfig) -> ConcentrationSummary:
    """Distribution of the spectral deviation statistic per (n, N)."""
    if cfg.density != channels.RHO:
        raise ValueError("the concentration statistic needs a density-weighted draw")
    cfg.spectrum.require_square_summable()
    out = ConcentrationSummary(config=cfg.echo(), rows=[], by_n={})
    for n in cfg.n_values:
        n_info = cfg.resolve_n_info(n)
        dim = cfg.resolve_dim(n, n_info)
        spectrum = cfg.spectrum.with_dim(dim)
        basis = TRIG if cfg.channel == channels.POINT else COORDINATE
        model = ModelSpace(spectrum, basis)
        cell_key = mix64(mix64(cfg.master_seed, _SALTS["concentration"]), n)

        def one_trial(t: int, _model=model, _n=n, _n_info=n_info, _key=cell_key):
            seed = mix64(_key, t)
            rng = trial_rng(_key, t)
            draw = _draw_for(cfg, _model, _n, _n_info, rng, seed)
            return seed, recovery.concentration_stat(draw, _model, _n)

        results = _map_trials(one_trial, cfg.trials)
        below = 0
        for t, (seed, stat) in enumerate(results):
            ok = stat <= 0.5
            below += ok
            out.rows.append(
                {
                    "channel": cfg.channel,
                    "n": n,
                    "N": n_info,
                    "trial": t,
                    "seed": seed,
                    "stat": stat,
                    "below_half": ok,
                }
            )
        out.by_n[str(n)] = {
            "N": n_info,
            "fraction_below_half": below / cfg.trials,
            "stat_quantiles": quantile_table([r["stat"] for r in out.rows if r["n"] == n]),
        }
    return out


# -- geometry of iid uniform point sets ----------------------------------


@dataclass(eq=False)
class SobolevSummary:
    config: dict
    rows: list[dict]
    columns: list[str]
    fits: dict
    ratio_band: dict

    def digest(self) -> dict:
        return {
            "config": self.config,
            "fits": {k: f.to_json() for k, f in self.fits.items()},
            "ratio_band": self.ratio_band,
        }


def run_sobolev_rates(
    d: int,
    gammas,
    n_grid,
    trials: int,
    master_seed: int,
    grid: int = 512,
) -> SobolevSummary:
    """Mean covering radius and distance norms of iid uniform sets per n,
    with log-log slope fits and the covering-radius ratio
    h * n^(1/d) / (ln n)^(1/d) tabulated across the grid."""
    if d not in (1, 2):
        raise ValueError("d must be 1 or 2")
    gammas = [float(g) for g in gammas]
    n_grid = [int(n) for n in n_grid]
    gcols = [f"norm_gamma_{g:g}" for g in gammas]
    columns = ["d", "n", "trial", "seed", "covering_radius", *gcols]
    rows: list[dict] = []
    mean_h, mean_norms = [], {g: [] for g in gammas}
    for n in n_grid:
        cell_key = mix64(mix64(master_seed, _SALTS["sobolev"]), n)

        def one_trial(t: int, _n=n, _key=cell_key):
            seed = mix64(_key, t)
            rng = trial_rng(_key, t)
            pts = PointSet(rng.random((_n, d)))
            h = covering_radius(pts, grid)
            norms = [dist_norm(pts, g, grid) for g in gammas]
            return seed, h, norms

        results = _map_trials(one_trial, trials)
        hs = []
        per_gamma = {g: [] for g in gammas}
        for t, (seed, h, norms) in enumerate(results):
            row = {"d": d, "n": n, "trial": t, "seed": seed, "covering_radius": h}
            row.update({c: v for c, v in zip(gcols, norms)})
            rows.append(row)
            hs.append(h)
            for g, v in zip(gammas, norms):
                per_gamma[g].append(v)
        mean_h.append(float(np.mean(hs)))
        for g in gammas:
            mean_norms[g].append(float(np.mean(per_gamma[g])))
    fits = {"covering_radius": fit_loglog(n_grid, mean_h)}
    for g in gammas:
        fits[f"norm_gamma_{g:g}"] = fit_loglog(n_grid, mean_norms[g])
    ratios = [
        h * n ** (1.0 / d) / math.log(n) ** (1.0 / d) for h, n in zip(mean_h, n_grid)
    ]
    ratio_band = {
        "ratios": ratios,
        "max_over_min": max(ratios) / min(ratios),
    }
    config = {
        "d": d,
        "gammas": gammas,
        "n_grid": n_grid,
        "trials": trials,
        "master_seed": master_seed,
        "grid": grid,
    }
    return SobolevSummary(config, rows, columns, fits, ratio_band)


# -- moving least squares rates ------------------------------------------


@dataclass(eq=False)
class MlsRateSummary:
    config: dict
    rows: list[dict]
    fits: dict  # name -> RateFit | None (None when errors sit at noise floor)
    mean_errors: dict

    columns = ["fn", "s", "q", "n", "trial", "seed", "error"]

    def digest(self) -> dict:
        return {
            "config": self.config,
            "fits": {k: (f.to_json() if f else None) for k, f in self.fits.items()},
            "mean_errors": self.mean_errors,
        }


NOISE_FLOOR = 1e-8


def run_mls_rates(
    smoothness: int,
    q: float,
    test_functions: dict,
    n_grid,
    trials: int,
    master_seed: int,
    grid: int = 256,
    window_multiplier: float = 2.0,
) -> MlsRateSummary:
    """Error of the moving least squares fit on iid uniform samples.

    The local fits use ``smoothness`` Taylor coefficients, i.e. degree
    s - 1: the minimal degree whose local remainder scales like the
    smoothness-s class rate h^s.  (A degree-s fit superconverges on smooth
    test functions and would not display the class rate.)  Per test
    function the mean discrete L_q error over trials is slope-fitted
    against n; functions reproduced exactly (errors below the noise floor)
    skip the fit.
    """
    if smoothness < 1:
        raise ValueError("smoothness must be a positive integer")
    degree = smoothness - 1
    n_grid = [int(n) for n in n_grid]
    rows: list[dict] = []
    mean_errors = {name: [] for name in test_functions}
    for n in n_grid:
        cell_key = mix64(mix64(master_seed, _SALTS["mls"]), n)

        def one_trial(t: int, _n=n, _key=cell_key):
            seed = mix64(_key, t)
            rng = trial_rng(_key, t)
            xs = rng.random(_n)
            errs = {}
            for name, fn in test_functions.items():
                est = MovingLeastSquares(degree, window_multiplier).fit(xs, fn(xs))
                errs[name] = error_norm(fn, est, q, grid)
            return seed, errs

        results = _map_trials(one_trial, trials)
        for name in test_functions:
            vals = []
            for t, (seed, errs) in enumerate(results):
                rows.append(
                    {
                        "fn": name,
                        "s": smoothness,
                        "q": q,
                        "n": n,
                        "trial": t,
                        "seed": seed,
                        "error": errs[name],
                    }
                )
                vals.append(errs[name])
            mean_errors[name].append(float(np.mean(vals)))
    fits = {}
    for name in test_functions:
        means = mean_errors[name]
        if max(means) < NOISE_FLOOR:
            fits[name] = None
        else:
            fits[name] = fit_loglog(n_grid, means)
    config = {
        "s": smoothness,
        "degree": degree,
        "q": q,
        "functions": sorted(test_functions),
        "n_grid": n_grid,
        "trials": trials,
        "master_seed": master_seed,
        "grid": grid,
        "window_multiplier": window_multiplier,
    }
    return MlsRateSummary(config, rows, fits, mean_errors)
