"""Command-line front end: one subcommand per experiment family.

Flags can come from the command line or a JSON config file (``--config``);
inline flags win.  Each run writes ``<outdir>/<subcommand>-<seed>.csv`` with
per-trial rows and a matching ``.json`` digest that echoes the effective
configuration.  Exit codes: 0 success, 1 runtime refusal or I/O failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import channels, experiments
from .spectra import DivergentSpectrumError, SpectrumError, parse_spectrum

_TEST_FUNCTIONS = {
    "sin2pi": lambda x: np.sin(2.0 * np.pi * np.asarray(x, dtype=float)),
}

_DEFAULTS = {
    "wce": {
        "spectrum": "power_law:1.0",
        "channel": "fourier",
        "density": "rho",
        "n": [16, 32],
        "oversample": 5.0,
        "N": None,
        "M": None,
        "trials": 100,
    },
    "gaussian": {
        "spectrum": "power_law:1.0",
        "n": [16, 32, 64],
        "M": None,
        "trials": 100,
    },
    "coupon": {
        "spectrum": "power_law:1.0",
        "n": [64],
        "oversample": 0.5,
        "N": None,
        "M": None,
        "trials": 200,
    },
    "concentration": {
        "spectrum": "power_law:1.0",
        "channel": "fourier",
        "n": [32],
        "oversample": 5.0,
        "N": None,
        "M": None,
        "trials": 100,
    },
    "sobolev-dist": {
        "d": 1,
        "n_grid": "6:12",
        "gamma": [1.0, 2.0],
        "trials": 200,
        "grid": 512,
    },
    "mls": {
        "s": 2,
        "q": math.inf,
        "n_grid": "6:11",
        "trials": 100,
        "grid": 256,
    },
}


def parse_n_grid(text: str) -> list[int]:
    """``a:b`` means powers of two from 2^a to 2^b inclusive."""
    try:
        a, b = (int(v) for v in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad n-grid {text!r}: {exc}") from exc
    if a > b:
        raise argparse.ArgumentTypeError("n-grid bounds must be increasing")
    return [2**k for k in range(a, b + 1)]


def _float_or_inf(text: str) -> float:
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randinfo",
        description="Monte Carlo experiments on recovery from iid random information",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="master seed (default 7)")
        p.add_argument("--outdir", type=str, default=None, help="output directory (default .)")
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("-v", "--verbose", action="store_true")

    def spectral(p):
        p.add_argument("--spectrum", type=str, default=None, help="kind:params, e.g. power_law:1.0")
        p.add_argument("--n", type=int, nargs="+", default=None)
        p.add_argument("--N", type=int, default=None, help="explicit measurement count")
        p.add_argument("--M", type=int, default=None, help="working dimension override")
        p.add_argument("--oversample", type=float, default=None, help="C in N = C n ln n")

    p = sub.add_parser("wce", help="worst-case error of weighted least squares recovery")
    common(p)
    spectral(p)
    p.add_argument("--channel", choices=["point", "gauss", "fourier"], default=None)
    p.add_argument("--density", choices=["rho", "uniform", "plain"], default=None)

    p = sub.add_parser("gaussian", help="plain Gaussian draws with N = 2n")
    common(p)
    spectral(p)

    p = sub.add_parser("coupon", help="coefficient coverage lower bound")
    common(p)
    spectral(p)

    p = sub.add_parser("concentration", help="empirical second-moment deviation")
    common(p)
    spectral(p)
    p.add_argument("--channel", choices=["point", "gauss", "fourier"], default=None)

    p = sub.add_parser("sobolev-dist", help="distance-function statistics of uniform points")
    common(p)
    p.add_argument("--d", type=int, choices=[1, 2], default=None)
    p.add_argument("--n-grid", dest="n_grid", type=str, default=None, help="a:b for 2^a..2^b")
    p.add_argument("--gamma", type=_float_or_inf, nargs="+", default=None)
    p.add_argument("--grid", type=int, default=None, help="evaluation grid (d=2)")

    p = sub.add_parser("mls", help="moving least squares error rates")
    common(p)
    p.add_argument("--s", type=int, default=None, help="smoothness = local degree")
    p.add_argument("--q", type=_float_or_inf, default=None)
    p.add_argument("--n-grid", dest="n_grid", type=str, default=None)
    p.add_argument("--grid", type=int, default=None, help="error evaluation grid")

    p = sub.add_parser("all", help="run every experiment at reduced desk scale")
    common(p)

    return parser


def effective_config(command: str, args: argparse.Namespace) -> dict:
    """defaults <- config file <- explicit flags."""
    merged = dict(_DEFAULTS.get(command, {}))
    merged.setdefault("seed", 7)
    merged.setdefault("outdir", ".")
    if getattr(args, "config", None):
        with open(args.config) as fh:
            merged.update(json.load(fh))
    for key, value in vars(args).items():
        if key in ("command", "config", "verbose"):
            continue
        if value is not None:
            merged[key] = value
    return merged


def _echo(verbose: bool, message: str) -> None:
    if verbose:
        print(message, file=sys.stderr)


def _emit(outdir: str, name: str, seed: int, columns, rows, digest) -> list[Path]:
    from .reporting import write_csv, write_json

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{name}-{seed}.csv"
    json_path = out / f"{name}-{seed}.json"
    write_csv(csv_path, columns, rows)
    write_json(json_path, digest)
    return [csv_path, json_path]


def _run_wce(cfg: dict, name: str = "wce") -> tuple[list, dict, list[str]]:
    tc = experiments.TrialConfig(
        channel=cfg["channel"],
        density=cfg["density"],
        spectrum=parse_spectrum(cfg["spectrum"]),
        n_values=tuple(cfg["n"]),
        trials=cfg["trials"],
        master_seed=cfg["seed"],
        oversample=cfg["oversample"],
        n_info=cfg["N"],
        dim=cfg["M"],
    )
    summary = experiments.run_wce_trials(tc)
    return summary.rows, summary.digest(), summary.columns


def _run_gaussian(cfg: dict) -> tuple[list, dict, list[str]]:
    summary = experiments.run_gaussian_theorem(
        parse_spectrum(cfg["spectrum"]), cfg["n"], cfg["trials"], cfg["seed"], dim=cfg["M"]
    )
    return summary.rows, summary.digest(), summary.columns


def _run_coupon(cfg: dict) -> tuple[list, dict, list[str]]:
    spectrum = parse_spectrum(cfg["spectrum"])
    rows, digests = [], {}
    for n in cfg["n"]:
        if cfg["N"] is not None:
            n_info = cfg["N"]
        else:
            n_info = int(cfg["oversample"] * n * math.log(n))
        report = experiments.run_coupon(
            spectrum, n, n_info, cfg["trials"], cfg["seed"], dim=cfg["M"]
        )
        rows.extend(report.rows)
        digests[str(n)] = report.digest()
    return rows, digests, experiments.CouponReport.columns


def _run_concentration(cfg: dict) -> tuple[list, dict, list[str]]:
    tc = experiments.TrialConfig(
        channel=cfg["channel"],
        density=channels.RHO,
        spectrum=parse_spectrum(cfg["spectrum"]),
        n_values=tuple(cfg["n"]),
        trials=cfg["trials"],
        master_seed=cfg["seed"],
        oversample=cfg["oversample"],
        n_info=cfg["N"],
        dim=cfg["M"],
    )
    summary = experiments.run_concentration(tc)
    return summary.rows, summary.digest(), summary.columns


def _run_sobolev(cfg: dict) -> tuple[list, dict, list[str]]:
    summary = experiments.run_sobolev_rates(
        cfg["d"],
        cfg["gamma"],
        parse_n_grid(cfg["n_grid"]) if isinstance(cfg["n_grid"], str) else cfg["n_grid"],
        cfg["trials"],
        cfg["seed"],
        grid=cfg["grid"],
    )
    return summary.rows, summary.digest(), summary.columns


def _run_mls(cfg: dict) -> tuple[list, dict, list[str]]:
    summary = experiments.run_mls_rates(
        cfg["s"],
        cfg["q"],
        _TEST_FUNCTIONS,
        parse_n_grid(cfg["n_grid"]) if isinstance(cfg["n_grid"], str) else cfg["n_grid"],
        cfg["trials"],
        cfg["seed"],
        grid=cfg["grid"],
    )
    return summary.rows, summary.digest(), summary.columns


_RUNNERS = {
    "wce": _run_wce,
    "gaussian": _run_gaussian,
    "coupon": _run_coupon,
    "concentration": _run_concentration,
    "sobolev-dist": _run_sobolev,
    "mls": _run_mls,
}

# reduced desk-scale configuration for the end-to-end run
_ALL_PARTS = {
    "wce": {"n": [8, 16], "trials": 20},
    "gaussian": {"n": [16, 32], "trials": 20},
    "coupon": {"n": [32], "trials": 50},
    "concentration": {"n": [16], "trials": 20},
    "sobolev-dist": {"n_grid": "5:9", "trials": 50},
    "mls": {"n_grid": "5:8", "trials": 20},
}


def run(command: str, cfg: dict, verbose: bool = False) -> int:
    if command == "all":
        index = {}
        for part, overrides in _ALL_PARTS.items():
            part_cfg = dict(_DEFAULTS[part])
            part_cfg.update(overrides)
            part_cfg["seed"] = cfg["seed"]
            part_cfg["outdir"] = cfg["outdir"]
            if cfg.get("trials") is not None and "trials" in part_cfg:
                part_cfg["trials"] = cfg["trials"]
            _echo(verbose, f"[all] running {part}")
            rows, digest, columns = _RUNNERS[part](part_cfg)
            paths = _emit(cfg["outdir"], part, cfg["seed"], columns, rows, digest)
            index[part] = [str(p) for p in paths]
        _emit(cfg["outdir"], "all", cfg["seed"], ["part"], [{"part": p} for p in sorted(index)], index)
        return 0
    rows, digest, columns = _RUNNERS[command](cfg)
    paths = _emit(cfg["outdir"], command, cfg["seed"], columns, rows, digest)
    _echo(verbose, f"wrote {paths[0]} and {paths[1]}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = effective_config(args.command, args)
    try:
        return run(args.command, cfg, verbose=args.verbose)
    except DivergentSpectrumError as exc:
        print(f"refusal: {exc}", file=sys.stderr)
        return 1
    except (SpectrumError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
