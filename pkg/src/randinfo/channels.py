"""Information channels: point evaluations, Gaussian functionals, coefficients.

Each channel draws iid linear functionals from a base measure under which the
channel is an L2 isometry (Lebesgue on [0,1] for point evaluation, the
standard Gaussian product measure for Gaussian functionals, the counting
measure for coefficient reads).  Importance-sampled draws use the density

    rho_n(l) = 1/2 [ (1/n) sum_{k<=n} l(b_k)^2
                     + sum_{k>n} sigma_k^2 l(b_k)^2 / sum_{k>n} sigma_k^2 ]

with weights w = 1/rho_n; the head term is the inverse Christoffel function
of the n-dimensional reconstruction space.  Plain draws (uniform points,
unweighted Gaussians) carry weight 1.

Samplers are pure given an explicit generator and record the stream seed so
draws replay exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .model import ModelSpace, as_coefficients, basis_matrix
from .spectra import Spectrum

POINT = "point"
GAUSS = "gauss"
FOURIER = "fourier"

RHO = "rho"  # density-weighted draws (weights 1/rho_n)
UNIFORM = "uniform"  # uniform points, weights 1
PLAIN = "plain"  # plain Gaussians, weights 1
OPTIMAL = "optimal"  # degenerate draw: coefficients 1..n, weights 1

# |b_k(x)|^2 <= 2 under the trig convention, so each of the two averaged
# terms of rho_n is at most 2; this is the rejection-sampling envelope.
ENVELOPE = 2.0


@dataclass(frozen=True, eq=False)
class Functional:
    """One admissible measurement: a point, a coordinate index, or a
    coefficient pattern against the coordinate basis."""

    kind: str
    at: float | None = None
    coords: np.ndarray | None = None
    index: int | None = None

    @classmethod
    def point_eval(cls, x: float) -> "Functional":
        if not 0.0 <= x <= 1.0:
            raise ValueError("evaluation points live in [0, 1]")
        return cls(kind=POINT, at=float(x))

    @classmethod
    def gaussian_coefs(cls, g) -> "Functional":
        return cls(kind=GAUSS, coords=np.asarray(g, dtype=float))

    @classmethod
    def fourier_index(cls, k: int) -> "Functional":
        if k < 1:
            raise ValueError("coefficient index starts at 1")
        return cls(kind=FOURIER, index=int(k))


def apply_functional(func: Functional, model: ModelSpace, coef) -> float:
    """l(f) for a function given by its coefficient vector."""
    coef = as_coefficients(coef, model.dim)
    if func.kind == POINT:
        model.require_trig()
        return float(basis_matrix(func.at, model.dim)[0] @ coef)
    if func.kind == GAUSS:
        g = as_coefficients(func.coords, model.dim)
        return float(g @ coef)
    if func.kind == FOURIER:
        if func.index > model.dim:
            raise IndexError(f"coefficient index {func.index} beyond dimension")
        return float(coef[func.index - 1])
    raise ValueError(f"unknown functional kind {func.kind!r}")


# -- densities ---------------------------------------------------------


def _tail_value(spectrum: Spectrum, n: int) -> float:
    tail = spectrum.tail_sum(n).value
    if tail <= 0.0:
        raise ZeroDivisionError("sampling density undefined: zero spectral tail")
    return tail


def point_density(model: ModelSpace, n: int, xs) -> np.ndarray:
    """rho_n at points of [0,1] for the evaluation channel (vectorized)."""
    model.require_trig()
    _check_head_dim(model.spectrum, n)
    sig = model.spectrum.semi_axes
    tail = _tail_value(model.spectrum, n)
    B = basis_matrix(xs, model.dim)
    head = np.einsum("ij,ij->i", B[:, :n], B[:, :n]) / n
    tail_term = (B[:, n:] ** 2) @ (sig[n:] ** 2) / tail
    return 0.5 * (head + tail_term)


def gauss_density(spectrum: Spectrum, n: int, coords) -> np.ndarray:
    """rho_n of Gaussian coefficient vectors, relative to the Gaussian
    base measure (rows of ``coords`` are functionals)."""
    _check_head_dim(spectrum, n)
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    tail = _tail_value(spectrum, n)
    head = np.einsum("ij,ij->i", coords[:, :n], coords[:, :n]) / n
    tail_term = (coords[:, n:] ** 2) @ (spectrum.semi_axes[n:] ** 2) / tail
    return 0.5 * (head + tail_term)


def fourier_density(spectrum: Spectrum, n: int, indices) -> np.ndarray:
    """Unrenormalized rho_n at coefficient indices (1-indexed)."""
    _check_head_dim(spectrum, n)
    indices = np.atleast_1d(np.asarray(indices, dtype=int))
    tail = _tail_value(spectrum, n)
    sig = spectrum.semi_axes[indices - 1]
    return np.where(indices <= n, 1.0 / (2.0 * n), sig**2 / (2.0 * tail))


def fourier_density_table(spectrum: Spectrum, n: int, dim: int | None = None):
    """Probability table over coefficient indices 1..dim.

    Returns ``(probabilities, normalization)`` where ``normalization`` is the
    mass of the unrenormalized density on 1..dim.  With tail sums taken
    within the truncation the mass is already 1 up to rounding, but the
    factor is reported so the renormalization stays visible.
    """
    dim = spectrum.dim if dim is None else dim
    if dim > spectrum.dim:
        raise ValueError("table dimension exceeds the spectrum truncation")
    raw = fourier_density(spectrum, n, np.arange(1, dim + 1))
    factor = float(raw.sum())
    return raw / factor, factor


def density_rho(model: ModelSpace, n: int, func: Functional) -> float:
    """rho_n evaluated at a single functional of any channel."""
    if func.kind == POINT:
        return float(point_density(model, n, [func.at])[0])
    if func.kind == GAUSS:
        return float(gauss_density(model.spectrum, n, func.coords)[0])
    if func.kind == FOURIER:
        return float(fourier_density(model.spectrum, n, [func.index])[0])
    raise ValueError(f"unknown functional kind {func.kind!r}")


def _check_head_dim(spectrum: Spectrum, n: int) -> None:
    if not 1 <= n < spectrum.dim:
        raise ValueError(f"need 1 <= n < M (got n={n}, M={spectrum.dim})")


# -- draws -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class InfoDraw:
    """A realized set of N information functionals with weights.

    ``data`` holds the channel payload: points (N,), Gaussian coordinate
    rows (N, M), or coefficient indices (N,).  All functionals of a draw
    share one channel; density-weighted draws satisfy w_i * rho(l_i) = 1.
    """

    channel: str
    density: str
    data: np.ndarray
    weights: np.ndarray
    n: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.channel not in (POINT, GAUSS, FOURIER):
            raise ValueError(f"unknown channel {self.channel!r}")
        if len(self.weights) != self.size:
            raise ValueError("one weight per functional required")
        if (np.asarray(self.weights) <= 0).any():
            raise ValueError("weights must be positive")

    @property
    def size(self) -> int:
        return self.data.shape[0]

    def functionals(self) -> list[Functional]:
        if self.channel == POINT:
            return [Functional.point_eval(x) for x in self.data]
        if self.channel == GAUSS:
            return [Functional.gaussian_coefs(row) for row in self.data]
        return [Functional.fourier_index(int(k)) for k in self.data]

    def to_json(self) -> dict:
        return {
            "channel": self.channel,
            "density": {"kind": self.density, "n": self.n},
            "functionals": self.data.tolist(),
            "weights": self.weights.tolist(),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj) -> "InfoDraw":
        if isinstance(obj, str):
            obj = json.loads(obj)
        channel = obj["channel"]
        dtype = int if channel == FOURIER else float
        return cls(
            channel=channel,
            density=obj["density"]["kind"],
            data=np.asarray(obj["functionals"], dtype=dtype),
            weights=np.asarray(obj["weights"], dtype=float),
            n=obj["density"]["n"],
            seed=obj["seed"],
        )


def sample_fourier(
    spectrum: Spectrum, n: int, n_info: int, rng: np.random.Generator, seed: int | None = None
) -> InfoDraw:
    """iid coefficient indices from the rho_n table, weights 1/rho_n."""
    table, _ = fourier_density_table(spectrum, n)
    indices = rng.choice(spectrum.dim, size=n_info, p=table) + 1
    weights = 1.0 / fourier_density(spectrum, n, indices)
    return InfoDraw(FOURIER, RHO, indices, weights, n=n, seed=seed)


def optimal_fourier_draw(n: int) -> InfoDraw:
    """Degenerate draw reading coefficients 1..n with unit weights; the
    reconstruction then equals the orthogonal projection onto the head."""
    return InfoDraw(FOURIER, OPTIMAL, np.arange(1, n + 1), np.ones(n), n=n)


def sample_points_rho(
    model: ModelSpace,
    n: int,
    n_info: int,
    rng: np.random.Generator,
    seed: int | None = None,
    batch: int = 1024,
) -> InfoDraw:
    """iid points from rho_n via rejection against the uniform proposal.

    Both averaged terms of rho_n are bounded by 2 under the trig convention,
    so the envelope constant 2 is valid; a proposal with rho_n(x) > 2 would
    indicate a broken basis convention and trips an assertion.
    """
    model.require_trig()
    _check_head_dim(model.spectrum, n)
    accepted: list[np.ndarray] = []
    total = 0
    while total < n_info:
        proposals = rng.random(batch)
        dens = point_density(model, n, proposals)
        if (dens > ENVELOPE * (1.0 + 1e-9)).any():
            raise AssertionError("sampling density exceeded its envelope")
        keep = proposals[rng.random(batch) * ENVELOPE <= dens]
        accepted.append(keep)
        total += keep.size
    xs = np.concatenate(accepted)[:n_info]
    weights = 1.0 / point_density(model, n, xs)
    return InfoDraw(POINT, RHO, xs, weights, n=n, seed=seed)


def sample_points_uniform(
    n_info: int, rng: np.random.Generator, seed: int | None = None
) -> InfoDraw:
    """iid uniform points on [0,1], unit weights (unweighted least squares)."""
    xs = rng.random(n_info)
    return InfoDraw(POINT, UNIFORM, xs, np.ones(n_info), seed=seed)


def sample_gaussian(
    model: ModelSpace,
    n: int,
    n_info: int,
    rng: np.random.Generator,
    weighted: bool = False,
    seed: int | None = None,
) -> InfoDraw:
    """iid Gaussian functionals: standard normal coordinate rows.

    Weighted mode draws exactly from rho_n relative to the Gaussian base
    measure and attaches w = 1/rho_n(g).  Since
    ``rho_n dgamma = 1/2 (1/n) sum_{k<=n} g_k^2 dgamma
    + 1/2 sum_{k>n} beta_k g_k^2 dgamma`` is a mixture whose components
    size-bias a single coordinate (density x^2 phi(x), sampled as a signed
    chi with three degrees of freedom), no rejection or importance
    correction is needed.  Plain mode keeps unit weights.
    """
    coords = rng.standard_normal((n_info, model.dim))
    if weighted:
        spectrum = model.spectrum
        _check_head_dim(spectrum, n)
        tail = _tail_value(spectrum, n)
        if n_info:
            beta = spectrum.semi_axes[n:] ** 2 / tail
            take_tail = rng.random(n_info) < 0.5
            k_head = rng.integers(0, n, size=n_info)
            k_tail = n + rng.choice(model.dim - n, size=n_info, p=beta / beta.sum())
            biased = np.where(take_tail, k_tail, k_head)
            magnitude = np.sqrt(rng.chisquare(3.0, size=n_info))
            sign = np.where(rng.random(n_info) < 0.5, -1.0, 1.0)
            coords[np.arange(n_info), biased] = sign * magnitude
        weights = 1.0 / gauss_density(spectrum, n, coords)
        return InfoDraw(GAUSS, RHO, coords, weights, n=n, seed=seed)
    if not 1 <= n <= model.dim:
        raise ValueError(f"need 1 <= n <= M (got n={n}, M={model.dim})")
    return InfoDraw(GAUSS, PLAIN, coords, np.ones(n_info), n=n, seed=seed)
