"""Sequence-space model: trigonometric basis, coefficient vectors, norms.

Functions are represented by their coefficients against an L2([0,1])
orthonormal system ``b_1 = 1, b_{2j} = sqrt(2) cos(2 pi j x),
b_{2j+1} = sqrt(2) sin(2 pi j x)``.  With this index convention the partial
sums ``sum_{k<=n} b_k(x)^2`` equal n for every x whenever n is odd, so the
head term of the optimal sampling density is constant and uniformly bounded
by 2.  Channels that never evaluate pointwise (random coefficients, Gaussian
functionals) use the abstract coordinate basis instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectra import Spectrum

SQRT2 = float(np.sqrt(2.0))

TRIG = "trig"
COORDINATE = "coordinate"


class UnsupportedBasisError(TypeError):
    """Raised when an operation needs pointwise evaluation but the model
    carries the abstract coordinate basis."""


def eval_basis(k: int, x) -> np.ndarray | float:
    """Value of the k-th trigonometric basis function at x (1-indexed)."""
    if k < 1:
        raise IndexError("basis index starts at 1")
    x = np.asarray(x, dtype=float)
    if k == 1:
        out = np.ones_like(x)
    elif k % 2 == 0:
        out = SQRT2 * np.cos(2.0 * np.pi * (k // 2) * x)
    else:
        out = SQRT2 * np.sin(2.0 * np.pi * (k // 2) * x)
    return float(out) if out.ndim == 0 else out


def basis_matrix(xs, dim: int) -> np.ndarray:
    """Matrix B with B[i, k-1] = b_k(x_i) for k = 1..dim, vectorized."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    out = np.empty((xs.size, dim))
    out[:, 0] = 1.0
    if dim == 1:
        return out
    n_cos = dim // 2
    ang = (2.0 * np.pi) * xs[:, None] * np.arange(1, n_cos + 1, dtype=float)[None, :]
    out[:, 1::2] = SQRT2 * np.cos(ang)
    n_sin = (dim - 1) // 2
    if n_sin:
        out[:, 2::2] = SQRT2 * np.sin(ang[:, :n_sin])
    return out


@dataclass(frozen=True, eq=False)
class ModelSpace:
    """A spectrum together with the basis its coefficients refer to."""

    spectrum: Spectrum
    basis: str = TRIG

    def __post_init__(self):
        if self.basis not in (TRIG, COORDINATE):
            raise ValueError(f"unknown basis {self.basis!r}")

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    def require_trig(self) -> None:
        if self.basis != TRIG:
            raise UnsupportedBasisError(
                "pointwise evaluation needs the trigonometric basis"
            )


def as_coefficients(c, dim: int | None = None) -> np.ndarray:
    """Validate and zero-pad a coefficient vector."""
    c = np.asarray(c, dtype=float)
    if c.ndim != 1:
        raise ValueError("coefficient vectors are one-dimensional")
    if dim is not None:
        if c.size > dim:
            raise ValueError(f"coefficient vector longer than dimension {dim}")
        if c.size < dim:
            c = np.concatenate([c, np.zeros(dim - c.size)])
    return c


def eval_function(model: ModelSpace, coef, x) -> np.ndarray | float:
    """Evaluate sum_k c_k b_k(x) pointwise (trigonometric basis only)."""
    model.require_trig()
    coef = as_coefficients(coef, model.dim)
    scalar = np.ndim(x) == 0
    vals = basis_matrix(x, model.dim) @ coef
    return float(vals[0]) if scalar else vals


def norms(model: ModelSpace, coef) -> tuple[float, float]:
    """(L2 norm, ellipsoid norm) of a coefficient vector.

    The L2 norm is the Euclidean norm of the coefficients; the ellipsoid
    norm divides each coefficient by its semi-axis before summing squares.
    """
    coef = as_coefficients(coef, model.dim)
    l2 = float(np.linalg.norm(coef))
    h = float(np.linalg.norm(coef / model.spectrum.semi_axes))
    return l2, h


def project_head(coef, n: int) -> np.ndarray:
    """Keep the first n coefficients, zero the rest."""
    coef = np.asarray(coef, dtype=float)
    if not 0 <= n <= coef.size:
        raise ValueError(f"projection index {n} out of range 0..{coef.size}")
    out = np.zeros_like(coef)
    out[:n] = coef[:n]
    return out


def unit_ball_vector(model: ModelSpace, rng: np.random.Generator) -> np.ndarray:
    """Random coefficient vector with ellipsoid norm exactly 1."""
    u = rng.standard_normal(model.dim)
    u /= np.linalg.norm(u)
    return model.spectrum.semi_axes * u
