"""Moving least squares on [0,1]: local weighted polynomial fits.

At a query point x the ``ceil(kappa * (m+1))`` nearest samples form the
window (a two-sided interval; near the boundary it is naturally one-sided),
the length scale is twice the distance to the farthest window point, and a
degree-m polynomial is fitted under the compact bump weight
``(1 - t^2)_+^2``.  Window points satisfy |t| <= 1/2 so every weight is at
least (3/4)^2 and each local problem is overdetermined by construction.
The fit reproduces polynomials of degree up to m exactly.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator


def bump_weight(t: np.ndarray) -> np.ndarray:
    """Compact weight profile (1 - t^2)_+^2."""
    return np.clip(1.0 - t * t, 0.0, None) ** 2


class MovingLeastSquares(BaseEstimator):
    """Scattered-data approximation by local weighted polynomial fits.

    Parameters
    ----------
    degree : int
        Local polynomial degree m; degree-m functions are reproduced.
    window_multiplier : float
        kappa; each window holds ceil(kappa * (degree+1)) nearest samples.
    """

    def __init__(self, degree: int = 1, window_multiplier: float = 2.0):
        self.degree = degree
        self.window_multiplier = window_multiplier

    def _window_size(self) -> int:
        return math.ceil(self.window_multiplier * (self.degree + 1))

    def fit(self, X, y):
        xs = np.asarray(X, dtype=float).ravel()
        ys = np.asarray(y, dtype=float).ravel()
        if xs.size != ys.size:
            raise ValueError("sample locations and values differ in length")
        if (xs < 0).any() or (xs > 1).any():
            raise ValueError("sample locations must lie in [0, 1]")
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        if xs.size < self._window_size():
            raise ValueError(
                f"need at least {self._window_size()} samples for degree "
                f"{self.degree} with multiplier {self.window_multiplier}"
            )
        order = np.argsort(xs)
        self.x_ = xs[order]
        self.y_ = ys[order]
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "x_"):
            raise AttributeError("estimator is not fitted yet; call fit first")
        queries = np.atleast_1d(np.asarray(X, dtype=float)).ravel()
        if (queries < 0).any() or (queries > 1).any():
            raise ValueError("queries must lie in [0, 1]")
        return np.array([self._fit_at(x) for x in queries])

    def _fit_at(self, x: float) -> float:
        xs, ys = self.x_, self.y_
        w = self._window_size()
        n = xs.size
        # nearest w points form a contiguous block of the sorted samples;
        # scan the candidate shifts for the minimal farthest distance
        pos = int(np.searchsorted(xs, x))
        lo_min = max(0, pos - w)
        lo_max = min(pos, n - w)
        best_lo, best_far = lo_min, math.inf
        for lo in range(lo_min, lo_max + 1):
            far = max(abs(x - xs[lo]), abs(xs[lo + w - 1] - x))
            if far < best_far:
                best_lo, best_far = lo, far
        sel = slice(best_lo, best_lo + w)
        delta = 2.0 * best_far
        if delta == 0.0:
            return float(np.mean(ys[sel]))
        t = (xs[sel] - x) / delta
        wts = np.sqrt(bump_weight(t))
        design = np.vander(t, self.degree + 1, increasing=True) * wts[:, None]
        coef, *_ = np.linalg.lstsq(design, wts * ys[sel], rcond=None)
        return float(coef[0])


def error_norm(f_true, estimator: MovingLeastSquares, q: float, grid: int) -> float:
    """Discrete L_q norm of (f_true - fit) over the nested grid {j / grid}."""
    if grid < 1:
        raise ValueError("grid must be positive")
    xs = np.arange(grid + 1) / grid
    diff = np.abs(np.asarray(f_true(xs), dtype=float) - estimator.predict(xs))
    if math.isinf(q):
        return float(diff.max())
    return float(np.mean(diff**q) ** (1.0 / q))
