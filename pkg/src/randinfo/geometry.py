"""Geometric quality of sampling point sets: distance function statistics.

The quality of an n-point set for recovering Sobolev-smooth functions is
governed by norms of its distance function ``dist(x, P) = min_y |x - y|``:
the sup norm (covering radius, the largest hole) decides the uniform-error
regimes while the L_gamma norms with gamma = s / (1/q - 1/p) decide the
averaged ones.  In one dimension everything about the sawtooth distance
function is exact via sorting; in two dimensions norms are evaluated on a
reported grid, which makes the covering radius a lower bound.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree


@dataclass(frozen=True, eq=False)
class PointSet:
    """Nonempty points in [0,1]^d, d in {1, 2}; 1-d sets are kept sorted."""

    coords: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.coords, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] not in (1, 2):
            raise ValueError("point sets live in [0,1]^d with d in {1, 2}")
        if pts.shape[0] == 0:
            raise ValueError("point set is empty")
        if (pts < 0).any() or (pts > 1).any():
            raise ValueError("coordinates must lie in [0, 1]")
        if pts.shape[1] == 1:
            pts = np.sort(pts, axis=0)
        object.__setattr__(self, "coords", pts)

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    @property
    def size(self) -> int:
        return self.coords.shape[0]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in self.coords:
                writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def read_csv(cls, path) -> "PointSet":
        with open(path, newline="") as fh:
            rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
        return cls(np.asarray(rows))


def _edge_and_gaps(ps: PointSet) -> tuple[float, float, np.ndarray]:
    xs = ps.coords[:, 0]
    return float(xs[0]), float(1.0 - xs[-1]), np.diff(xs)


def _grid_distances(ps: PointSet, grid: int) -> np.ndarray:
    side = np.linspace(0.0, 1.0, grid)
    gx, gy = np.meshgrid(side, side, indexing="ij")
    query = np.column_stack([gx.ravel(), gy.ravel()])
    dist, _ = cKDTree(ps.coords).query(query)
    return dist


def covering_radius(ps: PointSet, grid: int = 512) -> float:
    """sup_x dist(x, P): exact for d=1, grid lower bound for d=2."""
    if ps.d == 1:
        left, right, gaps = _edge_and_gaps(ps)
        interior = float(gaps.max() / 2.0) if gaps.size else 0.0
        return max(left, right, interior)
    return float(_grid_distances(ps, grid).max())


def dist_norm(ps: PointSet, gamma: float, grid: int = 512) -> float:
    """L_gamma([0,1]^d) norm of the distance function.

    d=1 integrates the sawtooth exactly: an edge segment of length e
    contributes e^(gamma+1)/(gamma+1), an interior gap g contributes
    2 (g/2)^(gamma+1)/(gamma+1).  gamma = inf delegates to the covering
    radius.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if math.isinf(gamma):
        return covering_radius(ps, grid)
    if ps.d == 1:
        left, right, gaps = _edge_and_gaps(ps)
        g1 = gamma + 1.0
        total = (left**g1 + right**g1) / g1
        if gaps.size:
            total += float(np.sum(2.0 * (gaps / 2.0) ** g1 / g1))
        return total ** (1.0 / gamma)
    dist = _grid_distances(ps, grid)
    return float(np.mean(dist**gamma) ** (1.0 / gamma))


def check_embedding(s: int, p: float, d: int) -> None:
    """Require the smoothness/integrability regime where point values make
    sense: s > d/p for 1 < p <= inf, s >= d for p = 1."""
    if s < 1:
        raise ValueError("smoothness must be a positive integer")
    if p == 1:
        if s < d:
            raise ValueError(f"embedding requires s >= d (s={s}, d={d}, p=1)")
    elif not s > d / p:
        raise ValueError(f"embedding requires s > d/p (s={s}, d={d}, p={p})")


def radius_proxy(ps: PointSet, s: int, p: float, q: float, grid: int = 512) -> float:
    """Asymptotic-equivalence proxy for the recovery power of a point set.

    For q >= p the largest hole decides: h^(s - d (1/p - 1/q)).  For q < p
    an averaged hole size does: ||dist||_{L_gamma}^s with
    gamma = s / (1/q - 1/p).  Constants are unknown, so only slopes of this
    proxy are meaningful.
    """
    if not 1 <= p <= math.inf or not 1 <= q <= math.inf:
        raise ValueError("integrability exponents live in [1, inf]")
    check_embedding(s, p, ps.d)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    if q >= p:
        h = covering_radius(ps, grid)
        return h ** (s - ps.d * (inv_p - inv_q))
    gamma = s / (inv_q - inv_p)
    return dist_norm(ps, gamma, grid) ** s


@dataclass(frozen=True)
class DistReport:
    """Covering radius and L_gamma norms of one point set."""

    covering_radius: float
    l_gamma_norms: dict
    method: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "covering_radius": self.covering_radius,
                "l_gamma_norms": {str(k): v for k, v in self.l_gamma_norms.items()},
                "method": self.method,
            }
        )


def distance_report(ps: PointSet, gammas, grid: int = 512) -> DistReport:
    norms = {float(g): dist_norm(ps, float(g), grid) for g in gammas}
    method = "exact-1d" if ps.d == 1 else f"grid-2d:{grid}"
    return DistReport(covering_radius(ps, grid), norms, method)
