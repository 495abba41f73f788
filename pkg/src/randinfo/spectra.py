"""Nonincreasing spectra defining Hilbert ellipsoids.

A spectrum is a positive nonincreasing sequence sigma_1 >= sigma_2 >= ... > 0
truncated at a working dimension M.  It plays two roles: the semi-axes of the
ellipsoid ``{f : sum_k <f,b_k>^2 / sigma_k^2 <= 1}`` against an L2-orthonormal
basis, and the benchmark for how well that ellipsoid can be recovered from n
measurements (the optimal worst-case error with n linear functionals is
sigma_{n+1}).

All computations are finite-rank: sums over k run up to M, and the neglected
remainder beyond M is reported separately so the truncation bias stays
auditable.  Square-summability of the infinite sequence is tracked per kind;
spectra with a divergent tail are usable but flagged, and theorem-style bound
comparisons refuse to run on them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

KINDS = ("power_law", "power_log", "geometric", "explicit")


class SpectrumError(ValueError):
    pass


class DivergentSpectrumError(SpectrumError):
    """Raised when an operation requires a square-summable spectrum."""


def default_truncation(n: int, n_info: int) -> int:
    """Default working dimension for a run with subspace dimension n and
    n_info measurements: max(8 * n_info, 4 * n, 512)."""
    return max(8 * n_info, 4 * n, 512)


@dataclass(frozen=True)
class TailSum:
    """Sum of squared semi-axes strictly beyond an index, within truncation.

    value   -- sum_{n < k <= M} sigma_k^2
    beyond  -- estimate of the neglected remainder sum_{k > M} sigma_k^2
               (infinite when the series diverges)
    truncated_only -- True when the infinite series diverges, in which case
               ``value`` covers the truncated model only
    """

    value: float
    beyond: float
    truncated_only: bool


@dataclass(frozen=True, eq=False)
class Spectrum:
    kind: str
    dim: int
    alpha: float | None = None
    beta: float | None = None
    q: float | None = None
    explicit_values: tuple[float, ...] | None = None
    semi_axes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpectrumError(f"unknown spectrum kind {self.kind!r}")
        if self.dim < 1:
            raise SpectrumError("truncation dimension must be positive")
        k = np.arange(1, self.dim + 1, dtype=float)
        if self.kind == "power_law":
            if self.alpha is None or self.alpha <= 0:
                raise SpectrumError("power_law needs alpha > 0")
            vals = k ** (-self.alpha)
        elif self.kind == "power_log":
            if self.alpha is None or self.beta is None:
                raise SpectrumError("power_log needs alpha and beta")
            vals = k ** (-self.alpha) * (1.0 + np.log(k)) ** (-self.beta)
        elif self.kind == "geometric":
            if self.q is None or not 0 < self.q < 1:
                raise SpectrumError("geometric needs q in (0, 1)")
            vals = self.q ** k
        else:
            if not self.explicit_values:
                raise SpectrumError("explicit spectrum needs values")
            vals = np.asarray(self.explicit_values, dtype=float)
            if vals.size != self.dim:
                raise SpectrumError("explicit values must match dim")
        if not (vals > 0).all():
            raise SpectrumError("semi-axes must be strictly positive")
        if (np.diff(vals) > 1e-15).any():
            raise SpectrumError("semi-axes must be nonincreasing")
        object.__setattr__(self, "semi_axes", vals)

    # -- constructors -------------------------------------------------

    @classmethod
    def power_law(cls, alpha: float, dim: int = 512) -> "Spectrum":
        return cls(kind="power_law", dim=dim, alpha=alpha)

    @classmethod
    def power_log(cls, alpha: float, beta: float, dim: int = 512) -> "Spectrum":
        return cls(kind="power_log", dim=dim, alpha=alpha, beta=beta)

    @classmethod
    def geometric(cls, q: float, dim: int = 512) -> "Spectrum":
        return cls(kind="geometric", dim=dim, q=q)

    @classmethod
    def explicit(cls, values) -> "Spectrum":
        values = tuple(float(v) for v in values)
        return cls(kind="explicit", dim=len(values), explicit_values=values)

    # -- evaluation ---------------------------------------------------

    @property
    def square_summable(self) -> bool:
        """Whether the untruncated series sum_k sigma_k^2 converges."""
        if self.kind == "power_law":
            return self.alpha > 0.5
        if self.kind == "power_log":
            return self.alpha > 0.5 or (self.alpha == 0.5 and self.beta > 0.5)
        return True

    def semi_axis(self, k: int) -> float:
        """sigma_k (1-indexed).  Beyond the truncation, analytic kinds keep
        following their formula; the explicit kind raises."""
        if k < 1:
            raise IndexError("semi-axis index starts at 1")
        if k <= self.dim:
            return float(self.semi_axes[k - 1])
        if self.kind == "power_law":
            return float(k ** (-self.alpha))
        if self.kind == "power_log":
            return float(k ** (-self.alpha) * (1.0 + math.log(k)) ** (-self.beta))
        if self.kind == "geometric":
            return float(self.q ** k)
        raise IndexError(f"index {k} beyond explicit spectrum of length {self.dim}")

    def axis_or_zero(self, k: int) -> float:
        """Like :meth:`semi_axis` but 0.0 beyond an explicit spectrum."""
        if self.kind == "explicit" and k > self.dim:
            return 0.0
        return self.semi_axis(k)

    def tail_sum(self, n: int) -> TailSum:
        """Sum of sigma_k^2 over n < k <= M, with a bias report beyond M.

        Closed forms are used where they exist (geometric series, Hurwitz
        zeta for power laws); other kinds fall back to direct summation.
        """
        if n < 0:
            raise SpectrumError("tail index must be nonnegative")
        n_eff = min(n, self.dim)
        if self.kind == "geometric":
            r = self.q**2
            value = r ** (n_eff + 1) * (1.0 - r ** (self.dim - n_eff)) / (1.0 - r)
            beyond = r ** (self.dim + 1) / (1.0 - r)
            return TailSum(float(value), float(beyond), False)
        if self.kind == "power_law" and self.alpha > 0.5:
            s = 2.0 * self.alpha
            value = zeta(s, n_eff + 1) - zeta(s, self.dim + 1)
            beyond = zeta(s, self.dim + 1)
            return TailSum(float(value), float(beyond), False)
        value = float(np.sum(self.semi_axes[n_eff:] ** 2))
        if self.kind == "explicit":
            return TailSum(value, 0.0, False)
        if not self.square_summable:
            return TailSum(value, math.inf, True)
        # remaining convergent case: power_log with alpha > 1/2 (or the
        # boundary alpha = 1/2, beta > 1/2); estimate the remainder as
        # sigma_{M+1}^2 times an effective residual count
        if self.alpha > 0.5:
            count = self.dim / (2.0 * self.alpha - 1.0)
        else:
            count = self.dim * (1.0 + math.log(self.dim)) / (2.0 * self.beta - 1.0)
        return TailSum(value, self.semi_axis(self.dim + 1) ** 2 * count, False)

    def benchmark_bound(self, n: int) -> float:
        """sqrt(tail_sum(n) / n): the recovery benchmark at n measurements."""
        if n < 1:
            raise SpectrumError("benchmark index must be positive")
        return math.sqrt(self.tail_sum(n).value / n)

    def require_square_summable(self) -> None:
        if not self.square_summable:
            raise DivergentSpectrumError(
                f"spectrum {self.describe()} has a divergent tail; "
                "bound comparisons are not meaningful"
            )

    def describe(self) -> str:
        if self.kind == "power_law":
            return f"power_law:{self.alpha:g}"
        if self.kind == "power_log":
            return f"power_log:{self.alpha:g},{self.beta:g}"
        if self.kind == "geometric":
            return f"geometric:{self.q:g}"
        return f"explicit[{self.dim}]"

    # -- serialization ------------------------------------------------

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "alpha": self.alpha,
            "beta": self.beta,
            "q": self.q,
            "values": list(self.explicit_values) if self.explicit_values else None,
            "M": self.dim,
        }

    @classmethod
    def from_json(cls, obj) -> "Spectrum":
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind = obj["kind"]
        if kind == "explicit":
            return cls.explicit(obj["values"])
        dim = int(obj.get("M") or 512)
        if kind == "power_law":
            return cls.power_law(float(obj["alpha"]), dim)
        if kind == "power_log":
            return cls.power_log(float(obj["alpha"]), float(obj["beta"]), dim)
        if kind == "geometric":
            return cls.geometric(float(obj["q"]), dim)
        raise SpectrumError(f"unknown spectrum kind {kind!r}")

    def with_dim(self, dim: int) -> "Spectrum":
        """Same spectrum truncated at a different working dimension."""
        if self.kind == "explicit":
            if dim != self.dim:
                raise SpectrumError("explicit spectra have a fixed dimension")
            return self
        return Spectrum(kind=self.kind, dim=dim, alpha=self.alpha, beta=self.beta, q=self.q)


def parse_spectrum(text: str, dim: int = 512) -> Spectrum:
    """Parse the CLI shorthand ``kind:params``.

    Examples: ``power_law:1.0``, ``power_log:1.0,0.5``, ``geometric:0.5``,
    ``explicit:1,0.5,0.1``.
    """
    kind, _, params = text.partition(":")
    kind = kind.strip()
    try:
        if kind == "power_law":
            return Spectrum.power_law(float(params), dim)
        if kind == "power_log":
            a, b = (float(v) for v in params.split(","))
            return Spectrum.power_log(a, b, dim)
        if kind == "geometric":
            return Spectrum.geometric(float(params), dim)
        if kind == "explicit":
            return Spectrum.explicit(float(v) for v in params.split(","))
    except SpectrumError:
        raise
    except ValueError as exc:
        raise SpectrumError(f"bad spectrum parameters {text!r}: {exc}") from exc
    raise SpectrumError(f"unknown spectrum kind {kind!r}")
