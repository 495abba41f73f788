"""Weighted least squares recovery and its exact worst-case error oracle.

Given a draw of N functionals with weights w_i, the estimator returns the
minimizer over the n-dimensional head space of ``sum_i w_i |l_i(f) - l_i(g)|^2``,
computed as ``G^+ y`` with G the N x n matrix of weighted basis measurements
``sqrt(w_i) l_i(b_k)`` and y the weighted data.  The two spectral quantities

    alpha_hat = s_n(G)                     (discretization quality)
    beta_hat  = s_1(sqrt(w_i) l_i(sigma_k b_k), k > n)   (tail leakage)

certify the recovery: whenever alpha_hat > 0 the worst-case L2 error over
the ellipsoid is at most sigma_{n+1} + beta_hat / alpha_hat, and it is never
below sigma_{N+1}.  The oracle here computes the truncated worst-case error
exactly as the top singular value of the (M) x (M-n) block matrix
``[-G^+ T_raw D_tail; D_tail]``: a function with unit ellipsoid norm has
tail coefficients D_tail u with |u| <= 1, its head reconstruction error is
-G^+ T_raw D_tail u and its untouched tail is D_tail u, so the worst case
is an operator norm.  That norm is found to machine precision from the
secular equation of the diagonal-plus-low-rank matrix D^2 + R^T R.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh
from sklearn.base import BaseEstimator

from .channels import FOURIER, GAUSS, POINT, InfoDraw
from .model import ModelSpace, as_coefficients, basis_matrix
from .spectra import Spectrum

RANK_RTOL = 1e-10


class ReconstructionError(RuntimeError):
    """Raised when the information matrix is numerically rank deficient."""

    def __init__(self, alpha_hat: float):
        super().__init__(
            f"information matrix is rank deficient (alpha_hat={alpha_hat:.3e})"
        )
        self.alpha_hat = alpha_hat


@dataclass(frozen=True, eq=False)
class InfoMatrices:
    """Weighted measurement matrices split at the reconstruction dimension.

    head        -- N x n, entries sqrt(w_i) l_i(b_k), k <= n
    tail_raw    -- N x (M-n), same for k > n
    tail_scaled -- tail_raw with column k multiplied by sigma_{n+k}
    """

    head: np.ndarray
    tail_raw: np.ndarray
    tail_scaled: np.ndarray
    n: int
    dim: int

    @property
    def n_info(self) -> int:
        return self.head.shape[0]


@dataclass(frozen=True)
class SpectralCheck:
    alpha_hat: float
    beta_hat: float
    head_top: float
    passed: bool


def evaluation_matrix(draw: InfoDraw, model: ModelSpace) -> np.ndarray:
    """N x M matrix of raw measurements l_i(b_k)."""
    if draw.channel == POINT:
        model.require_trig()
        return basis_matrix(draw.data, model.dim)
    if draw.channel == GAUSS:
        if draw.data.shape[1] != model.dim:
            raise ValueError("Gaussian coordinates do not match the dimension")
        return np.asarray(draw.data, dtype=float)
    if draw.channel == FOURIER:
        if (draw.data > model.dim).any():
            raise ValueError("coefficient index beyond the dimension")
        out = np.zeros((draw.size, model.dim))
        out[np.arange(draw.size), draw.data - 1] = 1.0
        return out
    raise ValueError(f"unknown channel {draw.channel!r}")


def assemble(draw: InfoDraw, model: ModelSpace, n: int) -> InfoMatrices:
    """Build the weighted head/tail matrices for reconstruction dimension n."""
    if not (0 < n <= draw.size and n <= model.dim):
        raise ValueError(
            f"need 0 < n <= min(N, M) (n={n}, N={draw.size}, M={model.dim})"
        )
    evals = evaluation_matrix(draw, model)
    sqw = np.sqrt(draw.weights)[:, None]
    weighted = sqw * evals
    tail_raw = weighted[:, n:]
    tail_scaled = tail_raw * model.spectrum.semi_axes[n:][None, :]
    return InfoMatrices(weighted[:, :n], tail_raw, tail_scaled, n, model.dim)


def measurements(draw: InfoDraw, model: ModelSpace, coef) -> np.ndarray:
    """Weighted data vector sqrt(w_i) l_i(f) for a coefficient vector f."""
    coef = as_coefficients(coef, model.dim)
    return np.sqrt(draw.weights) * (evaluation_matrix(draw, model) @ coef)


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value, via the Gram matrix on the smaller side."""
    if a.size == 0:
        return 0.0
    if min(a.shape) <= 64:
        return float(np.linalg.svd(a, compute_uv=False)[0])
    gram = a @ a.T if a.shape[0] <= a.shape[1] else a.T @ a
    top = float(np.linalg.eigvalsh(gram)[-1])
    return float(np.sqrt(max(top, 0.0)))


def spectral_check(mats: InfoMatrices, rank_rtol: float = RANK_RTOL) -> SpectralCheck:
    """alpha_hat = s_n(head), beta_hat = s_1(tail_scaled), pass decision."""
    svals = np.linalg.svd(mats.head, compute_uv=False)
    head_top = float(svals[0])
    alpha_hat = float(svals[-1])
    beta_hat = spectral_norm(mats.tail_scaled)
    passed = alpha_hat > rank_rtol * head_top
    return SpectralCheck(alpha_hat, beta_hat, head_top, passed)


def solve(
    mats: InfoMatrices,
    weighted_data: np.ndarray,
    check: SpectralCheck | None = None,
    rank_rtol: float = RANK_RTOL,
) -> np.ndarray:
    """Head coefficients G^+ y, zero-padded to the working dimension.

    Uses the SVD pseudoinverse with singular values below
    ``rank_rtol * s_1`` treated as zero; normal equations are avoided so the
    conditioning is that of G itself.
    """
    check = spectral_check(mats, rank_rtol) if check is None else check
    if not check.passed:
        raise ReconstructionError(check.alpha_hat)
    u, s, vt = np.linalg.svd(mats.head, full_matrices=False)
    inv = np.where(s > rank_rtol * s[0], 1.0 / np.where(s > 0, s, 1.0), 0.0)
    head = vt.T @ (inv * (u.T @ weighted_data))
    out = np.zeros(mats.dim)
    out[: mats.n] = head
    return out


def _error_operator(mats: InfoMatrices, rank_rtol: float = RANK_RTOL) -> np.ndarray:
    """R = G^+ T_scaled: head error in response to unit-ball tail content."""
    u, s, vt = np.linalg.svd(mats.head, full_matrices=False)
    inv = np.where(s > rank_rtol * s[0], 1.0 / np.where(s > 0, s, 1.0), 0.0)
    return vt.T @ (inv[:, None] * (u.T @ mats.tail_scaled))


def top_singular_value_stacked(rows: np.ndarray, diag: np.ndarray) -> float:
    """Largest singular value of the stacked matrix [rows; diag(d)].

    Equals sqrt(lam_max(D^2 + R^T R)), a diagonal plus rank-n perturbation.
    Eigenvalues above max(d^2) are roots of the n x n secular matrix
    ``I - R (lam I - D^2)^{-1} R^T`` whose smallest eigenvalue increases in
    lam, so a guarded bisection finds the top root to machine precision.
    Deterministic, no iterative solvers with random starts.
    """
    d2 = diag * diag
    lo = float(d2.max()) if d2.size else 0.0
    if rows.size == 0:
        return float(np.sqrt(lo))
    norm_sq = spectral_norm(rows) ** 2
    if norm_sq <= 1e-32 * max(lo, 1e-300):
        return float(np.sqrt(lo))
    a, b = lo, lo + norm_sq
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        den = mid - d2
        if (den <= 0.0).any():
            a = mid
            continue
        w = rows / den[None, :]
        secular = -w @ rows.T
        secular[np.diag_indices_from(secular)] += 1.0
        if np.linalg.eigvalsh(secular)[0] >= 0.0:
            b = mid
        else:
            a = mid
        if b - a <= 1e-15 * b:
            break
    return float(np.sqrt(b))


def wce_exact(
    mats: InfoMatrices,
    spectrum: Spectrum,
    check: SpectralCheck | None = None,
    rank_rtol: float = RANK_RTOL,
) -> float:
    """Exact truncated worst-case L2 error of the recovery over the ellipsoid.

    Falls back to the ellipsoid diameter semi-axis sigma_1 when the check
    fails (the zero estimator is all that is left).
    """
    check = spectral_check(mats, rank_rtol) if check is None else check
    if not check.passed:
        return float(spectrum.semi_axes[0])
    rows = _error_operator(mats, rank_rtol)
    return top_singular_value_stacked(rows, spectrum.semi_axes[mats.n :])


def wce_bound(check: SpectralCheck, spectrum: Spectrum, n: int) -> float:
    """Certified upper bound sigma_{n+1} + beta_hat / alpha_hat."""
    if not check.passed:
        return float("inf")
    return spectrum.axis_or_zero(n + 1) + check.beta_hat / check.alpha_hat


def truncation_bias(check: SpectralCheck, spectrum: Spectrum) -> float:
    """Bound on the worst-case error mass neglected beyond the truncation:
    sigma_{M+1} * (1 + beta_hat / alpha_hat)."""
    edge = spectrum.axis_or_zero(spectrum.dim + 1)
    if not check.passed:
        return edge
    return edge * (1.0 + check.beta_hat / check.alpha_hat)


def local_error(
    model: ModelSpace,
    coef,
    mats: InfoMatrices,
    weighted_data: np.ndarray,
    check: SpectralCheck | None = None,
) -> float:
    """L2 distance between a function and its reconstruction."""
    coef = as_coefficients(coef, model.dim)
    recon = solve(mats, weighted_data, check)
    return float(np.linalg.norm(coef - recon))


def sup_error(
    model: ModelSpace,
    coef,
    mats: InfoMatrices,
    weighted_data: np.ndarray,
    grid_size: int,
    check: SpectralCheck | None = None,
) -> float:
    """Max pointwise error over the nested grid {j / grid_size}."""
    model.require_trig()
    coef = as_coefficients(coef, model.dim)
    recon = solve(mats, weighted_data, check)
    xs = np.arange(grid_size + 1) / grid_size
    diff = basis_matrix(xs, model.dim) @ (coef - recon)
    return float(np.abs(diff).max())


def concentration_stat(
    draw: InfoDraw, model: ModelSpace, n: int, tol: float = 1e-9
) -> float:
    """Spectral-norm deviation of the empirical second-moment matrix.

    Rows are the weighted measurement vectors with tail coordinates scaled
    by sigma_k / gamma_n, gamma_n = max(sigma_{n+1}, sqrt(tail / n)); their
    population second moment is diagonal with head entries 1.  The statistic
    is ``|| (1/N) sum_i y_i y_i^T - E ||_2`` over the truncated index set.
    """
    spectrum = model.spectrum
    sig_tail = spectrum.semi_axes[n:]
    tail = spectrum.tail_sum(n).value
    gamma = max(spectrum.semi_axes[n], np.sqrt(tail / n))
    e_diag = np.concatenate([np.ones(n), (sig_tail / gamma) ** 2])

    if draw.channel == FOURIER:
        # one-hot rows make the empirical matrix diagonal; exact statistic
        counts = np.bincount(draw.data - 1, minlength=model.dim).astype(float)
        w_by_index = np.empty(model.dim)
        w_by_index[:n] = 2.0 * n
        w_by_index[n:] = 2.0 * tail / sig_tail**2
        scale = np.concatenate([np.ones(n), (sig_tail / gamma) ** 2])
        emp = counts / draw.size * w_by_index * scale
        return float(np.abs(emp - e_diag).max())

    rows = evaluation_matrix(draw, model) * np.sqrt(draw.weights)[:, None]
    rows[:, n:] *= (sig_tail / gamma)[None, :]
    n_info = draw.size

    def matvec(v):
        return rows.T @ (rows @ v) / n_info - e_diag * v

    op = LinearOperator((model.dim, model.dim), matvec=matvec, dtype=float)
    v0 = np.full(model.dim, model.dim**-0.5)
    vals = eigsh(op, k=1, which="LM", v0=v0, tol=tol, return_eigenvectors=False)
    return float(abs(vals[0]))


class LeastSquaresRecovery(BaseEstimator):
    """Weighted least squares reconstruction from one information draw.

    Parameters
    ----------
    model : ModelSpace
        Spectrum and basis the coefficients refer to.
    n_components : int
        Dimension of the reconstruction space (the basis head).
    rank_rtol : float
        Relative singular-value cutoff for the pseudoinverse.

    The draw is the ``X`` of ``fit`` and the raw measurement values
    ``l_i(f)`` are the targets; weighting happens internally.  After fitting,
    ``coef_`` holds the reconstructed coefficients (zero beyond the head)
    and ``check_`` the spectral certificate.
    """

    def __init__(self, model: ModelSpace, n_components: int = 8, rank_rtol: float = RANK_RTOL):
        self.model = model
        self.n_components = n_components
        self.rank_rtol = rank_rtol

    def fit(self, X: InfoDraw, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (X.size,):
            raise ValueError("one measurement value per functional required")
        self.matrices_ = assemble(X, self.model, self.n_components)
        self.check_ = spectral_check(self.matrices_, self.rank_rtol)
        weighted = np.sqrt(X.weights) * y
        self.coef_ = solve(self.matrices_, weighted, self.check_, self.rank_rtol)
        return self

    def predict(self, X) -> np.ndarray:
        self._require_fitted()
        self.model.require_trig()
        xs = np.asarray(X, dtype=float).ravel()
        return basis_matrix(xs, self.model.dim) @ self.coef_

    def worst_case_error(self) -> float:
        """Exact truncated worst-case error of the fitted information."""
        self._require_fitted()
        return wce_exact(self.matrices_, self.model.spectrum, self.check_, self.rank_rtol)

    def error_bound(self) -> float:
        self._require_fitted()
        return wce_bound(self.check_, self.model.spectrum, self.n_components)

    def _require_fitted(self) -> None:
        if not hasattr(self, "coef_"):
            raise AttributeError("estimator is not fitted yet; call fit first")
