"""Recovery of functions from iid random information.

Core pieces: spectra defining Hilbert ellipsoids, three information
channels (point evaluation, Gaussian functionals, random coefficients) with
their optimal sampling densities, a weighted least squares recovery engine
with an exact worst-case error oracle, distance-function geometry of point
sets with a moving least squares method, and a seeded experiment harness.
"""

from .channels import (
    Functional,
    InfoDraw,
    apply_functional,
    density_rho,
    fourier_density_table,
    optimal_fourier_draw,
    sample_fourier,
    sample_gaussian,
    sample_points_rho,
    sample_points_uniform,
)
from .geometry import (
    DistReport,
    PointSet,
    covering_radius,
    dist_norm,
    distance_report,
    radius_proxy,
)
from .mls import MovingLeastSquares, error_norm
from .model import (
    ModelSpace,
    UnsupportedBasisError,
    basis_matrix,
    eval_basis,
    eval_function,
    norms,
    project_head,
    unit_ball_vector,
)
from .recovery import (
    InfoMatrices,
    LeastSquaresRecovery,
    ReconstructionError,
    SpectralCheck,
    assemble,
    concentration_stat,
    local_error,
    measurements,
    solve,
    spectral_check,
    sup_error,
    wce_bound,
    wce_exact,
)
from .rng import mix64, trial_rng
from .spectra import (
    DivergentSpectrumError,
    Spectrum,
    SpectrumError,
    TailSum,
    default_truncation,
    parse_spectrum,
)

__all__ = [
    "DistReport",
    "DivergentSpectrumError",
    "Functional",
    "InfoDraw",
    "InfoMatrices",
    "LeastSquaresRecovery",
    "ModelSpace",
    "MovingLeastSquares",
    "PointSet",
    "ReconstructionError",
    "SpectralCheck",
    "Spectrum",
    "SpectrumError",
    "TailSum",
    "UnsupportedBasisError",
    "apply_functional",
    "assemble",
    "basis_matrix",
    "concentration_stat",
    "covering_radius",
    "default_truncation",
    "density_rho",
    "dist_norm",
    "distance_report",
    "error_norm",
    "eval_basis",
    "eval_function",
    "fourier_density_table",
    "local_error",
    "measurements",
    "mix64",
    "norms",
    "optimal_fourier_draw",
    "parse_spectrum",
    "project_head",
    "radius_proxy",
    "sample_fourier",
    "sample_gaussian",
    "sample_points_rho",
    "sample_points_uniform",
    "solve",
    "spectral_check",
    "sup_error",
    "trial_rng",
    "unit_ball_vector",
    "wce_bound",
    "wce_exact",
]
