"""Spherical (fixed Frobenius norm) random matrix ensembles.

Samplers for S_beta(N, r) and the Gaussian ensembles G_beta(N, q), a single
real eigensolver path for beta = 1, 2, 4, exact rational moments, the
closed-form beta = 2 spectral density and characteristic function, and a
Monte Carlo harness that checks every closed form against simulation.
"""

__version__ = "0.1.0"

from .matrix import Beta, EnsembleSpec, Quaternion, SelfAdjointMatrix, frobenius_norm, real_dimension
from .ensembles import RngState, sample, sample_batch, sample_gaussian, sample_spherical
from .eigen import Spectrum, eigenvalues, eigenvalues_many
from .exactseries import harer_zagier_c, moment_gue, moment_spherical, moment_sue
from .analytic import (
    build_char_fn_model,
    build_density_model,
    char_fn,
    density_from_char_fn,
    eval_density,
    fourier_pair_check,
)
from .stats import empirical_moments, histogram, integrate, ks_distance, pooled_spacings

__all__ = [
    "__version__",
    "Beta", "EnsembleSpec", "Quaternion", "SelfAdjointMatrix", "frobenius_norm", "real_dimension",
    "RngState", "sample", "sample_batch", "sample_gaussian", "sample_spherical",
    "Spectrum", "eigenvalues", "eigenvalues_many",
    "harer_zagier_c", "moment_gue", "moment_spherical", "moment_sue",
    "build_char_fn_model", "build_density_model", "char_fn", "density_from_char_fn",
    "eval_density", "fourier_pair_check",
    "empirical_moments", "histogram", "integrate", "ks_distance", "pooled_spacings",
]
