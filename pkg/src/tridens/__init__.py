"""Tridiagonal beta ensembles: samplers, spectral measures, limit laws and rate functions."""
from .coefficients import (
    ChainDecomposition,
    RecursionCoefficients,
    canonical_moments,
    lanczos_coefficients,
    matrix_from_coefficients,
    z_decomposition,
)
from .distributions import (
    BetaParams,
    DirichletParams,
    GammaParams,
    gamma_fenchel_legendre,
    sample_beta,
    sample_dirichlet,
    sample_gamma,
)
from .ensembles import (
    EnsembleSpec,
    ScalingRegime,
    limit_matrix_mp,
    limit_matrix_sc,
    rescale_matrix,
    sample_gaussian_tridiag,
    sample_jacobi_tridiag,
    sample_laguerre_tridiag,
)
from .errors import NumericalError, ParameterError, SupportError
from .measures import DiscreteMeasure, MarchenkoPastur, Semicircle, cdf, kolmogorov_distance, reference_density
from .rates import beta_concentration_bound, f_gauss, g, rate_ig, rate_il, rate_il_from_coefficients
from .rng import make_rng
from .spectral import SpectralDecomposition, decompose, eigenvalues, empirical_measure, moment_e1, spectral_measure
from .tridiagonal import TridiagonalMatrix

__version__ = "0.1.0"
