"""Jacobi operators with classical orthogonal-polynomial eigenfunctions.

Finite sections, spectral transforms, unitary evolution, explicit large-time
propagators and wave operators for the Laguerre, Hermite and Jacobi families.
"""

from .errors import (
    CoefficientPositivityError,
    DimensionError,
    DiscretizationError,
    DomainError,
    LaguerreScatteringError,
    NumericalFailure,
    ParameterError,
    RangeError,
    ShapeError,
    TruncationError,
    UndefinedProfileError,
    UnsupportedFamilyError,
)
from .operator_core import (
    CoefficientModel,
    PerturbationRule,
    TruncatedJacobiMatrix,
    apply,
    carleman_partial_sum,
    coeff_a,
    coeff_b,
    truncate,
)
from .orthopoly import (
    AsymptoticProfile,
    SpectralWeight,
    amplitude_phase,
    asymptotic_prediction,
    eigenfunction,
    eval_poly_sequence,
    spectral_weight,
    unnormalized_laguerre_crosscheck,
    weight,
)
from .packets import WavePacketSpec
from .spectral import (
    QuadratureRule,
    SpectralDecomposition,
    eig_tridiag,
    gauss_quadrature,
    phi_adjoint,
    phi_forward,
    phi_roundtrip,
    recurrence_from_measure,
)
from .evolution import (
    EvolutionReport,
    choose_truncation,
    concentration_interval,
    evolve,
    mass_profile,
    prepare_state,
)
from .scattering import (
    WaveOperatorProbe,
    free_wave_operator_apply,
    perturbed_wave_probe,
    scattering_consistency_check,
    scattering_phase,
    wave_limit_probe,
    wave_operator_apply,
)
from .asympt import (
    AsymptoticState,
    asymptotic_error,
    envelope_fit,
    fourier_transform,
    hermite_propagator,
    jacobi_propagator,
    laguerre_propagator,
    universal_relation_check,
)

__version__ = "0.1.0"
