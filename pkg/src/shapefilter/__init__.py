"""Shaping filters for Gaussian processes with rational spectral densities."""

__version__ = "0.1.0"

from .errors import ShapeFilterError, InputError, NumericError  # noqa: E402,F401
from .tf_core import (  # noqa: E402,F401
    RationalTransferFunction,
    PoleZeroForm,
    PartialFractions,
    validate,
    find_poles_zeros,
    partial_fractions,
    psd,
)
from .state_space import (  # noqa: E402,F401
    StateSpaceRealization,
    companion_realization,
    interpolation_realization,
    transfer_residual,
    euler_maruyama,
)
from .impulse_response import (  # noqa: E402,F401
    ModalImpulseResponse,
    ModalTerm,
    impulse_from_fractions,
    variance_at,
    kernel_norm_squared,
    ito_sum_simulate,
)
from .spectral_basis import CosineBasis, basis_eval, project_kernel, synthesize_function  # noqa: E402,F401
from .spectral_operators import (  # noqa: E402,F401
    SpectralOperator,
    BlockParameters,
    integration_matrix,
    differentiation_matrix,
    aperiodic_matrix,
    aperiodic2_matrix,
    oscillatory_matrix,
    compose_rational,
    exact_projection,
    whitening_operator,
)
from .simulation import (  # noqa: E402,F401
    GaussianSource,
    SampleTrajectory,
    sample_noise_spectrum,
    spectral_simulate,
    ensemble_stats,
)
from .error_analysis import ErrorReport, error_decomposition, error_table, convergence_rate  # noqa: E402,F401
from .presets import PRESETS, get_preset  # noqa: E402,F401
