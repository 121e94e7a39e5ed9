"""Ergodic rates and coverage regions for a two-user STAR-RIS downlink."""

__version__ = "0.1.0"

from .channel import (  # noqa: F401
    GammaApprox,
    LinkGeometry,
    Protocol,
    ProtocolMismatchError,
    Role,
    Side,
    SystemParams,
    effective_gain,
    gamma_params,
    gamma_pdf,
    transmit_snr,
)
from .coverage import (  # noqa: F401
    BracketStatus,
    CoverageQuery,
    CoverageRectangle,
    CoverageResult,
    RateTargets,
    SweepAxis,
    SweepRow,
    coverage_rectangle,
    max_distance,
    sweep,
)
from .mc import (  # noqa: F401
    GammaFitReport,
    McConfig,
    McEstimate,
    SampleBackend,
    gamma_fit_report,
    mc_rate_noma_reflect,
    mc_rate_noma_transmit,
    mc_rate_oma,
    mc_sic_sinr_check,
    sample_cascade_amplitude,
)
from .rates import (  # noqa: F401
    QuadratureError,
    QuadratureSpec,
    RateMethod,
    RateResult,
    ergodic_log_gamma,
    exp_integral_e1,
    exp_integral_oracle,
    noma_rate_reflect,
    noma_rate_transmit,
    oma_rate,
    rate_for,
)
