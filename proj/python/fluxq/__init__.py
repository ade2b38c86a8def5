"""Two-level flux qubit dynamics under exactly solvable control fields."""

from ._core import (
    ConfigError,
    ConsistencyError,
    ContractViolation,
    DivergenceError,
    Error,
    FieldSpec,
    InsufficientDataError,
    IntegrationError,
    ParameterError,
    RangeError,
    UnsupportedFieldError,
    avg_p1_down,
    avg_p3_down,
    beat_frequency,
    critical_thetas,
    derive_theta,
    dominant_frequency,
    eval_field,
    f2_limit_phase,
    hold_time,
    p1_down,
    p2_down,
    p3_down,
    q1_coefficient,
    rabi_p_down,
    residual_report,
    rsj_current,
    rsj_omega_tilde,
    scan,
    simulate,
    time_average,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
