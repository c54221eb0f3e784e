"""Linear transient models of a single isothermal gas pipe.

A semi-discretised state-space model, closed-form poles and zeros, truncated
and compact transfer functions, and a delay-recursion simulator.
"""
from .errors import (
    DimensionError,
    EigenSolverError,
    GasPipeError,
    PressureCollapseError,
    SingularSolveError,
    UnstableStepError,
    ValidationError,
)
from .params import (
    DerivedConstants,
    PipeParameters,
    case_study,
    derive_constants,
    load_params,
    params_from_config,
    steady_profile,
)
from .simulate import TimeSeries, crosscheck, lumped_simulate, snap_dt, statespace_simulate
from .spectral import (
    Channel,
    eigenvalues_asymptotic,
    eigenvalues_closed_form,
    gain,
    zeros_closed_form,
)
from .statespace import build_state_space, build_transformed_realization, integrate
from .transferfn import (
    bode,
    compact_response,
    exact_response,
    gain_constants,
    resolvent_response,
    truncated_response,
)

__version__ = "0.1.0"
