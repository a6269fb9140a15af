"""Contextual probability model and its quantum-like representation."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BornRuleViolation,
    NumericInconsistency,
    PreconditionError,
    SchemaError,
    StageFailure,
    VaxjoError,
)
from .hyperbolic import HyperbolicNumber  # noqa: E402
from .kolmogorov import (  # noqa: E402
    ContextualData,
    KolmogorovSpace,
    PartitionObservable,
    check_conditions,
    conditional_distribution,
    extract_contextual_data,
    transition_probabilities,
)
from .qlra import (  # noqa: E402
    Amplitude,
    ContextKind,
    build_amplitude,
    build_complex_amplitude,
    build_hyperbolic_amplitude,
    build_operators,
    interference_coefficients,
)

__all__ = [
    "Amplitude",
    "BornRuleViolation",
    "ContextKind",
    "ContextualData",
    "HyperbolicNumber",
    "KolmogorovSpace",
    "NumericInconsistency",
    "PartitionObservable",
    "PreconditionError",
    "SchemaError",
    "StageFailure",
    "VaxjoError",
    "build_amplitude",
    "build_complex_amplitude",
    "build_hyperbolic_amplitude",
    "build_operators",
    "check_conditions",
    "conditional_distribution",
    "extract_contextual_data",
    "interference_coefficients",
    "transition_probabilities",
]
