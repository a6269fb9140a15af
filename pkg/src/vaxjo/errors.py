"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for malformed input, 3 for violated preconditions, 4 for numeric
inconsistencies.
"""


class VaxjoError(Exception):
    exit_code = 1
    code = "error"


class SchemaError(VaxjoError, ValueError):
    exit_code = 2
    code = "schema_error"


class PreconditionError(VaxjoError, ValueError):
    exit_code = 3
    code = "precondition"


class NumericInconsistency(VaxjoError, ArithmeticError):
    exit_code = 4
    code = "numeric_inconsistency"


class ZeroProbabilityEvent(PreconditionError):
    """Conditioning on an event of probability zero."""

    code = "zero_probability_event"

    def __init__(self, message, event=None):
        super().__init__(message)
        self.event = event


class DegenerateData(PreconditionError):
    code = "degenerate_data"


class NotTrigonometric(PreconditionError):
    code = "not_trigonometric"


class NotHyperbolic(PreconditionError):
    code = "not_hyperbolic"


class UniformityViolation(PreconditionError):
    code = "uniformity_violation"


class OutOfRange(PreconditionError):
    code = "out_of_range"


class InsufficientData(PreconditionError):
    code = "insufficient_data"


class ZeroMeasureContext(PreconditionError):
    code = "zero_measure_context"


class AllSamplesKilled(PreconditionError):
    code = "all_samples_killed"


class PhaseInconsistency(NumericInconsistency):
    code = "phase_inconsistency"


class NonOrthonormalBasis(NumericInconsistency):
    code = "non_orthonormal_basis"


class BornRuleViolation(NumericInconsistency):
    code = "born_rule_violation"


class StageFailure(VaxjoError):
    """A pipeline stage failed; wraps the underlying module error."""

    code = "stage_failure"

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 1)
