"""Structured errors.

Every error raised on purpose by the library derives from FairAuditError.
Input problems are ValidationError subclasses (CLI exit code 2); failures
of the bootstrap machinery are InferenceError subclasses (exit code 3).
The class name doubles as the error code shown to users.
"""


class FairAuditError(ValueError):
    """Base class for all library errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class ValidationError(FairAuditError):
    pass


class InferenceError(FairAuditError):
    pass


# ingestion / validation
class EmptyInput(ValidationError):
    pass


class MissingColumn(ValidationError):
    pass


class MissingValue(ValidationError):
    pass


class NonBinaryOutcome(ValidationError):
    pass


class ProbOutOfRange(ValidationError):
    pass


class GroupCardinality(ValidationError):
    pass


class UnparsableInput(ValidationError):
    pass


class UnparsableCondition(ValidationError):
    pass


class IncompatibleCondition(ValidationError):
    pass


class EmptySubgroup(ValidationError):
    pass


class InvalidParameter(ValidationError):
    pass


class UnknownMetric(ValidationError):
    pass


class InvalidPlantedParameters(ValidationError):
    pass


# inference
class UndefinedPointEstimate(InferenceError):
    pass


class TooManyDegenerateReplicates(InferenceError):
    pass


class EmptyReplicateSet(InferenceError):
    pass
