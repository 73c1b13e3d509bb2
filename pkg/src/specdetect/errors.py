"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ValidationError -> 1, I/O problems
(OSError) -> 2, NumericError -> 3.
"""


class SpecDetectError(Exception):
    """Base class for all library errors."""


class ValidationError(SpecDetectError):
    """Malformed input, violated invariant, or bad argument."""


class ParseError(ValidationError):
    """A line of an input file could not be parsed.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ConflictError(ValidationError):
    """Contradictory records, e.g. two human documents under one pair key."""


class NumericError(SpecDetectError):
    """A numeric operation cannot proceed (degenerate or unstable input)."""


class DegenerateInputError(NumericError):
    """Input with no usable variation, e.g. a constant score sequence."""


class StageError(SpecDetectError):
    """Wraps a failure inside a named pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
