"""Exception types raised by weightlab."""


class WeightlabError(ValueError):
    """Base class; the CLI maps it to exit code 2."""


class TruncationError(WeightlabError):
    """Sequence too short for the requested check."""


class MismatchedTruncation(WeightlabError):
    pass


class InvariantViolation(WeightlabError):
    """A constructed object breaks a structural invariant.

    ``where`` carries the offending location, e.g. ``(x, k)`` for a matrix.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class BracketOverflow(WeightlabError):
    """No sign change of the conjugate slope below the bracket limit."""


class GridTooShort(WeightlabError):
    pass


class DivergentTail(WeightlabError):
    """Series terms did not decay within the available truncation."""


class InsufficientDivergence(WeightlabError):
    """A block of the projective construction could not reach its threshold.

    ``witness`` holds the partial construction (completed blocks only).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class MissingMatrix(WeightlabError):
    pass


class SchemaError(WeightlabError):
    """Input file does not match the JSON/CSV schema (CLI exit code 65)."""
