"""Exception types shared across the package."""


class ConqaError(Exception):
    """Base class for errors raised by this package."""


class ConflictError(ConqaError):
    """Contradictory relation annotations for the same proposition pair."""


class DanglingReferenceError(ConqaError):
    """A record references a proposition that does not exist."""


class MissingPredictionError(ConqaError):
    """A proposition required for scoring has no prediction."""


class EmptyGraphError(ConqaError):
    """The operation needs at least one implication arrow."""


class NonBinaryAnswerError(ConqaError):
    """An answer outside {yes, no} was given where a binary answer is required."""


class InfeasibleError(ConqaError):
    """Rejection sampling exhausted its attempt budget."""


class DimensionMismatchError(ConqaError):
    """A feature vector does not match the model dimension."""


class UnsupportedQuestionError(ConqaError):
    """A question outside the supported auxiliary-fronted binary form."""
