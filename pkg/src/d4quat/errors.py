"""Exception types shared across the package."""


class D4Error(Exception):
    """Base class for all package errors."""

    kind = "ERROR"


class DomainError(D4Error, ValueError):
    kind = "DOMAIN_ERROR"


class ReductionIncomplete(D4Error):
    kind = "REDUCTION_INCOMPLETE"


class InsufficientPrecision(D4Error):
    kind = "INSUFFICIENT_PRECISION"


class InsufficientData(D4Error):
    kind = "INSUFFICIENT_DATA"

    def __init__(self, message, missing=None):
        super().__init__(message)
        self.missing = list(missing or [])


class MaassViolation(D4Error):
    kind = "MAASS_VIOLATION"


class SearchExhausted(D4Error):
    kind = "SEARCH_EXHAUSTED"


class OutOfBound(D4Error):
    kind = "OUT_OF_BOUND"


class DecompositionFailed(D4Error):
    kind = "DECOMPOSITION_FAILED"
