"""Exception types shared across the package.

Three failure categories map onto distinct CLI exit codes: malformed
values and invariant violations (exit 2) versus configurations that are
simply outside the supported scope (exit 3).
"""


class RelentError(ValueError):
    """Base class for all errors raised by this package."""


class ValidationError(RelentError):
    """A constructed value violates one of its declared invariants.

    Carries the name of the violated invariant in ``invariant``.
    """

    def __init__(self, message: str, invariant: str = ""):
        super().__init__(message)
        self.invariant = invariant


class DomainError(RelentError):
    """An argument is outside the domain of the operation."""


class UnsupportedConfigError(RelentError):
    """The requested configuration is valid but out of scope.

    Examples: more than two parties for a PPT test, total dimension
    above the dense-storage cap, N-copy spaces that exceed it.
    """
