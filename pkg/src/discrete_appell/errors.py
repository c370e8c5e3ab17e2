"""Exception types shared across the package."""


class PoleError(ValueError):
    """Argument sits on a pole of the gamma function."""


class DomainError(ValueError):
    """Argument lies outside the region where the requested series is defined."""


class PreconditionError(ValueError):
    """Parameters violate the precondition of an operation.

    ``reason`` is a short machine-readable tag used in verification reports.
    """

    def __init__(self, message, reason="precondition"):
        super().__init__(message)
        self.reason = reason


class PochhammerOverflow(OverflowError):
    """A Pochhammer value does not fit in double precision."""


class QuadratureError(RuntimeError):
    """Quadrature refinement stalled above the requested tolerance."""


class OperatorMismatch(ValueError):
    """An operator atom does not act on the requested function family."""
