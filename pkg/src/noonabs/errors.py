"""Exception types shared across the package."""


class NoonAbsError(Exception):
    """Base class for every error raised by noonabs."""


class DomainError(NoonAbsError, ValueError):
    """Argument outside the domain where a formula is defined."""


class DegenerateVelocityError(DomainError):
    """U_e == U_o, so the walk-off normalizations vanish."""


class OrderError(DomainError):
    """Absorption order exceeds the photon number of a Fock or N00N state."""


class TruncationError(DomainError):
    """Fock-basis truncation leaves too much probability mass in the tail."""


class DivergenceError(NoonAbsError, ArithmeticError):
    """The error-function growth outruns the Gaussian envelope of an integrand."""

    def __init__(self, message, decay=None, growth=None):
        super().__init__(message)
        self.decay = decay
        self.growth = growth


class QuadratureError(NoonAbsError, ArithmeticError):
    """Adaptive refinement stalled before reaching the requested tolerance.

    ``result`` holds the best available :class:`~noonabs.numerics.QuadratureResult`.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class AllPointsDivergedError(NoonAbsError):
    """No grid point produced a usable objective value."""
