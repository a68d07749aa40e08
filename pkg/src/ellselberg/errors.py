"""Exception hierarchy shared by all modules."""


class EllipticError(Exception):
    """Base class for every error raised by :mod:`ellselberg`."""


class EllipticDomainError(EllipticError, ValueError):
    """An argument lies outside the domain of the function (e.g. ``z = 0``)."""


class TruncationError(EllipticError, ArithmeticError):
    """A product did not reach its cutoff within ``max_terms`` factors."""


class NearPoleError(EllipticError, ArithmeticError):
    """A denominator factor is within the guard radius of zero."""


class SamplingError(EllipticError, RuntimeError):
    """Parameter sampling exhausted its retry budget."""


class QuadratureError(EllipticError, ArithmeticError):
    """Adaptive torus quadrature did not converge before its node cap.

    The last two estimates are kept on the exception so callers can report them.
    """

    def __init__(self, message, estimates=(), nodes=None):
        super().__init__(message)
        self.estimates = tuple(estimates)
        self.nodes = nodes
