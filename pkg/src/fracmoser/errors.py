"""Exception types raised by the toolkit."""


class FracMoserError(Exception):
    """Base class for all toolkit errors."""


class DomainError(FracMoserError, ValueError):
    """Argument outside the domain of a formula (poles, bad ranges)."""


class DivergenceError(FracMoserError):
    """An integral that was asked for does not converge."""


class QuadratureError(FracMoserError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class ContractError(FracMoserError):
    """A profile or operator was used outside its declared capabilities."""


class SaturationError(FracMoserError, OverflowError):
    """An exponential left the representable range."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class SolverError(FracMoserError):
    """An iterative solver did not converge."""
