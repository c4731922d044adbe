"""Exception types raised across the package."""


class PsidoError(Exception):
    """Base class for all package errors."""


class NonFiniteValue(PsidoError, ValueError):
    pass


class DomainViolation(PsidoError, ValueError):
    pass


class OrderMismatch(PsidoError, ValueError):
    pass


class DerivativeUnavailable(PsidoError):
    pass


class NotClassical(PsidoError, ValueError):
    pass


class NotElliptic(PsidoError, ValueError):
    pass


class ConventionMismatch(PsidoError, ValueError):
    pass


class SingularPs(PsidoError, ArithmeticError):
    pass


class NearSingular(PsidoError, ArithmeticError):
    pass


class Singular(PsidoError, ArithmeticError):
    pass


class NotPositiveDefinite(PsidoError, ValueError):
    pass


class NotInvertible(PsidoError, ArithmeticError):
    pass


class ContourTouchesSpectrum(PsidoError, ValueError):
    pass


class ConfigError(PsidoError, ValueError):
    pass
