"""Exception hierarchy shared by all modules."""


class LagvacError(Exception):
    """Base class for every error raised by lagvac."""


class InvalidConstitutiveLaw(LagvacError, ValueError):
    pass


class DomainError(LagvacError, ValueError):
    pass


class InvalidShock(LagvacError, ValueError):
    pass


class UnsupportedData(LagvacError, ValueError):
    pass


class NumericalError(LagvacError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class QuadratureError(NumericalError):
    def __init__(self, message, partial=None):
        super().__init__(message, {"partial": partial})
        self.partial = partial


class EventTimeError(LagvacError, ValueError):
    """Raised when a query lands on an interaction event or on a discontinuity."""


class OnDiscontinuity(EventTimeError):
    def __init__(self, message, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class ConfigError(LagvacError, ValueError):
    pass


class InvalidConfiguration(LagvacError, ValueError):
    pass


class NonHyperbolicJump(LagvacError, ValueError):
    pass
