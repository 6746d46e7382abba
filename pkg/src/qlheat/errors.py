"""Exception hierarchy shared by all solver modules."""


class QlheatError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(QlheatError):
    """A solver could not produce a trustworthy result."""


class DegenerateSlope(NumericalError):
    """The similarity ODE was evaluated at a slope too close to zero."""


class InvalidBoundary(QlheatError, ValueError):
    pass


class StepSizeCollapse(NumericalError):
    pass


class NoFront(NumericalError):
    pass


class NegativeTime(QlheatError, ValueError):
    pass


class NonpositiveTime(QlheatError, ValueError):
    pass


class CflViolation(NumericalError):
    """Explicit step requested with a time step above the stability bound."""


class NonFiniteState(NumericalError):
    pass


class WindowExceeded(QlheatError, ValueError):
    """Pulled-back coordinates fall outside the solved space-time window."""


class MissingSnapshot(QlheatError, KeyError):
    pass


class ConfigError(QlheatError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ValidationError(ConfigError, ValueError):
    pass


class NonPhysicalParameterWarning(UserWarning):
    """Gradient scale outside the range where the model is considered meaningful."""


class DomainTooSmallWarning(UserWarning):
    pass
