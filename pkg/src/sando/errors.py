"""Exception hierarchy shared by every module."""


class SandoError(Exception):
    """Base class for all errors raised by the package."""


class InvalidParameterError(SandoError, ValueError):
    pass


class PoleError(SandoError):
    """Frequency sits on the pole of the resonator effective capacitance."""

    def __init__(self, omega, message=None):
        self.omega = omega
        super().__init__(message or f"resonator pole at omega={omega!r}")


class AboveCutoffError(SandoError):
    def __init__(self, omega, cutoff, mode=None):
        self.omega = omega
        self.cutoff = cutoff
        self.mode = mode
        where = f" ({mode})" if mode else ""
        super().__init__(f"omega={omega!r}{where} is at or above the plasma cutoff {cutoff!r}")


class StopbandError(SandoError):
    def __init__(self, omega, club, mode=None):
        self.omega = omega
        self.club = club
        self.mode = mode
        where = f" ({mode})" if mode else ""
        super().__init__(f"omega={omega!r}{where} lies in the resonator stopband (club={club!r})")


class DegenerateSignalError(SandoError):
    pass


class NumericalFailure(SandoError):
    def __init__(self, message, x=None):
        self.x = x
        super().__init__(message if x is None else f"{message} at x={x!r}")


class StiffnessError(NumericalFailure):
    """Step size underflow; ``x`` is the last accepted position."""


class BracketNotFoundError(SandoError):
    def __init__(self, message, trace=()):
        self.trace = list(trace)
        super().__init__(message)


class ConfigError(SandoError, ValueError):
    def __init__(self, key, constraint):
        self.key = key
        self.constraint = constraint
        super().__init__(f"{key}: {constraint}")
