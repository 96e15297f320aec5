"""Exception hierarchy shared by every simulation module."""


class CoexsimError(Exception):
    """Base class for all package errors."""


class ParameterError(CoexsimError, ValueError):
    """A parameter or argument failed validation."""


class DomainError(ParameterError):
    """An argument lies outside the domain where the operation is defined."""


class PreconditionError(ParameterError):
    """An operation was called with inputs violating its stated hypotheses."""


class StateCorruptionError(CoexsimError):
    """A state variable left its admissible range."""


class NumericalOverflowError(CoexsimError, FloatingPointError):
    """A simulated field produced a non-finite value."""


class CensoredError(CoexsimError):
    """Too many Monte Carlo paths were still running at the horizon."""

    def __init__(self, message, censored_fraction):
        super().__init__(message)
        self.censored_fraction = censored_fraction


class MuUndefinedError(ParameterError):
    """The Model II shape parameter mu is undefined because s == 0.

    The selection coefficient is still available as ``.s``.
    """

    def __init__(self, message, s):
        super().__init__(message)
        self.s = s


class WindowError(DomainError):
    """A percolation window is too narrow for the requested light cone."""


class ConfigError(ParameterError):
    """Configuration text could not be parsed or validated."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ResourceGuardError(CoexsimError):
    """A run would exceed the configured work budget."""

    def __init__(self, message, estimate, budget):
        super().__init__(message)
        self.estimate = estimate
        self.budget = budget
