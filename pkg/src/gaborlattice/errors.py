"""Exception taxonomy shared by all modules.

The CLI maps these onto its exit-code contract: validation problems
(InvalidParameterError, DomainError, ConfigError) exit 2, numerical
problems (NonConvergenceError, SaturationError) exit 3.
"""


class GaborLatticeError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(GaborLatticeError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(GaborLatticeError, ValueError):
    """Evaluation requested outside a function's domain (e.g. z = 0)."""


class ConfigError(GaborLatticeError, ValueError):
    """A CLI configuration file failed schema validation."""


class NonConvergenceError(GaborLatticeError, RuntimeError):
    """A truncated series/iteration hit its hard cap before converging.

    ``diagnostics`` carries whatever the failing routine knew (e.g. the
    last two refinement estimates) so callers can report something useful.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class SaturationError(GaborLatticeError, OverflowError):
    """A scaled value could not be converted back to a plain float."""


class RegimeError(GaborLatticeError, RuntimeError):
    """Reconstruction refused: the sampling density does not determine
    the signal (tau >= pi)."""
