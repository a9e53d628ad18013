"""Exception types shared across the package."""


class FpsteadyError(Exception):
    """Base class for all package-specific errors."""


class PoleError(FpsteadyError, ArithmeticError):
    """A gamma/Pochhammer argument landed on (or within tolerance of) a pole."""


class NonConvergence(FpsteadyError, ArithmeticError):
    """An infinite series hit its term cap before reaching the requested tolerance."""


class DomainError(FpsteadyError, ValueError):
    """Inputs outside the mathematical domain of the operation."""


class DimensionError(FpsteadyError, ValueError):
    """A Fock-space truncation request exceeds the configured cap."""


class SingularSystem(FpsteadyError, ArithmeticError):
    """The Liouvillian kernel is not one-dimensional; no unique steady state."""


class DegenerateState(FpsteadyError, ValueError):
    """A state metric is undefined for this state (e.g. no separated Q maxima)."""


class ConfigError(FpsteadyError, ValueError):
    """A sweep configuration file failed validation."""
