"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class DimensionMismatchError(ValueError):
    """Point and set (or two sets) do not live in the same dimension."""


class ConfigurationError(ValueError):
    """A quadrature spec, CLI flag or config file entry is unusable."""


class DegeneracyError(ValueError):
    """A covariance structure violates the positivity needed downstream."""


class HypothesisViolationError(ValueError):
    """Inputs violate a hypothesis of the bound being evaluated."""


class BracketError(RuntimeError):
    """A root bracketing step failed; indicates an internal error."""
