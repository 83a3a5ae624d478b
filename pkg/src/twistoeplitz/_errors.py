"""Exception hierarchy shared by all modules."""


class TwistoeplitzError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TwistoeplitzError, ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(TwistoeplitzError, ValueError):
    """A documented precondition (grid size, bandwidth, ...) is violated."""


class AccuracyError(TwistoeplitzError, ArithmeticError):
    """A quadrature failed its self-convergence check."""


class NumericError(TwistoeplitzError, ArithmeticError):
    """A dense linear algebra routine did not converge."""


class ConfigError(TwistoeplitzError, ValueError):
    """Invalid experiment configuration or method options."""


class DegenerateFitError(TwistoeplitzError, ValueError):
    """Not enough non-zero data for a log-log regression."""


class CriterionInapplicableError(TwistoeplitzError, ValueError):
    """The sublevel-volume criterion cannot be applied to the symbol."""
