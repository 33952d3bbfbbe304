"""Exception hierarchy shared by the library and the CLI."""


class BayesRRError(Exception):
    """Base class for all package errors."""


class DomainError(BayesRRError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ValidationError(BayesRRError, ValueError):
    """User-supplied configuration or data failed validation."""


class NoSolutionError(BayesRRError):
    """A root-finding problem has no solution in the admissible range."""


class InfeasibleDesignError(BayesRRError):
    """No design satisfies the requested error constraints."""


class NumericalError(BayesRRError, ArithmeticError):
    """An iterative method failed to converge or degenerated."""


class BoundaryModeError(BayesRRError):
    """Posterior has its mode on the boundary; an equal-density HPD does not exist."""
