"""Exception types shared across the package.

Each class carries a short ``code`` used by the CLI for its
machine-parsable ``ERROR <code>:`` prefix.
"""


class FracstepError(Exception):
    code = "FRACSTEP"


class DomainError(FracstepError, ValueError):
    """An argument lies outside the documented evaluation domain."""

    code = "DOMAIN"


class SingularityError(FracstepError, ArithmeticError):
    """Evaluation hit a singular point (excluded symbol argument,
    singular step matrix, resolvent sample on the spectrum)."""

    code = "SINGULAR"


class StabilityError(FracstepError, ValueError):
    """A step-size or sector precondition of an experiment is violated."""

    code = "STABILITY"
