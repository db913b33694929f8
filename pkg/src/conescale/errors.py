"""Exception hierarchy shared by all modules."""


class ConescaleError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(ConescaleError, ValueError):
    """Vector or matrix shape does not match the cone dimension."""


class DomainError(ConescaleError, ValueError):
    """Argument outside the domain of an operation."""


class NotInteriorError(DomainError):
    """A point required to lie in the cone interior does not."""


class NumericalError(ConescaleError, ArithmeticError):
    """A doubling schedule or iteration cap was exhausted."""


class TemplateError(ConescaleError, ValueError):
    """Malformed inequality template."""


class RangeInclusionError(ConescaleError):
    """The preimage selector could not invert g at a point of f(X)."""


class NonConvergence(ConescaleError):
    """Jungck iteration hit max_iter before the gap dropped below tol_conv.

    Raised only on request (``strict=True``); the default is to return the
    report with ``converged=False``.
    """

    def __init__(self, report):
        super().__init__(
            f"no convergence after {report.iterations} iterations "
            f"(last gap {report.trajectory_gaps[-1] if report.trajectory_gaps else 'n/a'})"
        )
        self.report = report
