"""Exception and warning types raised by the solvers."""


class DomainError(ValueError):
    """An argument lies outside the domain of a deformation evaluator."""


class PoleError(ValueError):
    """A principal-value pole sits on (or too close to) a boundary or another pole."""


class NoSignChangeError(ValueError):
    """A bracketed root search was handed a bracket without a sign change."""


class BudgetExceededError(RuntimeError):
    """An iterative routine ran out of its evaluation budget.

    The best estimate reached before giving up is kept on ``best_estimate``.
    """

    def __init__(self, message, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


class ExtrapolationError(RuntimeError):
    """Successive damped estimates failed to contract toward a limit."""


class TruncationWarning(UserWarning):
    """A sampled wavefunction is not negligible at the edge of its grid."""
