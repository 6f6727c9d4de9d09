"""Exception types shared across the package."""


class TailGiniError(Exception):
    """Base class for all tailgini errors."""


class PanelError(TailGiniError, ValueError):
    """Malformed or unusable return-panel input."""


class DegenerateTailError(TailGiniError, ValueError):
    """Lower tail holds too few observations for conditional estimation."""


class DegenerateMarginalError(TailGiniError, ValueError):
    """A covariance denominator vanished (constant series)."""


class InfeasibleTargetError(TailGiniError, ValueError):
    """No weight vector satisfies the budget and target-mean constraints."""


class DegenerateFrontierError(TailGiniError, ValueError):
    """Mean vector collinear with ones: the frontier collapses to a point."""


class NotPositiveDefiniteError(TailGiniError, ValueError):
    """Risk matrix is not positive definite."""


class IllConditionedError(TailGiniError, ValueError):
    """Risk matrix too ill-conditioned for a reliable solve."""


class SupportViolationError(TailGiniError, ValueError):
    """Parameter/observation pair outside the generalized Pareto support."""


class InsufficientExceedancesError(DegenerateTailError):
    """Fewer tail exceedances than the fitter requires."""


class FitConvergenceError(TailGiniError, RuntimeError):
    """Optimizer failed to converge; carries the best point found so far."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
