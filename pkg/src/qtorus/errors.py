"""Exception hierarchy shared by all stages of the pipeline."""


class QTorusError(Exception):
    """Base class for every error raised by this package."""


class DegenerateWeightError(QTorusError, ValueError):
    """A weight or parameter sits on an excluded value (e.g. 1 + u^n = 0, b = -1)."""


class NotPseudoAnosovError(DegenerateWeightError):
    """The monodromy word does not contain both letters L and R."""


class SolverError(QTorusError, RuntimeError):
    """Newton iteration failed to converge or hit a singular Jacobian."""


class BranchInconsistencyError(QTorusError, RuntimeError):
    """Logarithm lift around the sweep did not close up to an integer multiple of 2*pi*i."""
