"""Exception types shared across the toolkit."""


class RobinCornerError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(RobinCornerError):
    """A domain description violates its invariants."""


class MeshError(RobinCornerError):
    """Triangulation or refinement could not produce a valid mesh."""


class ResourceError(MeshError):
    """A refinement budget was exhausted before reaching the target.

    Carries the resolution that was achieved so callers can decide whether
    the partial result is still usable.
    """

    def __init__(self, message: str, achieved_size: float | None = None):
        super().__init__(message)
        self.achieved_size = achieved_size


class AssemblyError(RobinCornerError):
    """Matrix assembly received an inconsistent mesh."""


class SolverError(RobinCornerError):
    """The eigenvalue solve failed to converge or to factorize.

    ``best_iterate`` holds the last (lambda, vector, residual) triple when
    the iteration made progress before giving up.
    """

    def __init__(self, message: str, best_iterate=None):
        super().__init__(message)
        self.best_iterate = best_iterate
