"""Exception hierarchy shared by all modules."""


class MinkresError(Exception):
    """Base class for library errors."""


class DimensionMismatch(MinkresError, ValueError):
    pass


class InvalidNorm(MinkresError, ValueError):
    """Raised when a norm description fails validation."""


class DegenerateInput(MinkresError, ValueError):
    """Zero directions, coincident points, degenerate planes and the like."""


class DegenerateAnchors(MinkresError, ValueError):
    """Anchor points are not affinely independent."""


class NotStrictlyConvex(MinkresError):
    """The operation needs a strictly convex norm."""


class NormIsStrictlyConvex(MinkresError):
    """No flat segment exists, so the planar construction cannot exist."""


class NormIsEuclidean(MinkresError):
    """Every probed region graph was linear: the norm behaves like an inner-product norm."""


class NoSignPattern(MinkresError):
    """The sign-pattern scan ran out of budget."""


class NoSolution(MinkresError):
    """Multilateration found no point within tolerance."""

    def __init__(self, message: str, best_residual: float = float("inf")):
        super().__init__(message)
        self.best_residual = best_residual
