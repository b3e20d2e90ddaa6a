"""Exception hierarchy shared by all affrep modules.

Every error raised on purpose derives from AffrepError so the CLI can map
failures to stable exit codes.
"""


class AffrepError(Exception):
    """Base class for all affrep errors."""


class CoordinateOverflow(AffrepError):
    """An orbit coordinate exceeded the configured magnitude bound."""

    def __init__(self, step, value, bound):
        self.step = step
        self.value = value
        self.bound = bound
        super().__init__(
            f"coordinate magnitude {value:.3e} exceeds bound {bound:.3e} at step {step}"
        )


class UnsupportedBranch(AffrepError):
    """No closed form is implemented for these map parameters."""


class SingularSystem(AffrepError):
    """A linear solve degenerated (vanishing pivot coefficient)."""


class DomainError(AffrepError):
    """Arguments outside the mathematical domain of the operation."""


class DegenerateOrdering(AffrepError):
    """The ordering denominator 1 + 2*hbar^2*delta1t vanishes."""


class Alpha1Zero(AffrepError):
    """A quantity requiring alpha1 != 0 was requested with alpha1 = 0."""


class Inconsistent(AffrepError):
    """The homomorphism coefficient equations have no solution; the message
    names the violated condition."""


class EmptyCurve(AffrepError):
    """The constraint curve is the empty set."""


class NotPeriodic(AffrepError):
    """The proposed loop base point is not periodic with the requested order."""


class OrbitLeavesPositiveQuadrant(AffrepError):
    """An orbit point left the (strictly) positive quadrant.

    ``index`` is the first offending iteration step.
    """

    def __init__(self, index, point):
        self.index = index
        self.point = tuple(float(c) for c in point)
        super().__init__(
            f"orbit leaves the positive quadrant at step {index}: {self.point}"
        )


class NoString(AffrepError):
    """No k-string with positive endpoints exists for the requested length."""


class NotInvertible(AffrepError):
    """The affine map is not invertible (det A = 0)."""


class ShapeMismatch(AffrepError):
    """Supplied block matrices do not match the declared block sizes."""


class CornerWithoutPeriodicity(AffrepError):
    """A corner block was supplied but the base point is not periodic."""


class UnsupportedCase(AffrepError):
    """Neither central-element case (det A = 1, or det A = -1 with
    tr A = 0 and a = 0) applies."""


class UnsupportedRegime(AffrepError):
    """Existence profiles are only defined for det A = 1."""
