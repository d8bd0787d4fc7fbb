"""Exception hierarchy shared by all wavelocate modules."""


class WavelocateError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateGeometry(WavelocateError):
    """Two points coincide where distinct points are required."""


class SingularGeometry(WavelocateError):
    """The anchor geometry makes the linear system rank deficient."""


class InsufficientAnchors(WavelocateError):
    """Fewer anchors than the solver's minimum."""


class InvalidSpeedField(WavelocateError):
    """A speed model evaluates to a non-positive speed where one is needed."""


class PlacementInfeasible(WavelocateError):
    """Rejection sampling could not place the requested anchors."""


class InvalidStart(WavelocateError):
    """The objective is not finite at the initial simplex."""


class UnstableIntegration(WavelocateError):
    """The explicit reaction-diffusion integration blew up."""


class NoSpiral(WavelocateError):
    """No spiral tip was found in the analysis window of the run."""


class NotActivated(WavelocateError):
    """An anchor location never recorded the requested pulse."""


class FrameDecodeError(WavelocateError):
    """A frame file could not be decoded."""


class FrameShapeError(WavelocateError):
    """Frames in one sequence have mismatched dimensions."""


class EmptyGrowth(Warning):
    """A frame added no newly-activated pixels; it contributes no anchors."""
