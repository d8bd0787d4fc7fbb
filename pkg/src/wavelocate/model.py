"""Shared domain types and geometry primitives.

All coordinates are planar and carry whatever length unit the enclosing
scenario uses (mm, km, or pixel); units are never converted internally.
Every type here is an immutable value object and safe to share across
threads or processes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

from .errors import DegenerateGeometry, InvalidSpeedField


@dataclass(frozen=True)
class Point2:
    """A planar point. Components must be finite."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class AnchorObservation:
    """A sensor at a known position and the time it saw the front arrive."""

    position: Point2
    arrival_time: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.arrival_time):
            raise ValueError(f"non-finite arrival time {self.arrival_time}")


@dataclass(frozen=True)
class SpeedModel:
    """Separable speed field: polynomial in range times a trigonometric
    series in angle.

    ``taylor`` holds the radial coefficients a0..aK; ``fourier`` holds
    (omega, b, d) triples, one per angular term.  A single taylor
    coefficient with no fourier terms is a constant (isotropic) speed.
    """

    taylor: tuple[float, ...]
    fourier: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self) -> None:
        if len(self.taylor) < 1:
            raise ValueError("taylor needs at least the constant coefficient")
        object.__setattr__(self, "taylor", tuple(float(a) for a in self.taylor))
        object.__setattr__(
            self, "fourier", tuple((float(w), float(b), float(d)) for w, b, d in self.fourier)
        )

    @property
    def taylor_order(self) -> int:
        return len(self.taylor) - 1

    @property
    def fourier_terms(self) -> int:
        return len(self.fourier)

    @classmethod
    def constant(cls, c: float) -> "SpeedModel":
        return cls(taylor=(float(c),))


def polar_relative(p: Point2, origin: Point2) -> tuple[float, float]:
    """Polar coordinates (R, theta) of ``p`` as seen from ``origin``.

    theta follows the atan2 convention, in (-pi, pi].

    Raises DegenerateGeometry when the points coincide.
    """
    dx = p.x - origin.x
    dy = p.y - origin.y
    r = math.hypot(dx, dy)
    if r == 0.0:
        raise DegenerateGeometry(f"point {p} coincides with origin {origin}")
    theta = math.atan2(dy, dx)
    if theta == -math.pi:  # fold -pi onto +pi so theta is in (-pi, pi]
        theta = math.pi
    return r, theta


def speed_at(model: SpeedModel, radius: float, theta: float) -> float:
    """Evaluate the speed field at polar offset (radius, theta).

    Pure evaluation: the result may be non-positive for pathological
    coefficients; callers that need positivity must check it.
    """
    f = 0.0
    for a in reversed(model.taylor):  # Horner
        f = f * radius + a
    g = 1.0
    for omega, b, d in model.fourier:
        g += b * math.cos(omega * theta) + d * math.sin(omega * theta)
    return f * g


class MediumKind(enum.Enum):
    ISOTROPIC_KNOWN = "isotropic_known"
    ISOTROPIC_UNKNOWN = "isotropic_unknown"
    ANISOTROPIC = "anisotropic"


@dataclass(frozen=True)
class IsotropicKnown:
    """Constant propagation speed, known to the solver."""

    c: float
    kind = MediumKind.ISOTROPIC_KNOWN


@dataclass(frozen=True)
class IsotropicUnknown:
    """Constant propagation speed; the solver must estimate it."""

    c: float
    kind = MediumKind.ISOTROPIC_UNKNOWN


@dataclass(frozen=True)
class Anisotropic:
    """Range- and direction-dependent speed field."""

    model: SpeedModel
    kind = MediumKind.ANISOTROPIC


Medium = Union[IsotropicKnown, IsotropicUnknown, Anisotropic]


@dataclass(frozen=True)
class Scenario:
    """Ground truth record a forward simulation was generated from.

    Attaching an anisotropic medium validates that the speed field is
    positive at every anchor.
    """

    source: Point2
    start_time: float
    medium: Medium
    anchors: tuple[AnchorObservation, ...]
    noise_sigma: float = 0.0
    unit_label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "anchors", tuple(self.anchors))
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if isinstance(self.medium, Anisotropic):
            for obs in self.anchors:
                r, theta = polar_relative(obs.position, self.source)
                c = speed_at(self.medium.model, r, theta)
                if c <= 0:
                    raise InvalidSpeedField(
                        f"speed {c} <= 0 at anchor {obs.position} (R={r}, theta={theta})"
                    )

    @property
    def n_anchors(self) -> int:
        return len(self.anchors)


class SolverKind(enum.Enum):
    TDOA = "tdoa"
    MTDOA = "mtdoa"
    NTDOA = "ntdoa"


@dataclass(frozen=True)
class Estimate:
    """Result of an inverse solve.

    ``speed`` is a degenerate single-coefficient model for the TDOA and
    mTDOA solvers.  ``objective_value`` is the minimized residual sum at
    the returned parameters.
    """

    source: Point2
    start_time: float
    speed: SpeedModel
    objective_value: float
    solver: SolverKind
    converged: bool
    iterations: int = 0
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.objective_value < 0:
            raise ValueError("objective_value must be >= 0")
