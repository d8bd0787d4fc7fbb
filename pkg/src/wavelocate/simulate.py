"""Forward simulators: anchor placement and synthetic arrival times for
the isotropic and anisotropic propagation models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateGeometry, InvalidSpeedField, PlacementInfeasible
from .model import AnchorObservation, Point2, SpeedModel, polar_relative, speed_at

_REJECTION_CAP_PER_ANCHOR = 10_000


@dataclass(frozen=True)
class PlacementSpec:
    """Uniform random anchor placement over a rectangle, rejecting draws
    inside an exclusion disk around the source."""

    region_min: Point2
    region_max: Point2
    count: int
    exclusion_radius: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.exclusion_radius < 0:
            raise ValueError("exclusion_radius must be >= 0")
        if not (self.region_min.x < self.region_max.x and self.region_min.y < self.region_max.y):
            raise ValueError("region must be non-degenerate (min < max componentwise)")


def place_anchors(spec: PlacementSpec, source: Point2) -> list[Point2]:
    """Draw ``spec.count`` i.i.d. uniform points, rejection-sampled
    outside the exclusion disk.  Deterministic given ``spec.seed``."""
    rng = np.random.default_rng(spec.seed)
    lo = np.array([spec.region_min.x, spec.region_min.y])
    hi = np.array([spec.region_max.x, spec.region_max.y])
    points: list[Point2] = []
    draws = 0
    cap = _REJECTION_CAP_PER_ANCHOR * spec.count
    while len(points) < spec.count:
        if draws >= cap:
            raise PlacementInfeasible(
                f"placed {len(points)}/{spec.count} anchors after {draws} draws"
            )
        x, y = rng.uniform(lo, hi)
        draws += 1
        if np.hypot(x - source.x, y - source.y) >= spec.exclusion_radius:
            points.append(Point2(float(x), float(y)))
    return points


def simulate_isotropic(
    source: Point2,
    t0: float,
    c: float,
    anchors: Sequence[Point2],
    sigma: float = 0.0,
    seed: int = 0,
) -> list[AnchorObservation]:
    """Arrival times t0 + distance/c with additive Gaussian noise."""
    if c <= 0:
        raise ValueError("propagation speed must be > 0")
    noise = _noise(len(anchors), sigma, seed)
    out = []
    for pos, eps in zip(anchors, noise):
        d = pos.distance_to(source)
        if d == 0.0:
            raise DegenerateGeometry(f"anchor {pos} coincides with source")
        out.append(AnchorObservation(pos, t0 + d / c + eps))
    return out


def simulate_anisotropic(
    source: Point2,
    t0: float,
    model: SpeedModel,
    anchors: Sequence[Point2],
    sigma: float = 0.0,
    seed: int = 0,
) -> list[AnchorObservation]:
    """Arrival times under the effective-speed model: straight-ray travel
    at the field value evaluated at each anchor's polar offset.  This is
    exactly the generative model the nonlinear solver inverts."""
    noise = _noise(len(anchors), sigma, seed)
    out = []
    for pos, eps in zip(anchors, noise):
        r, theta = polar_relative(pos, source)
        c = speed_at(model, r, theta)
        if c <= 0:
            raise InvalidSpeedField(f"speed {c} <= 0 at anchor {pos}")
        out.append(AnchorObservation(pos, t0 + r / c + eps))
    return out


def _noise(n: int, sigma: float, seed: int) -> np.ndarray:
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0.0:
        return np.zeros(n)
    return np.random.default_rng(seed).normal(0.0, sigma, n)
