"""Excitable-medium simulator: a modified FitzHugh-Nagumo system on a
square grid, producing spiral waves around a fixed rotor core and the
per-cell activation (threshold-crossing) times used as anchor data.

State: fast variable u (activation), slow variable v (recovery):

    du/dt = D lap(u) + u (1 - u)(u - a) - v
    dv/dt = eps (beta u - gamma v - delta)

integrated with explicit finite differences and no-flux boundaries.
A cross-field S1/S2 stimulus protocol initiates the spiral.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ._kernels import fhn_advance
from .errors import NoSpiral, NotActivated, UnstableIntegration
from .model import AnchorObservation, Point2

_BLOWUP_LIMIT = 10.0
_MAX_PULSES = 64


@dataclass(frozen=True)
class FhnConfig:
    """Grid, kinetics, stimulus protocol, and tip-tracking settings.

    Defaults give a compact, rigidly rotating spiral in an 80 mm square:
    plane-wave front speed about 0.28 mm/ms, rotation period about
    82 ms, tip wander around 1 mm.  The constructor enforces the
    explicit-scheme stability bound dt <= dx^2 / (4 D).
    """

    domain_size: float = 80.0
    grid_n: int = 200
    dt: float = 0.02
    steps: int = 40000
    diffusion: float = 0.2
    a: float = 0.03
    epsilon: float = 0.03
    beta: float = 0.6
    gamma: float = 2.5
    delta: float = 0.02
    s1_time: float = 0.0
    s1_width: float = 2.0
    s2_time: float = 182.0
    u_threshold: float = 0.5
    hysteresis: float = 0.1
    tip_v_level: float = 0.05
    tip_sample_interval: float = 2.0
    reaction_scale: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.grid_n < 4:
            raise ValueError("grid_n must be >= 4")
        if self.dt <= 0 or self.steps < 1:
            raise ValueError("dt must be > 0 and steps >= 1")
        if not (0.0 < self.u_threshold < 1.0):
            raise ValueError("u_threshold must be in (0, 1)")
        if self.diffusion > 0 and self.dt > self.dx * self.dx / (4.0 * self.diffusion):
            raise ValueError(
                f"unstable explicit scheme: dt={self.dt} > dx^2/(4D)="
                f"{self.dx * self.dx / (4.0 * self.diffusion)}"
            )

    @property
    def dx(self) -> float:
        return self.domain_size / self.grid_n

    @property
    def total_time(self) -> float:
        return self.steps * self.dt


@dataclass(frozen=True)
class ActivationMap:
    """Per-cell first-crossing times for each successive pulse.

    ``times[p, i, j]`` is when pulse p's rising edge crossed the
    threshold at cell row i, column j (inf = never).  Cell centers sit
    at ((j + 0.5) dx, (i + 0.5) dx).
    """

    times: np.ndarray
    rotor_core: Point2
    config: FhnConfig
    tip_track: tuple[tuple[float, float, float], ...] = ()  # (t, x, y)

    @property
    def n_pulses(self) -> int:
        return self.times.shape[0]

    @property
    def grid_n(self) -> int:
        return self.times.shape[1]


def _tip_points(u: np.ndarray, v: np.ndarray, u_th: float, v_tip: float, dx: float) -> np.ndarray:
    """Grid positions (x, y) where the u=u_th and v=v_tip contours cross
    within one cell block."""
    a = u - u_th
    b = v - v_tip
    a4 = np.stack([a[:-1, :-1], a[:-1, 1:], a[1:, :-1], a[1:, 1:]])
    b4 = np.stack([b[:-1, :-1], b[:-1, 1:], b[1:, :-1], b[1:, 1:]])
    mask = (a4.min(axis=0) < 0) & (a4.max(axis=0) >= 0) & (b4.min(axis=0) < 0) & (
        b4.max(axis=0) >= 0
    )
    ii, jj = np.nonzero(mask)
    return np.column_stack([(jj + 1.0) * dx, (ii + 1.0) * dx])


def run_fhn(config: FhnConfig) -> ActivationMap:
    """Integrate the full protocol and return the activation map with the
    tracked rotor core.

    Raises UnstableIntegration on blow-up and NoSpiral when no tip is
    found in the last half of the run.
    """
    n = config.grid_n
    u = np.zeros((n, n))
    v = np.zeros((n, n))
    cross = np.full((_MAX_PULSES, n, n), np.inf)
    count = np.zeros((n, n), dtype=np.int32)
    armed = np.ones((n, n), dtype=np.uint8)
    inv_dx2 = 1.0 / (config.dx * config.dx)

    xs = (np.arange(n) + 0.5) * config.dx  # column centers
    ys = (np.arange(n) + 0.5) * config.dx  # row centers

    s1_step = int(round(config.s1_time / config.dt))
    s2_step = int(round(config.s2_time / config.dt))
    sample_every = max(1, int(round(config.tip_sample_interval / config.dt)))
    half_step = config.steps // 2

    tip_track: list[tuple[float, float, float]] = []
    tip_points_all: list[np.ndarray] = []

    step = 0
    while step < config.steps:
        if step == s1_step:
            u[:, xs < config.s1_width] = 1.0
        if step == s2_step:
            u[ys < config.domain_size / 2.0, :] = 1.0

        # advance to the next event or tip sample
        upcoming = [config.steps]
        for ev in (s1_step, s2_step):
            if ev > step:
                upcoming.append(ev)
        next_sample = (step // sample_every + 1) * sample_every
        upcoming.append(next_sample)
        chunk = min(upcoming) - step

        umax, _ = fhn_advance(
            u,
            v,
            cross,
            count,
            armed,
            config.diffusion,
            config.a,
            config.epsilon,
            config.beta,
            config.gamma,
            config.delta,
            config.dt,
            inv_dx2,
            config.u_threshold,
            config.hysteresis,
            step * config.dt,
            chunk,
            config.reaction_scale,
        )
        if umax > _BLOWUP_LIMIT:
            raise UnstableIntegration(f"|u| reached {umax} at t={step * config.dt}")
        step += chunk

        if step % sample_every == 0 and step >= half_step:
            pts = _tip_points(u, v, config.u_threshold, config.tip_v_level, config.dx)
            if pts.size:
                cx, cy = pts.mean(axis=0)
                tip_track.append((step * config.dt, float(cx), float(cy)))
                tip_points_all.append(pts)

    if not tip_points_all:
        raise NoSpiral("no spiral tip found in the last half of the run")
    allpts = np.vstack(tip_points_all)
    core = Point2(float(allpts[:, 0].mean()), float(allpts[:, 1].mean()))

    n_pulses = int(count.max())
    return ActivationMap(
        times=cross[: max(n_pulses, 1)].copy(),
        rotor_core=core,
        config=config,
        tip_track=tuple(tip_track),
    )


def sample_fhn_anchors(
    amap: ActivationMap, anchors: Sequence[Point2], pulse_index: int
) -> list[AnchorObservation]:
    """Bilinearly interpolate one pulse's first-crossing times at the
    anchor locations.

    Raises NotActivated when any surrounding cell never recorded the
    requested pulse, and ValueError for anchors outside the domain.
    """
    cfg = amap.config
    if not (0 <= pulse_index < amap.n_pulses):
        raise NotActivated(f"pulse {pulse_index} not recorded (have {amap.n_pulses})")
    grid = amap.times[pulse_index]
    n = amap.grid_n
    dx = cfg.dx
    out = []
    for p in anchors:
        if not (0.0 <= p.x <= cfg.domain_size and 0.0 <= p.y <= cfg.domain_size):
            raise ValueError(f"anchor {p} outside the domain")
        gx = p.x / dx - 0.5
        gy = p.y / dx - 0.5
        j0 = min(max(int(math.floor(gx)), 0), n - 2)
        i0 = min(max(int(math.floor(gy)), 0), n - 2)
        fx = min(max(gx - j0, 0.0), 1.0)
        fy = min(max(gy - i0, 0.0), 1.0)
        block = grid[i0 : i0 + 2, j0 : j0 + 2]
        if not np.all(np.isfinite(block)):
            raise NotActivated(f"anchor {p} has unactivated neighbor cells for pulse {pulse_index}")
        t = (
            block[0, 0] * (1 - fx) * (1 - fy)
            + block[0, 1] * fx * (1 - fy)
            + block[1, 0] * (1 - fx) * fy
            + block[1, 1] * fx * fy
        )
        out.append(AnchorObservation(p, float(t)))
    return out


def wavefront_speed(amap: ActivationMap, pulse_index: int, min_radius: float) -> float:
    """Mean front speed from the crossing-time gradient, over cells at
    least ``min_radius`` away from the rotor core."""
    grid = amap.times[pulse_index]
    dx = amap.config.dx
    # never-activated cells are +inf; make them nan so the gradient
    # stencil produces nan (filtered below) instead of inf-inf warnings
    grid = np.where(np.isfinite(grid), grid, np.nan)
    with np.errstate(invalid="ignore"):
        gy, gx = np.gradient(grid, dx)
    slowness = np.hypot(gx, gy)
    n = amap.grid_n
    xs = (np.arange(n) + 0.5) * dx
    xx, yy = np.meshgrid(xs, xs)
    r = np.hypot(xx - amap.rotor_core.x, yy - amap.rotor_core.y)
    ok = np.isfinite(grid) & np.isfinite(slowness) & (slowness > 0) & (r >= min_radius)
    # keep a margin from the boundary where the gradient stencil degrades
    ok[:2, :] = ok[-2:, :] = ok[:, :2] = ok[:, -2:] = False
    if not ok.any():
        raise NotActivated("no usable cells for speed measurement")
    return float(np.median(1.0 / slowness[ok]))


_ACT_MAGIC = "WLACT1"


def save_activation(amap: ActivationMap, out_dir: str | Path) -> None:
    """Write the map as a plain-text grid stack plus a JSON sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p, n, _ = amap.times.shape
    with open(out / "activation.txt", "w") as fh:
        fh.write(f"{_ACT_MAGIC}\n{n} {n} {p}\n")
        for pulse in range(p):
            for row in amap.times[pulse]:
                fh.write(" ".join(repr(float(x)) for x in row))
                fh.write("\n")
    sidecar = {
        "rotor_core": [amap.rotor_core.x, amap.rotor_core.y],
        "config": asdict(amap.config),
        "tip_track": [list(s) for s in amap.tip_track],
    }
    with open(out / "activation.json", "w") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")


def load_activation(in_dir: str | Path) -> ActivationMap:
    src = Path(in_dir)
    with open(src / "activation.json") as fh:
        sidecar = json.load(fh)
    config = FhnConfig(**sidecar["config"])
    with open(src / "activation.txt") as fh:
        magic = fh.readline().strip()
        if magic != _ACT_MAGIC:
            raise ValueError(f"bad activation file header {magic!r}")
        n, m, p = (int(x) for x in fh.readline().split())
        flat = np.loadtxt(fh).reshape(p, n, m)
    return ActivationMap(
        times=flat,
        rotor_core=Point2(*sidecar["rotor_core"]),
        config=config,
        tip_track=tuple(tuple(s) for s in sidecar["tip_track"]),
    )
