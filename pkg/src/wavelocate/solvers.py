"""Inverse estimators: linear TDOA with known speed, joint mTDOA with
unknown constant speed, and the nonlinear NTDOA with a separable
range/angle speed field."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ._kernels import ntdoa_objective
from .errors import InsufficientAnchors, InvalidStart, SingularGeometry
from .model import AnchorObservation, Estimate, Point2, SolverKind, SpeedModel
from .simplex import SimplexConfig, SimplexResult, nelder_mead

PENALTY_WEIGHT = 1e6

# Restart polishing: rebuild the simplex at the current best point,
# cycling through initial-simplex scales, until the objective stops
# improving or the iteration budget runs out.
_RESTART_SCALES = (0.05, 0.25, 0.01, 0.1, 0.5, 0.02)
_MAX_RUNS = 12
_MAX_STALLS = 3

# NTDOA gets a larger per-start budget than the bare simplex default;
# an 8-dimensional search with restarts does not fit in 200*n.
_NTDOA_ITERATIONS_PER_DIM = 1000

# Default lower bound on the estimated start time, in units of the
# arrival-time span below the earliest arrival.  The nonlinear objective
# has a data-independent zero-residual valley at t0 -> -inf (radial
# speed coefficients shrinking in step); bounding t0 keeps the fit out
# of it.  Callers may widen the bound (see ``ntdoa``): a strongly offset
# start time acts as an additive time offset the angular speed factor
# can absorb, which is the right regime for rotating sources whose
# arrival phase ramps with angle.
_DEFAULT_START_DEPTH = 3.0

# Intermediate start-time depths (spans below the earliest arrival) at
# which alternating-least-squares candidate seeds are built.
_SEED_DEPTHS = (3.0, 10.0, 30.0)

# Budget for the source-only (variable-projection) candidate search.
_VP_ITERATIONS = 200
_VP_FIT_ITERATIONS = 40

# Projected mode: per-pass budget for the source-only search and the
# angular half-width (degrees) around the fitted speed-field
# discontinuity inside which anchors are dropped before the second pass.
_PROJECTED_ITERATIONS = 400
_JUMP_TRIM_DEGREES = 20.0


@dataclass(frozen=True)
class NtdoaOrder:
    """Speed-field expansion order: taylor_order radial powers beyond the
    constant, fourier_terms angular terms.  Unknown count is
    taylor_order + 3*fourier_terms + 4."""

    taylor_order: int = 1
    fourier_terms: int = 1

    def __post_init__(self) -> None:
        if self.taylor_order < 0 or self.fourier_terms < 0:
            raise ValueError("orders must be >= 0")

    @property
    def unknown_count(self) -> int:
        return self.taylor_order + 3 * self.fourier_terms + 4


def _arrays(obs: Sequence[AnchorObservation]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ax = np.array([o.position.x for o in obs], dtype=float)
    ay = np.array([o.position.y for o in obs], dtype=float)
    t = np.array([o.arrival_time for o in obs], dtype=float)
    return ax, ay, t


def _isotropic_objective(ax: np.ndarray, ay: np.ndarray, t: np.ndarray):
    def objective(params: np.ndarray) -> float:
        x0, y0, t0, c = params
        r2 = (ax - x0) ** 2 + (ay - y0) ** 2
        resid = (c * c) * (t - t0) ** 2 - r2
        return float(np.dot(resid, resid))

    return objective


def tdoa_linear(obs: Sequence[AnchorObservation], c: float) -> Estimate:
    """Closed-form least squares with known constant speed.

    Expanding c^2 (t_l - t0)^2 = |r_l - r0|^2 gives linear rows
    [2x_l, 2y_l, -2t_l, 1] against [x0, y0, c^2 t0, c^2 t0^2 - |r0|^2]
    with right side |r_l|^2 - c^2 t_l^2.
    """
    if c <= 0:
        raise ValueError("propagation speed must be > 0")
    n = len(obs)
    if n < 4:
        raise InsufficientAnchors(f"TDOA needs >= 4 anchors, got {n}")
    ax, ay, t = _arrays(obs)

    h = np.column_stack([2.0 * ax, 2.0 * ay, -2.0 * t, np.ones(n)])
    b = ax * ax + ay * ay - (c * c) * t * t
    sol, _, rank, _ = np.linalg.lstsq(h, b, rcond=None)
    if rank < 4:
        raise SingularGeometry(f"linear TDOA system has rank {rank} < 4")
    x0, y0, u1, _ = sol
    t0 = u1 / (c * c)

    obj = _isotropic_objective(ax, ay, t)(np.array([x0, y0, t0, c]))
    return Estimate(
        source=Point2(float(x0), float(y0)),
        start_time=float(t0),
        speed=SpeedModel.constant(c),
        objective_value=obj,
        solver=SolverKind.TDOA,
        converged=True,
        iterations=0,
    )


def _mtdoa_seed(ax: np.ndarray, ay: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Linear lifting for the unknown-speed case: rows
    [2x_l, 2y_l, t_l^2, -2t_l, 1] against [x0, y0, c^2, c^2 t0,
    c^2 t0^2 - |r0|^2], right side |r_l|^2.  Falls back to a heuristic
    seed when the recovered c^2 is non-positive."""
    n = ax.size
    h = np.column_stack([2.0 * ax, 2.0 * ay, t * t, -2.0 * t, np.ones(n)])
    b = ax * ax + ay * ay
    sol, _, rank, _ = np.linalg.lstsq(h, b, rcond=None)
    if rank < 5:
        raise SingularGeometry(f"linear mTDOA system has rank {rank} < 5")
    x0, y0, p, q, _ = sol
    if p > 0:
        return np.array([x0, y0, q / p, math.sqrt(p)])
    return _heuristic_seed(ax, ay, t)


def _heuristic_seed(ax: np.ndarray, ay: np.ndarray, t: np.ndarray) -> np.ndarray:
    cx, cy = float(ax.mean()), float(ay.mean())
    t0 = float(t.min())
    dist = np.hypot(ax - cx, ay - cy)
    spread = np.median(t - t0)
    if spread <= 0:
        raise SingularGeometry("arrival times carry no spread; speed unidentifiable")
    c = float(np.median(dist)) / float(spread)
    return np.array([cx, cy, t0, c])


def _minimize_with_restarts(
    objective, x0: np.ndarray, config: SimplexConfig, budget: int | None = None
) -> SimplexResult:
    n = x0.size
    if budget is None:
        budget = config.iteration_cap(n)
    used = 0
    best: SimplexResult | None = None
    runs = 0
    stalls = 0
    x = x0
    while used < budget and runs < _MAX_RUNS:
        scale = _RESTART_SCALES[runs % len(_RESTART_SCALES)]
        res = nelder_mead(
            objective,
            x,
            replace(
                config,
                max_iterations=budget - used,
                initial_rel_step=scale,
                initial_zero_step=scale / 200.0,
            ),
        )
        used += max(res.iterations, 1)
        runs += 1
        if best is None or res.f < best.f * (1.0 - 1e-9) - 1e-300:
            best = res
            x = res.x
            stalls = 0
        else:
            if res.f < best.f:
                best = res
            stalls += 1
            if stalls >= _MAX_STALLS:
                break
    assert best is not None
    return replace(best, iterations=min(used, budget))


def mtdoa(obs: Sequence[AnchorObservation], config: SimplexConfig = SimplexConfig()) -> Estimate:
    """Joint estimate of (source, start time, constant speed): linear
    seed followed by simplex refinement of the residual sum."""
    n = len(obs)
    if n < 5:
        raise InsufficientAnchors(f"mTDOA needs >= 5 anchors, got {n}")
    ax, ay, t = _arrays(obs)
    if np.ptp(t) == 0.0:
        raise SingularGeometry("all arrival times identical; speed unidentifiable")

    seed = _mtdoa_seed(ax, ay, t)
    objective = _isotropic_objective(ax, ay, t)
    res = _minimize_with_restarts(objective, seed, config)
    x0, y0, t0, c = res.x
    return Estimate(
        source=Point2(float(x0), float(y0)),
        start_time=float(t0),
        speed=SpeedModel.constant(abs(float(c))),
        objective_value=res.f,
        solver=SolverKind.MTDOA,
        converged=res.converged,
        iterations=res.iterations,
    )


def _separable_fit(
    ax: np.ndarray,
    ay: np.ndarray,
    t: np.ndarray,
    x0: float,
    y0: float,
    t0: float,
    k: int,
    ell: int,
    iterations: int = 60,
) -> tuple[np.ndarray, float] | None:
    """Fit the speed-field coefficients by alternating least squares on
    the per-anchor speed samples R_i / (t_i - t0) with the source and
    start time held fixed.  f and g enter the speed multiplicatively, so
    with one factor frozen the other is a linear fit.  Returns the full
    parameter vector and the residual sum of squares of the speed
    samples, or None when the factorization degenerates."""
    dx = ax - x0
    dy = ay - y0
    r = np.hypot(dx, dy)
    dt = t - t0
    if np.any(dt <= 0):
        return None
    s = r / dt
    fdesign = np.vstack([r**p for p in range(k + 1)]).T
    theta = np.arctan2(dy, dx)
    gcols = [np.ones_like(r)]
    for i in range(1, ell + 1):
        gcols.extend([np.cos(i * theta), np.sin(i * theta)])
    gdesign = np.vstack(gcols).T
    gcoef = np.zeros(2 * ell + 1)
    gcoef[0] = 1.0
    try:
        taylor, *_ = np.linalg.lstsq(fdesign, s, rcond=None)
        for _ in range(iterations):
            g = gdesign @ gcoef
            if not np.all(np.isfinite(g)):
                return None
            taylor, *_ = np.linalg.lstsq(fdesign * g[:, None], s, rcond=None)
            f = fdesign @ taylor
            if not np.all(np.isfinite(f)):
                return None
            if ell:
                rest, *_ = np.linalg.lstsq(gdesign[:, 1:] * f[:, None], s - f, rcond=None)
                gcoef = np.concatenate([[1.0], rest])
    except np.linalg.LinAlgError:
        return None
    resid = s - (fdesign @ taylor) * (gdesign @ gcoef)
    sse = float(resid @ resid)
    params = np.empty(k + 3 * ell + 4)
    params[0:3] = (t0, x0, y0)
    params[3 : 3 + k + 1] = taylor
    for i in range(ell):
        params[3 + k + 1 + 3 * i] = float(i + 1)
        params[3 + k + 1 + 3 * i + 1] = gcoef[1 + 2 * i]
        params[3 + k + 1 + 3 * i + 2] = gcoef[2 + 2 * i]
    if not np.all(np.isfinite(params)) or not math.isfinite(sse):
        return None
    return params, sse


def _separable_fit_seed(
    ax: np.ndarray,
    ay: np.ndarray,
    t: np.ndarray,
    x0: float,
    y0: float,
    t0: float,
    k: int,
    ell: int,
    iterations: int = 60,
) -> np.ndarray | None:
    fit = _separable_fit(ax, ay, t, x0, y0, t0, k, ell, iterations)
    return None if fit is None else fit[0]


def _ntdoa_candidates(base: np.ndarray, ax: np.ndarray, ay: np.ndarray, k: int, ell: int):
    """Deterministic start points for the nonlinear fit: the mTDOA warm
    start, sign variants of the angular coefficients, frequency-scaled
    variants, and source offsets at 15% of the anchor span.  The extra
    starts guard against the local minima the warm start alone falls
    into on strongly anisotropic data."""
    yield base
    first = 3 + k + 1
    if ell > 0:
        for b, d in ((0.1, 0.1), (-0.1, 0.1), (0.1, -0.1), (-0.1, -0.1)):
            v = base.copy()
            for i in range(ell):
                v[first + 3 * i + 1] = b
                v[first + 3 * i + 2] = d
            yield v
        for scale in (0.5, 2.0):
            v = base.copy()
            for i in range(ell):
                v[first + 3 * i] *= scale
                v[first + 3 * i + 1] = 0.1
                v[first + 3 * i + 2] = 0.1
            yield v
    span = 0.15 * max(float(ax.max() - ax.min()), float(ay.max() - ay.min()))
    for ox, oy in ((span, span), (-span, span), (span, -span), (-span, -span)):
        v = base.copy()
        v[1] += ox
        v[2] += oy
        for i in range(ell):
            v[first + 3 * i + 1] = 0.05
            v[first + 3 * i + 2] = 0.05
        yield v


def _angular_jump(params: np.ndarray, k: int, ell: int) -> float:
    """Angle (radians) where the fitted angular factor changes fastest —
    for phase-ramped (rotating-source) data this marks the wrap of the
    arrival-phase ramp, where the separable model fits worst."""
    grid = np.linspace(-math.pi, math.pi, 720, endpoint=False)
    g = np.ones_like(grid)
    first = 3 + k + 1
    for i in range(ell):
        omega = params[first + 3 * i]
        g += params[first + 3 * i + 1] * np.cos(omega * grid)
        g += params[first + 3 * i + 2] * np.sin(omega * grid)
    step = np.abs(np.diff(np.concatenate([g, g[:1]])))
    return float(grid[int(np.argmax(step))])


def _projected_ntdoa(
    ax: np.ndarray,
    ay: np.ndarray,
    t: np.ndarray,
    start: np.ndarray,
    order: NtdoaOrder,
    config: SimplexConfig,
    t_min: float,
    t_low: float,
) -> Estimate:
    """Source-only simplex search with the speed field refit by
    alternating least squares at every source iterate (variable
    projection), all at the deepest admissible start time.

    Runs twice: the second pass drops anchors within a small angular
    window around the fitted speed-field discontinuity, where a
    separable field cannot represent a wrapped arrival-phase ramp and
    the residuals would otherwise drag the source estimate."""
    k = order.taylor_order
    ell = order.fourier_terms
    per_pass = (
        config.max_iterations if config.max_iterations is not None else _PROJECTED_ITERATIONS
    )

    def solve(axs: np.ndarray, ays: np.ndarray, ts: np.ndarray, origin: np.ndarray):
        t_deep = float(ts.min()) - (t_min - t_low)

        def source_objective(xy: np.ndarray) -> float:
            fit = _separable_fit(axs, ays, ts, xy[0], xy[1], t_deep, k, ell)
            return math.inf if fit is None else fit[1]

        res = nelder_mead(
            source_objective,
            origin,
            replace(config, max_iterations=per_pass, initial_rel_step=0.1),
        )
        return res, _separable_fit(axs, ays, ts, res.x[0], res.x[1], t_deep, k, ell)

    res, fit = solve(ax, ay, t, start)
    iterations = res.iterations
    if fit is None:
        return Estimate(
            source=Point2(float(res.x[0]), float(res.x[1])),
            start_time=t_low,
            speed=SpeedModel.constant(0.0),
            objective_value=math.inf,
            solver=SolverKind.NTDOA,
            converged=False,
            iterations=iterations,
        )
    if ell > 0:
        jump = _angular_jump(fit[0], k, ell)
        theta = np.arctan2(ay - res.x[1], ax - res.x[0])
        offset = np.abs((theta - jump + math.pi) % (2.0 * math.pi) - math.pi)
        keep = offset > math.radians(_JUMP_TRIM_DEGREES)
        if int(keep.sum()) >= order.unknown_count + 1:
            res2, fit2 = solve(ax[keep], ay[keep], t[keep], res.x)
            iterations += res2.iterations
            if fit2 is not None:
                res, fit = res2, fit2
    p = fit[0]
    taylor = tuple(float(v) for v in p[3 : 3 + k + 1])
    first = 3 + k + 1
    fourier = tuple(
        (float(p[first + 3 * i]), float(p[first + 3 * i + 1]), float(p[first + 3 * i + 2]))
        for i in range(ell)
    )
    full_obj = ntdoa_objective(
        np.ascontiguousarray(p), ax, ay, t, k, ell, PENALTY_WEIGHT, t_min, t_low
    )
    return Estimate(
        source=Point2(float(res.x[0]), float(res.x[1])),
        start_time=float(p[0]),
        speed=SpeedModel(taylor=taylor, fourier=fourier),
        objective_value=float(full_obj),
        solver=SolverKind.NTDOA,
        converged=res.converged,
        iterations=iterations,
    )


def ntdoa(
    obs: Sequence[AnchorObservation],
    order: NtdoaOrder = NtdoaOrder(),
    config: SimplexConfig = SimplexConfig(),
    start_depth_spans: float = _DEFAULT_START_DEPTH,
    projected: bool = False,
) -> Estimate:
    """Nonlinear joint estimate with a range x angle speed field,
    warm-started from the mTDOA solution.

    ``start_depth_spans`` bounds how far below the earliest arrival
    (in units of the arrival-time span) the start time may sit.  The
    default keeps the fit near the data; a large value (~100s) admits
    the offset-start regime where the angular factor absorbs an
    additive phase ramp, which suits rotating sources.

    ``projected=True`` replaces the joint simplex with a source-only
    search whose speed field is refit at every iterate (variable
    projection) at the deepest admissible start time, plus a second
    pass that drops anchors near the fitted angular discontinuity.
    This is the robust choice for rotating sources whose arrival phase
    ramps with angle; the joint default is more accurate when the
    separable field matches the data.

    Non-convergence is reported through ``converged=False``, never as an
    exception.
    """
    if start_depth_spans <= 0:
        raise ValueError("start_depth_spans must be > 0")
    n = len(obs)
    if n < order.unknown_count + 1:
        raise InsufficientAnchors(
            f"NTDOA with {order.unknown_count} unknowns needs >= "
            f"{order.unknown_count + 1} anchors, got {n}"
        )
    ax, ay, t = _arrays(obs)

    try:
        warm = mtdoa(obs, config)
        x0, y0 = warm.source.x, warm.source.y
        t0, c0 = warm.start_time, warm.speed.taylor[0]
    except SingularGeometry:
        x0, y0, t0, c0 = _heuristic_seed(ax, ay, t)

    k = order.taylor_order
    ell = order.fourier_terms
    params0 = np.zeros(order.unknown_count)
    params0[0:3] = (t0, x0, y0)
    params0[3] = c0
    for i in range(ell):  # angular frequencies start at 1, 2, ...
        params0[3 + k + 1 + 3 * i] = float(i + 1)

    t_min = float(t.min())
    span = float(np.ptp(t))
    span_unit = max(span, abs(t_min) * 1e-6, 1e-12)
    t_low = t_min - start_depth_spans * span_unit

    if projected:
        return _projected_ntdoa(
            ax, ay, t, np.array([x0, y0]), order, config, t_min, t_low
        )

    def objective(params: np.ndarray) -> float:
        return ntdoa_objective(
            np.ascontiguousarray(params), ax, ay, t, k, ell, PENALTY_WEIGHT, t_min, t_low
        )

    budget = (
        config.max_iterations
        if config.max_iterations is not None
        else _NTDOA_ITERATIONS_PER_DIM * order.unknown_count
    )
    # Good-enough threshold for cutting the candidate sweep short, scaled
    # to the squared-range magnitude of the scenario.
    r2_scale = float(np.median((ax - x0) ** 2 + (ay - y0) ** 2))
    early_stop = 1e-12 * max(r2_scale * r2_scale, 1e-30)

    def all_candidates():
        yield params0
        # Offset-start seeds: with the start time pushed below the
        # earliest arrival, the separable field approaches an additive
        # time model that locates rotating (phase-ramped) sources.
        depths = [d for d in _SEED_DEPTHS if d < start_depth_spans]
        depths.append(start_depth_spans)
        for depth in depths:
            t0_deep = t_min - depth * span_unit
            seed = _separable_fit_seed(ax, ay, t, x0, y0, t0_deep, k, ell)
            if seed is not None:
                yield seed
        # Source-only search at the deepest admissible start time, with
        # the speed field refit at every source iterate (variable
        # projection); its optimum seeds a full polish like any other
        # candidate.
        t0_deep = t_low

        def source_objective(xy: np.ndarray) -> float:
            p = _separable_fit_seed(
                ax, ay, t, xy[0], xy[1], t0_deep, k, ell, iterations=_VP_FIT_ITERATIONS
            )
            if p is None:
                return math.inf
            return objective(p)

        try:
            vp = nelder_mead(
                source_objective,
                np.array([x0, y0]),
                replace(config, max_iterations=_VP_ITERATIONS, initial_rel_step=0.1),
            )
        except InvalidStart:
            vp = None
        if vp is not None:
            seed = _separable_fit_seed(ax, ay, t, vp.x[0], vp.x[1], t0_deep, k, ell)
            if seed is not None:
                yield seed
        for cand in _ntdoa_candidates(params0, ax, ay, k, ell):
            if cand is not params0:
                yield cand

    res: SimplexResult | None = None
    total_iterations = 0
    for cand in all_candidates():
        attempt = _minimize_with_restarts(objective, cand, config, budget=budget)
        total_iterations += attempt.iterations
        if res is None or attempt.f < res.f:
            res = attempt
        if res.f <= early_stop:
            break
    assert res is not None
    res = replace(res, iterations=total_iterations)
    p = res.x
    taylor = tuple(float(v) for v in p[3 : 3 + k + 1])
    fourier = tuple(
        (float(p[3 + k + 1 + 3 * i]), float(p[3 + k + 1 + 3 * i + 1]), float(p[3 + k + 1 + 3 * i + 2]))
        for i in range(ell)
    )
    return Estimate(
        source=Point2(float(p[1]), float(p[2])),
        start_time=float(p[0]),
        speed=SpeedModel(taylor=taylor, fourier=fourier),
        objective_value=res.f,
        solver=SolverKind.NTDOA,
        converged=res.converged,
        iterations=res.iterations,
    )
