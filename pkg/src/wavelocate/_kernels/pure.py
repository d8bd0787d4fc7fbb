"""Pure numpy implementations of the hot kernels.

Used when the compiled extension is unavailable or when the
``WAVELOCATE_PURE`` environment variable is set.  The reaction-diffusion
update mirrors the compiled kernel's expression order exactly so both
backends produce bit-identical grids.
"""

from __future__ import annotations

import numpy as np

NAME = "pure"


def _laplacian(u: np.ndarray, inv_dx2: float) -> np.ndarray:
    # Edge padding implements the zero-flux (mirror) boundary.
    p = np.pad(u, 1, mode="edge")
    return (p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:] - 4.0 * u) * inv_dx2


def fhn_advance(
    u: np.ndarray,
    v: np.ndarray,
    cross: np.ndarray,
    count: np.ndarray,
    armed: np.ndarray,
    diffusion: float,
    a: float,
    eps: float,
    beta: float,
    gamma: float,
    delta: float,
    dt: float,
    inv_dx2: float,
    u_th: float,
    hyst: float,
    t_start: float,
    n_steps: int,
    reaction_scale: float = 1.0,
) -> tuple[float, int]:
    """Advance the two-field excitable medium ``n_steps`` explicit Euler
    steps in place, recording rising-edge threshold crossings.

    ``cross`` is (max_pulses, n, n) crossing times (inf = not seen),
    ``count`` the per-cell number of recorded pulses, ``armed`` marks
    cells eligible to record their next rising edge.

    Returns (max |u| over the chunk, number of crossings dropped because
    ``cross`` was full).
    """
    max_pulses = cross.shape[0]
    overflow = 0
    umax = 0.0
    rearm_level = u_th - hyst
    rs = reaction_scale
    for s in range(n_steps):
        lap = _laplacian(u, inv_dx2)
        un = u + dt * ((diffusion * lap + rs * ((u * (1.0 - u)) * (u - a))) - rs * v)
        vn = v + dt * (eps * ((beta * u - gamma * v) - delta))
        t_now = t_start + (s + 1) * dt

        firing = (armed != 0) & (un >= u_th)
        if firing.any():
            ii, jj = np.nonzero(firing)
            slots = count[ii, jj]
            ok = slots < max_pulses
            cross[slots[ok], ii[ok], jj[ok]] = t_now
            count[ii[ok], jj[ok]] += 1
            overflow += int((~ok).sum())
            armed[ii, jj] = 0
        armed[un < rearm_level] = 1

        u[...] = un
        v[...] = vn
        step_max = float(np.abs(un).max())
        if step_max > umax:
            umax = step_max
    return umax, overflow


def ntdoa_objective(
    params: np.ndarray,
    ax: np.ndarray,
    ay: np.ndarray,
    t: np.ndarray,
    taylor_order: int,
    fourier_terms: int,
    penalty_weight: float,
    t_min: float,
    t_low: float,
) -> float:
    """Residual sum for the joint (source, start time, speed field) fit.

    Parameter layout: [t0, x0, y0, a0..aK, (omega, b, d) per angular
    term].  Range and angle are recomputed from the current source
    iterate.  Soft quadratic penalties apply to non-positive evaluated
    speeds and to t0 outside [t_low, t_min]; the lower bound blocks the
    degenerate zero-residual valley at t0 -> -inf where the radial
    coefficients shrink toward zero.
    """
    t0, x0, y0 = params[0], params[1], params[2]
    dx = ax - x0
    dy = ay - y0
    r2 = dx * dx + dy * dy
    r = np.sqrt(r2)

    f = np.zeros_like(r)
    for k in range(taylor_order, -1, -1):  # Horner in R
        f = f * r + params[3 + k]
    g = np.ones_like(r)
    theta = np.arctan2(dy, dx)
    base = 3 + taylor_order + 1
    for ell in range(fourier_terms):
        omega = params[base + 3 * ell]
        b = params[base + 3 * ell + 1]
        d = params[base + 3 * ell + 2]
        g = g + (b * np.cos(omega * theta) + d * np.sin(omega * theta))

    c = f * g
    dt_ = t - t0
    resid = (c * c) * (dt_ * dt_) - r2
    total = float(np.dot(resid, resid))

    neg = np.minimum(c, 0.0)
    total += penalty_weight * float(np.dot(neg, neg))
    t_viol = t0 - t_min
    if t_viol > 0.0:
        total += penalty_weight * t_viol * t_viol
    t_viol = t_low - t0
    if t_viol > 0.0:
        total += penalty_weight * t_viol * t_viol
    return total
