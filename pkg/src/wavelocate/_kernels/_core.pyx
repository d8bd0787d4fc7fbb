# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: explicit reaction-diffusion stepping and the
nonlinear localization objective.

The stepping kernel keeps the exact expression order of the numpy
fallback (and the build disables FP contraction) so both backends
produce bit-identical grids.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, fabs, sin, sqrt

cnp.import_array()

NAME = "cython"


def fhn_advance(
    cnp.ndarray[cnp.float64_t, ndim=2] u_arr,
    cnp.ndarray[cnp.float64_t, ndim=2] v_arr,
    cnp.ndarray[cnp.float64_t, ndim=3] cross_arr,
    cnp.ndarray[cnp.int32_t, ndim=2] count_arr,
    cnp.ndarray[cnp.uint8_t, ndim=2] armed_arr,
    double diffusion,
    double a,
    double eps,
    double beta,
    double gamma,
    double delta,
    double dt,
    double inv_dx2,
    double u_th,
    double hyst,
    double t_start,
    int n_steps,
    double reaction_scale=1.0,
):
    cdef Py_ssize_t n0 = u_arr.shape[0]
    cdef Py_ssize_t n1 = u_arr.shape[1]
    cdef int max_pulses = <int>cross_arr.shape[0]

    cdef cnp.ndarray[cnp.float64_t, ndim=2] u2_arr = np.empty_like(u_arr)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v2_arr = np.empty_like(v_arr)

    cdef double[:, ::1] u = u_arr
    cdef double[:, ::1] v = v_arr
    cdef double[:, ::1] u2 = u2_arr
    cdef double[:, ::1] v2 = v2_arr
    cdef double[:, :, ::1] cross = cross_arr
    cdef cnp.int32_t[:, ::1] count = count_arr
    cdef cnp.uint8_t[:, ::1] armed = armed_arr

    cdef double rearm_level = u_th - hyst
    cdef double umax = 0.0
    cdef long overflow = 0
    cdef Py_ssize_t s, i, j, im, ip, jm, jp
    cdef double lap, un, vn, t_now, au, step_max
    cdef int slot
    cdef double[:, ::1] cu, cv, nu, nv, tmpu, tmpv

    cu = u
    cv = v
    nu = u2
    nv = v2

    for s in range(n_steps):
        t_now = t_start + (s + 1) * dt
        step_max = 0.0
        for i in range(n0):
            im = i - 1 if i > 0 else 0
            ip = i + 1 if i < n0 - 1 else n0 - 1
            for j in range(n1):
                jm = j - 1 if j > 0 else 0
                jp = j + 1 if j < n1 - 1 else n1 - 1
                lap = (cu[im, j] + cu[ip, j] + cu[i, jm] + cu[i, jp] - 4.0 * cu[i, j]) * inv_dx2
                un = cu[i, j] + dt * (
                    (diffusion * lap + reaction_scale * ((cu[i, j] * (1.0 - cu[i, j])) * (cu[i, j] - a)))
                    - reaction_scale * cv[i, j]
                )
                vn = cv[i, j] + dt * (eps * ((beta * cu[i, j] - gamma * cv[i, j]) - delta))
                nu[i, j] = un
                nv[i, j] = vn

                if armed[i, j] != 0 and un >= u_th:
                    slot = count[i, j]
                    if slot < max_pulses:
                        cross[slot, i, j] = t_now
                        count[i, j] = slot + 1
                    else:
                        overflow += 1
                    armed[i, j] = 0
                if un < rearm_level:
                    armed[i, j] = 1

                au = fabs(un)
                if au > step_max:
                    step_max = au
        if step_max > umax:
            umax = step_max
        tmpu = cu
        cu = nu
        nu = tmpu
        tmpv = cv
        cv = nv
        nv = tmpv

    if n_steps % 2 == 1:  # final state lives in the scratch buffers
        u_arr[...] = np.asarray(cu)
        v_arr[...] = np.asarray(cv)
    return umax, overflow


def ntdoa_objective(
    cnp.ndarray[cnp.float64_t, ndim=1] params_arr,
    cnp.ndarray[cnp.float64_t, ndim=1] ax_arr,
    cnp.ndarray[cnp.float64_t, ndim=1] ay_arr,
    cnp.ndarray[cnp.float64_t, ndim=1] t_arr,
    int taylor_order,
    int fourier_terms,
    double penalty_weight,
    double t_min,
    double t_low,
):
    cdef double[::1] params = params_arr
    cdef double[::1] ax = ax_arr
    cdef double[::1] ay = ay_arr
    cdef double[::1] t = t_arr
    cdef Py_ssize_t n = ax.shape[0]
    cdef Py_ssize_t i
    cdef int k, ell, base
    cdef double t0 = params[0]
    cdef double x0 = params[1]
    cdef double y0 = params[2]
    cdef double dx, dy, r2, r, f, g, theta, omega, b, d, c, dti, resid
    cdef double total = 0.0
    cdef double pen = 0.0
    cdef double t_viol

    base = 3 + taylor_order + 1
    for i in range(n):
        dx = ax[i] - x0
        dy = ay[i] - y0
        r2 = dx * dx + dy * dy
        r = sqrt(r2)
        f = 0.0
        for k in range(taylor_order, -1, -1):
            f = f * r + params[3 + k]
        g = 1.0
        if fourier_terms > 0:
            theta = atan2(dy, dx)
            for ell in range(fourier_terms):
                omega = params[base + 3 * ell]
                b = params[base + 3 * ell + 1]
                d = params[base + 3 * ell + 2]
                g = g + (b * cos(omega * theta) + d * sin(omega * theta))
        c = f * g
        dti = t[i] - t0
        resid = (c * c) * (dti * dti) - r2
        total += resid * resid
        if c < 0.0:
            pen += c * c
    total += penalty_weight * pen
    t_viol = t0 - t_min
    if t_viol > 0.0:
        total += penalty_weight * t_viol * t_viol
    t_viol = t_low - t0
    if t_viol > 0.0:
        total += penalty_weight * t_viol * t_viol
    return total
