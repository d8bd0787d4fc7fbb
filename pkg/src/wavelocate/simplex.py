"""In-house Nelder-Mead simplex minimizer shared by the estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidStart


@dataclass(frozen=True)
class SimplexConfig:
    """Stopping rules and move coefficients for the simplex search.

    ``max_iterations=None`` means 200 per dimension.  Convergence
    requires both the simplex diameter (x_tolerance) and the objective
    spread (f_tolerance) criteria.
    """

    x_tolerance: float = 1e-8
    f_tolerance: float = 1e-10
    max_iterations: Optional[int] = None
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    initial_rel_step: float = 0.05
    initial_zero_step: float = 0.00025

    def __post_init__(self) -> None:
        if self.x_tolerance <= 0 or self.f_tolerance <= 0:
            raise ValueError("tolerances must be > 0")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.reflection > 0):
            raise ValueError("reflection must be > 0")
        if not (self.expansion > 1):
            raise ValueError("expansion must be > 1")
        if not (0 < self.contraction < 1):
            raise ValueError("contraction must be in (0, 1)")
        if not (0 < self.shrink < 1):
            raise ValueError("shrink must be in (0, 1)")
        if self.initial_rel_step <= 0 or self.initial_zero_step <= 0:
            raise ValueError("initial simplex steps must be > 0")

    def iteration_cap(self, n: int) -> int:
        return self.max_iterations if self.max_iterations is not None else 200 * n


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    f: float
    converged: bool
    iterations: int
    evaluations: int


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    config: SimplexConfig = SimplexConfig(),
) -> SimplexResult:
    """Minimize ``objective`` from ``x0``.

    Raises InvalidStart if the objective is not finite at any initial
    simplex vertex.  NaN objective values encountered later are treated
    as +inf so the search keeps a well-ordered simplex.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    if n < 1:
        raise ValueError("x0 must have at least one coordinate")
    cap = config.iteration_cap(n)
    evals = 0

    def call(x: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        fv = float(objective(x))
        return math.inf if math.isnan(fv) else fv

    # Initial simplex: per-coordinate relative perturbation, absolute for
    # zero coordinates.
    simplex = np.tile(x0, (n + 1, 1))
    for i in range(n):
        if simplex[i + 1, i] != 0.0:
            simplex[i + 1, i] *= 1.0 + config.initial_rel_step
        else:
            simplex[i + 1, i] = config.initial_zero_step
    fvals = np.array([call(v) for v in simplex])
    if not np.all(np.isfinite(fvals)):
        raise InvalidStart("objective not finite at initial simplex")

    rho = config.reflection
    chi = config.expansion
    psi = config.contraction
    sigma = config.shrink

    converged = False
    iterations = 0
    while iterations < cap:
        order = np.argsort(fvals, kind="stable")
        simplex = simplex[order]
        fvals = fvals[order]

        x_spread = np.max(np.abs(simplex[1:] - simplex[0]))
        f_spread = np.max(np.abs(fvals[1:] - fvals[0]))
        if x_spread <= config.x_tolerance and f_spread <= config.f_tolerance:
            converged = True
            break

        iterations += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]

        xr = centroid + rho * (centroid - worst)
        fr = call(xr)
        if fr < fvals[0]:
            xe = centroid + rho * chi * (centroid - worst)
            fe = call(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:  # outside contraction
                xc = centroid + psi * rho * (centroid - worst)
                fc = call(xc)
                if fc <= fr:
                    simplex[-1], fvals[-1] = xc, fc
                else:
                    _shrink(simplex, fvals, sigma, call)
            else:  # inside contraction
                xc = centroid - psi * (centroid - worst)
                fc = call(xc)
                if fc < fvals[-1]:
                    simplex[-1], fvals[-1] = xc, fc
                else:
                    _shrink(simplex, fvals, sigma, call)

    order = np.argsort(fvals, kind="stable")
    best = int(order[0])
    return SimplexResult(
        x=simplex[best].copy(),
        f=float(fvals[best]),
        converged=converged,
        iterations=iterations,
        evaluations=evals,
    )


def _shrink(simplex: np.ndarray, fvals: np.ndarray, sigma: float, call) -> None:
    for i in range(1, simplex.shape[0]):
        simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
        fvals[i] = call(simplex[i])
