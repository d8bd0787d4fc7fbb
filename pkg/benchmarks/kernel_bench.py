"""Compare the compiled and pure-numpy hot-kernel backends.

Times the reaction-diffusion stepper and the nonlinear localization
objective on representative workloads and verifies the stepper outputs
are bit-identical across backends.

Run:  python3 benchmarks/kernel_bench.py
"""

from __future__ import annotations

import time

import numpy as np

from wavelocate._kernels import _core, pure


def _fhn_state(n: int):
    rng = np.random.default_rng(0)
    u = rng.uniform(0.0, 1.0, (n, n))
    v = rng.uniform(0.0, 0.2, (n, n))
    cross = np.full((4, n, n), np.inf)
    count = np.zeros((n, n), dtype=np.int32)
    armed = np.ones((n, n), dtype=np.uint8)
    return u, v, cross, count, armed


def bench_fhn(backend, n: int, steps: int) -> tuple[float, np.ndarray]:
    u, v, cross, count, armed = _fhn_state(n)
    start = time.perf_counter()
    backend.fhn_advance(
        u, v, cross, count, armed,
        0.2, 0.03, 0.03, 0.6, 2.5, 0.02,  # diffusion, a, eps, beta, gamma, delta
        0.02, 1.0 / (0.4 * 0.4), 0.5, 0.1, 0.0, steps,
    )
    return time.perf_counter() - start, u


def bench_objective(backend, n_anchors: int, evals: int) -> tuple[float, float]:
    rng = np.random.default_rng(1)
    ax = rng.uniform(0.0, 80.0, n_anchors)
    ay = rng.uniform(0.0, 80.0, n_anchors)
    t = rng.uniform(0.0, 300.0, n_anchors)
    params = np.array([-10.0, 40.0, 40.0, 0.3, 0.001, 1.0, 0.05, -0.02])
    start = time.perf_counter()
    value = 0.0
    for _ in range(evals):
        value = backend.ntdoa_objective(params, ax, ay, t, 1, 1, 1e6, float(t.min()), -1e4)
    return time.perf_counter() - start, value


def main() -> None:
    print(f"backends: compiled={_core.NAME!r} fallback={pure.NAME!r}")

    n, steps = 200, 200
    t_c, u_c = bench_fhn(_core, n, steps)
    t_p, u_p = bench_fhn(pure, n, steps)
    identical = np.array_equal(u_c, u_p)
    print(f"fhn_advance {n}x{n}x{steps}: compiled {t_c:.3f}s, pure {t_p:.3f}s, "
          f"speedup {t_p / t_c:.1f}x, bit-identical={identical}")

    n_anchors, evals = 50, 20000
    t_c, v_c = bench_objective(_core, n_anchors, evals)
    t_p, v_p = bench_objective(pure, n_anchors, evals)
    print(f"ntdoa_objective {n_anchors} anchors x{evals}: compiled {t_c:.3f}s, "
          f"pure {t_p:.3f}s, speedup {t_p / t_c:.1f}x, "
          f"values match={np.isclose(v_c, v_p, rtol=1e-12)}")


if __name__ == "__main__":
    main()
