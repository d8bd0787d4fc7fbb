import numpy as np
import pytest

from wavelocate.errors import InvalidStart
from wavelocate.simplex import SimplexConfig, nelder_mead


def rosenbrock(x):
    return (1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2


def test_rosenbrock_from_standard_start():
    res = nelder_mead(rosenbrock, [-1.2, 1.0], SimplexConfig(max_iterations=5000))
    assert res.f < 1e-8
    assert res.x == pytest.approx([1.0, 1.0], abs=1e-3)


def test_quadratic_bowl_converges():
    res = nelder_mead(lambda x: float(np.sum((x - 3.0) ** 2)), [0.0, 0.0, 0.0])
    assert res.converged
    assert res.x == pytest.approx([3.0, 3.0, 3.0], abs=1e-6)


def test_one_dimensional():
    res = nelder_mead(lambda x: (x[0] - 2.0) ** 4, [10.0])
    assert res.x[0] == pytest.approx(2.0, abs=1e-2)


def test_invalid_start_raises():
    with pytest.raises(InvalidStart):
        nelder_mead(lambda x: float("nan"), [0.0, 0.0])


def test_nan_mid_search_treated_as_infinite():
    # objective is NaN in a band away from the start; search must not
    # crash and must still improve on the start value
    def obj(x):
        if 1.0 < x[0] < 2.0:
            return float("nan")
        return (x[0] - 5.0) ** 2

    res = nelder_mead(obj, [0.0], SimplexConfig(max_iterations=500))
    assert np.isfinite(res.f)
    assert res.f <= obj(np.array([0.0]))


def test_config_validation():
    with pytest.raises(ValueError):
        SimplexConfig(x_tolerance=0.0)
    with pytest.raises(ValueError):
        SimplexConfig(expansion=1.0)
    with pytest.raises(ValueError):
        SimplexConfig(contraction=1.5)
    with pytest.raises(ValueError):
        SimplexConfig(max_iterations=0)


def test_iteration_cap_default_scales_with_dimension():
    assert SimplexConfig().iteration_cap(4) == 800
    assert SimplexConfig(max_iterations=17).iteration_cap(4) == 17


def test_deterministic():
    a = nelder_mead(rosenbrock, [-1.2, 1.0])
    b = nelder_mead(rosenbrock, [-1.2, 1.0])
    assert np.array_equal(a.x, b.x) and a.f == b.f and a.iterations == b.iterations
