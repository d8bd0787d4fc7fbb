import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavelocate.errors import InsufficientAnchors, SingularGeometry
from wavelocate.model import AnchorObservation, Point2, SpeedModel, SolverKind
from wavelocate.simulate import PlacementSpec, place_anchors, simulate_anisotropic, simulate_isotropic
from wavelocate.solvers import NtdoaOrder, mtdoa, ntdoa, tdoa_linear

SRC = Point2(0.4, 0.6)


def _obs(n=10, c=1.3, t0=0.7, seed=0, sigma=0.0):
    pts = place_anchors(
        PlacementSpec(Point2(0.0, 0.0), Point2(1.0, 1.0), n, 0.05, seed), SRC
    )
    return simulate_isotropic(SRC, t0, c, pts, sigma, seed)


def test_tdoa_exact_recovery():
    est = tdoa_linear(_obs(), 1.3)
    assert est.source.distance_to(SRC) < 1e-9
    assert est.start_time == pytest.approx(0.7, abs=1e-9)
    assert est.converged and est.solver is SolverKind.TDOA


def test_tdoa_minimum_anchors():
    with pytest.raises(InsufficientAnchors):
        tdoa_linear(_obs()[:3], 1.0)


def test_tdoa_rejects_bad_speed():
    with pytest.raises(ValueError):
        tdoa_linear(_obs(), 0.0)


def test_tdoa_collinear_anchors_singular():
    obs = [AnchorObservation(Point2(float(i), 0.0), float(i)) for i in range(6)]
    with pytest.raises(SingularGeometry):
        tdoa_linear(obs, 1.0)


@settings(max_examples=20, deadline=None)
@given(
    dx=st.floats(min_value=-5.0, max_value=5.0),
    dy=st.floats(min_value=-5.0, max_value=5.0),
    dt=st.floats(min_value=-5.0, max_value=5.0),
)
def test_tdoa_translation_equivariance(dx, dy, dt):
    obs = _obs()
    shifted = [
        AnchorObservation(Point2(o.position.x + dx, o.position.y + dy), o.arrival_time + dt)
        for o in obs
    ]
    a = tdoa_linear(obs, 1.3)
    b = tdoa_linear(shifted, 1.3)
    assert b.source.x - a.source.x == pytest.approx(dx, abs=1e-7)
    assert b.source.y - a.source.y == pytest.approx(dy, abs=1e-7)
    assert b.start_time - a.start_time == pytest.approx(dt, abs=1e-7)


def test_mtdoa_recovers_speed():
    est = mtdoa(_obs())
    assert est.source.distance_to(SRC) < 1e-7
    assert est.speed.taylor[0] == pytest.approx(1.3, rel=1e-6)
    assert est.start_time == pytest.approx(0.7, rel=1e-6)


def test_mtdoa_minimum_anchors():
    with pytest.raises(InsufficientAnchors):
        mtdoa(_obs()[:4])


def test_mtdoa_flat_times_singular():
    obs = [
        AnchorObservation(Point2(x, y), 1.0)
        for x, y in [(0.1, 0.2), (0.8, 0.3), (0.5, 0.9), (0.2, 0.7), (0.9, 0.8)]
    ]
    with pytest.raises(SingularGeometry):
        mtdoa(obs)


def test_ntdoa_minimum_anchor_rule():
    # default order has 8 unknowns, so 8 anchors are one too few
    assert NtdoaOrder().unknown_count == 8
    with pytest.raises(InsufficientAnchors):
        ntdoa(_obs(8))


def test_ntdoa_rejects_bad_depth():
    with pytest.raises(ValueError):
        ntdoa(_obs(12), start_depth_spans=0.0)


def test_ntdoa_isotropic_reduction_single():
    obs = _obs(12)
    m = mtdoa(obs)
    n = ntdoa(obs)
    assert n.source.distance_to(m.source) <= 1e-7


def test_ntdoa_recovers_anisotropic_truth():
    model = SpeedModel(taylor=(1.1, 0.08), fourier=((1.0, 0.1, -0.08),))
    pts = place_anchors(
        PlacementSpec(Point2(0.0, 0.0), Point2(1.0, 1.0), 14, 0.05, 11), SRC
    )
    obs = simulate_anisotropic(SRC, 0.5, model, pts)
    est = ntdoa(obs)
    assert est.source.distance_to(SRC) < 1e-3
    assert est.objective_value <= 1e-8


def test_ntdoa_projected_runs_on_synthetic():
    # Projected mode trades accuracy on synthetic isotropic data for
    # robustness on rotor-like data, so the bound here is loose: it
    # should land in the right region, not on the exact source.
    obs = _obs(20)
    est = ntdoa(obs, NtdoaOrder(1, 2), start_depth_spans=50.0, projected=True)
    assert est.solver is SolverKind.NTDOA
    assert np.isfinite(est.objective_value)
    assert est.converged
    assert est.source.distance_to(SRC) < 0.25


def test_order_validation():
    with pytest.raises(ValueError):
        NtdoaOrder(-1, 0)
    assert NtdoaOrder(2, 3).unknown_count == 2 + 9 + 4
