import json

import pytest

from wavelocate.io import (
    estimate_to_json,
    read_anchor_csv,
    read_scenario_json,
    write_anchor_csv,
    write_estimate_json,
    write_scenario_json,
)
from wavelocate.model import (
    AnchorObservation,
    Anisotropic,
    Estimate,
    IsotropicKnown,
    IsotropicUnknown,
    Point2,
    Scenario,
    SolverKind,
    SpeedModel,
)

OBS = (
    AnchorObservation(Point2(0.125, 0.25), 1.5),
    AnchorObservation(Point2(0.7071067811865476, 0.1), 2.25),
)


def test_anchor_csv_round_trip_exact(tmp_path):
    path = tmp_path / "a.csv"
    write_anchor_csv(path, OBS)
    assert read_anchor_csv(path) == list(OBS)


def test_anchor_csv_header_check(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        read_anchor_csv(path)


@pytest.mark.parametrize(
    "medium",
    [
        IsotropicKnown(0.7),
        IsotropicUnknown(1.2),
        Anisotropic(SpeedModel(taylor=(1.0, 0.05), fourier=((1.0, 0.1, -0.1),))),
    ],
)
def test_scenario_json_round_trip(tmp_path, medium):
    scenario = Scenario(
        source=Point2(0.4, 0.6),
        start_time=0.125,
        medium=medium,
        anchors=OBS,
        noise_sigma=0.01,
        unit_label="mm",
    )
    path = tmp_path / "s.json"
    write_scenario_json(path, scenario)
    assert read_scenario_json(path) == scenario


def test_estimate_json_schema(tmp_path):
    est = Estimate(
        source=Point2(1.0, 2.0),
        start_time=-3.0,
        speed=SpeedModel(taylor=(0.5,), fourier=((1.0, 0.1, 0.2),)),
        objective_value=1e-9,
        solver=SolverKind.NTDOA,
        converged=True,
        iterations=42,
    )
    obj = estimate_to_json(est)
    assert obj["solver"] == "ntdoa"
    assert obj["source"] == [1.0, 2.0]
    assert obj["speed_model"]["fourier"] == [[1.0, 0.1, 0.2]]
    path = tmp_path / "e.json"
    write_estimate_json(path, est)
    assert json.loads(path.read_text()) == obj
