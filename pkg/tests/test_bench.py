import math

import pytest

from wavelocate.bench import (
    BenchConfig,
    BenchResult,
    Cell,
    SolverSpec,
    cdf_table,
    mae_table,
    run_bench,
    speed_table,
    write_outputs,
)
from wavelocate.io import write_anchor_csv
from wavelocate.model import Point2, SolverKind
from wavelocate.simulate import PlacementSpec, place_anchors, simulate_isotropic


def _iso_config(**kw):
    base = dict(
        scenario_source="synthetic_isotropic",
        solvers=(SolverSpec(SolverKind.MTDOA),),
        trials=100,
        anchor_counts=(10,),
        noise_sigma=0.0,
        master_seed=1,
    )
    base.update(kw)
    return BenchConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        _iso_config(trials=0)
    with pytest.raises(ValueError):
        _iso_config(anchor_counts=())
    with pytest.raises(ValueError):
        _iso_config(solvers=())
    with pytest.raises(ValueError):
        _iso_config(scenario_source="bogus")
    with pytest.raises(ValueError):
        SolverSpec(SolverKind.TDOA)  # needs c_assumed
    with pytest.raises(ValueError):
        _iso_config(scenario_source="ingested_csv")  # needs csv_path+csv_source


def test_noiseless_isotropic_mtdoa_exact():
    result = run_bench(_iso_config())
    ((_, _, mae, failure_rate),) = mae_table(result)
    assert mae < 1e-4
    assert failure_rate == 0.0


def test_cdf_counting_and_monotonicity():
    cell = Cell(errors=(1.0, 2.0, 3.0, 4.0), speeds=(1.0,) * 4)
    config = _iso_config(trials=4)
    result = BenchResult(config=config, cells={("mtdoa", 10): cell})
    rows = cdf_table(result, [2.5])
    assert rows == [(2.5, "mtdoa", 50.0)]
    rows = cdf_table(result, [0.0, 1.0, 2.0, 5.0])
    pcts = [pct for _, _, pct in rows]
    assert pcts == sorted(pcts)
    assert pcts[-1] == 100.0


def test_failures_block_full_cdf_and_are_reported():
    cell = Cell(errors=(0.0, float("nan")), speeds=(1.0, float("nan")))
    result = BenchResult(config=_iso_config(trials=2), cells={("mtdoa", 10): cell})
    ((_, _, pct),) = cdf_table(result, [10.0])
    assert pct == 50.0
    ((_, _, mae, failure_rate),) = mae_table(result)
    assert mae == 0.0 and failure_rate == 0.5
    assert cell.failures == 1


def test_speed_table_single_trial():
    cell = Cell(errors=(0.1,), speeds=(2.0,))
    result = BenchResult(config=_iso_config(trials=1), cells={("mtdoa", 10): cell})
    assert speed_table(result) == [("mtdoa", 2.0)]


def test_tdoa_speed_echoes_assumed():
    config = _iso_config(
        solvers=(SolverSpec(SolverKind.TDOA, c_assumed=0.7),), trials=5
    )
    result = run_bench(config)
    assert speed_table(result) == [("tdoa", 0.7)]


def test_outputs_byte_identical(tmp_path):
    config = _iso_config(trials=20)
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    write_outputs(run_bench(config), d1)
    write_outputs(run_bench(config), d2)
    for name in ("cdf.csv", "mae.csv", "speeds.csv", "manifest.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_ingested_csv_source(tmp_path):
    src = Point2(0.5, 0.5)
    pts = place_anchors(
        PlacementSpec(Point2(0.0, 0.0), Point2(1.0, 1.0), 30, 0.05, 7), src
    )
    obs = simulate_isotropic(src, 0.2, 1.1, pts)
    path = tmp_path / "anchors.csv"
    write_anchor_csv(path, obs)
    config = BenchConfig(
        scenario_source="ingested_csv",
        solvers=(SolverSpec(SolverKind.MTDOA),),
        trials=10,
        anchor_counts=(12,),
        csv_path=str(path),
        csv_source=(0.5, 0.5),
        master_seed=3,
    )
    ((_, _, mae, failure_rate),) = mae_table(run_bench(config))
    assert mae < 1e-6 and failure_rate == 0.0


def test_anisotropic_ordering_small():
    config = BenchConfig(
        scenario_source="synthetic_anisotropic",
        solvers=(
            SolverSpec(SolverKind.TDOA, c_assumed=1.0),
            SolverSpec(SolverKind.MTDOA),
            SolverSpec(SolverKind.NTDOA),
        ),
        trials=25,
        anchor_counts=(20,),
        noise_sigma=0.0,
        master_seed=5,
    )
    rows = {solver: mae for _, solver, mae, _ in mae_table(run_bench(config))}
    assert rows["ntdoa"] < rows["mtdoa"]
    assert not math.isnan(rows["tdoa"])
