import json

import numpy as np
import pytest

from wavelocate.cli import main
from wavelocate.io import read_anchor_csv, read_scenario_json, write_anchor_csv, write_pgm
from wavelocate.model import Point2
from wavelocate.simulate import PlacementSpec, place_anchors, simulate_isotropic


def test_simulate_then_localize_round_trip(tmp_path, capsys):
    scen = tmp_path / "scen.json"
    assert main([
        "simulate", "--medium", "iso", "--source", "0.4,0.6", "--t0", "0.1",
        "--c", "1.5", "--anchors", "10", "--seed", "3", "--out", str(scen),
    ]) == 0
    scenario = read_scenario_json(scen)
    anchors = tmp_path / "anchors.csv"
    write_anchor_csv(anchors, scenario.anchors)
    est_path = tmp_path / "est.json"
    assert main([
        "localize", "--anchors", str(anchors), "--solver", "mtdoa",
        "--out", str(est_path),
    ]) == 0
    est = json.loads(est_path.read_text())
    assert abs(est["source"][0] - 0.4) < 1e-6
    assert abs(est["source"][1] - 0.6) < 1e-6
    assert abs(est["t0"] - 0.1) < 1e-6


def test_simulate_aniso_requires_model(tmp_path):
    code = main([
        "simulate", "--medium", "aniso", "--source", "0.5,0.5",
        "--anchors", "10", "--out", str(tmp_path / "s.json"),
    ])
    assert code == 1


def test_simulate_aniso_with_model(tmp_path):
    model = tmp_path / "model.json"
    model.write_text(json.dumps({"taylor": [1.0, 0.05], "fourier": [[1.0, 0.1, -0.05]]}))
    out = tmp_path / "s.json"
    assert main([
        "simulate", "--medium", "aniso", "--source", "0.5,0.5", "--t0", "0.2",
        "--speed-model", str(model), "--anchors", "12", "--out", str(out),
    ]) == 0
    assert read_scenario_json(out).n_anchors == 12


def test_localize_insufficient_anchors_exit_2(tmp_path):
    src = Point2(0.5, 0.5)
    pts = place_anchors(PlacementSpec(Point2(0, 0), Point2(1, 1), 8, 0.05, 1), src)
    obs = simulate_isotropic(src, 0.0, 1.0, pts)
    path = tmp_path / "a8.csv"
    write_anchor_csv(path, obs)
    assert main([
        "localize", "--anchors", str(path), "--solver", "ntdoa",
        "--out", str(tmp_path / "e.json"),
    ]) == 2


def test_missing_file_exit_1(tmp_path):
    assert main([
        "localize", "--anchors", str(tmp_path / "nope.csv"), "--solver", "mtdoa",
        "--out", str(tmp_path / "e.json"),
    ]) == 1


def test_unknown_flag_exit_1(capsys):
    assert main(["--bogus"]) == 1
    assert main(["localize"]) == 1  # missing required flags


def test_ingest_subcommand(tmp_path):
    n, c, center = 48, 2.0, (22.3, 25.1)
    xs = np.arange(n) + 0.5
    xx, yy = np.meshgrid(xs, xs)
    rr = np.hypot(xx - center[0], yy - center[1])
    frames = []
    for k, t in enumerate([3.0, 5.0, 7.0]):
        p = tmp_path / f"f{k}.pgm"
        write_pgm(p, (rr <= c * t).astype(float))
        frames.append({"path": p.name, "timestamp": t})
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps({"pixel_size": 1.0, "threshold": 0.5, "frames": frames}))
    out = tmp_path / "anchors.csv"
    assert main([
        "ingest", "--manifest", str(manifest), "--samples", "20",
        "--seed", "1", "--out", str(out),
    ]) == 0
    assert len(read_anchor_csv(out)) > 0


def test_bench_subcommand_writes_outputs(tmp_path):
    config = tmp_path / "bench.json"
    config.write_text(json.dumps({
        "scenario_source": "synthetic_isotropic",
        "trials": 10,
        "anchor_counts": [10],
        "noise_sigma": 0.0,
        "master_seed": 2,
        "solvers": [{"kind": "mtdoa"}],
    }))
    out = tmp_path / "results"
    assert main(["bench", "--config", str(config), "--out-dir", str(out)]) == 0
    for name in ("cdf.csv", "mae.csv", "speeds.csv", "manifest.json"):
        assert (out / name).exists()
