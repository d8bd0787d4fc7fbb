"""Monte-Carlo benchmark harness: error CDF curves, MAE versus anchor
count, and mean-speed comparison across the three solvers.

Every trial derives its own seed by stable hashing of
(master_seed, anchor_count, trial index), so trials are independent and
the aggregate result is identical no matter how trials are scheduled.
Failed or non-converged trials are recorded as NaN and reported through
the failure rate; they never abort a sweep.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import WavelocateError
from .fhn import ActivationMap, FhnConfig, run_fhn, sample_fhn_anchors
from .io import read_anchor_csv
from .model import (
    AnchorObservation,
    Estimate,
    Point2,
    SolverKind,
    SpeedModel,
    polar_relative,
    speed_at,
)
from .simulate import PlacementSpec, place_anchors, simulate_anisotropic, simulate_isotropic
from .solvers import NtdoaOrder, mtdoa, ntdoa, tdoa_linear

SCENARIO_SOURCES = (
    "synthetic_isotropic",
    "synthetic_anisotropic",
    "fhn",
    "ingested_csv",
)


@dataclass(frozen=True)
class SolverSpec:
    """One solver column of the benchmark.

    ``c_assumed`` is required for TDOA (and echoed as its speed
    estimate); ``order``, ``start_depth_spans`` and ``projected`` apply
    to NTDOA only.
    """

    kind: SolverKind
    c_assumed: Optional[float] = None
    order: NtdoaOrder = NtdoaOrder()
    start_depth_spans: float = 3.0
    projected: bool = False

    def __post_init__(self) -> None:
        if self.kind is SolverKind.TDOA and (self.c_assumed is None or self.c_assumed <= 0):
            raise ValueError("TDOA requires c_assumed > 0")

    @property
    def label(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class BenchConfig:
    """Scenario source, sweep dimensions, and solver set for one run."""

    scenario_source: str
    solvers: tuple[SolverSpec, ...]
    trials: int = 1000
    anchor_counts: tuple[int, ...] = (50,)
    noise_sigma: float = 0.0
    master_seed: int = 0
    # synthetic_* sources
    region_size: float = 1.0
    exclusion_radius: float = 0.05
    # fhn source
    fhn_config: Optional[FhnConfig] = None
    fhn_pulse: int = 2
    fhn_exclusion: float = 24.0
    # ingested_csv source
    csv_path: Optional[str] = None
    csv_source: Optional[tuple[float, float]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "solvers", tuple(self.solvers))
        object.__setattr__(self, "anchor_counts", tuple(int(n) for n in self.anchor_counts))
        if self.scenario_source not in SCENARIO_SOURCES:
            raise ValueError(
                f"scenario_source must be one of {SCENARIO_SOURCES}, got {self.scenario_source!r}"
            )
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.anchor_counts or any(n < 4 for n in self.anchor_counts):
            raise ValueError("anchor_counts must be non-empty, each >= 4")
        if not self.solvers:
            raise ValueError("at least one solver is required")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.scenario_source == "ingested_csv":
            if self.csv_path is None or self.csv_source is None:
                raise ValueError("ingested_csv needs csv_path and csv_source (ground truth)")

    labels = property(lambda self: tuple(s.label for s in self.solvers))


@dataclass(frozen=True)
class Cell:
    """Per (solver, anchor_count) trial records.  NaN marks a failed or
    non-converged trial."""

    errors: tuple[float, ...]
    speeds: tuple[float, ...]

    @property
    def failures(self) -> int:
        return sum(1 for e in self.errors if math.isnan(e))

    @property
    def mae(self) -> float:
        ok = [e for e in self.errors if not math.isnan(e)]
        return float("nan") if not ok else float(np.mean(ok))

    @property
    def mean_speed(self) -> float:
        ok = [s for s in self.speeds if not math.isnan(s)]
        return float("nan") if not ok else float(np.mean(ok))


@dataclass(frozen=True)
class BenchResult:
    config: BenchConfig
    cells: dict = field(compare=False)  # (label, anchor_count) -> Cell


def _trial_seed(master_seed: int, anchor_count: int, trial: int) -> int:
    digest = hashlib.sha256(f"{master_seed}:{anchor_count}:{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _noisy(obs: list[AnchorObservation], sigma: float, seed: int) -> list[AnchorObservation]:
    if sigma == 0.0:
        return obs
    noise = np.random.default_rng(seed).normal(0.0, sigma, len(obs))
    return [
        AnchorObservation(o.position, o.arrival_time + float(e)) for o, e in zip(obs, noise)
    ]


def _scenario_factory(
    config: BenchConfig,
) -> Callable[[int, int], tuple[Point2, list[AnchorObservation]]]:
    """Returns trial -> (true source, observations); captures any shared
    state (FHN activation map, ingested CSV) exactly once."""
    size = config.region_size
    lo, hi = Point2(0.0, 0.0), Point2(size, size)

    if config.scenario_source == "synthetic_isotropic":

        def make(n: int, seed: int):
            rng = np.random.default_rng(seed)
            src = Point2(rng.uniform(0.2 * size, 0.8 * size), rng.uniform(0.2 * size, 0.8 * size))
            c = rng.uniform(0.5, 2.0)
            pts = place_anchors(PlacementSpec(lo, hi, n, config.exclusion_radius, seed), src)
            obs = simulate_isotropic(src, 0.5, c, pts, config.noise_sigma, seed + 1)
            return src, obs

        return make

    if config.scenario_source == "synthetic_anisotropic":

        def make(n: int, seed: int):
            rng = np.random.default_rng(seed)
            src = Point2(rng.uniform(0.2 * size, 0.8 * size), rng.uniform(0.2 * size, 0.8 * size))
            model = SpeedModel(
                taylor=(rng.uniform(0.5, 2.0), rng.uniform(-0.2, 0.2)),
                fourier=((1.0, rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15)),),
            )
            pts = place_anchors(PlacementSpec(lo, hi, n, config.exclusion_radius, seed), src)
            obs = simulate_anisotropic(src, 0.5, model, pts, config.noise_sigma, seed + 1)
            return src, obs

        return make

    if config.scenario_source == "fhn":
        amap: ActivationMap = run_fhn(config.fhn_config or FhnConfig())
        core = amap.rotor_core
        domain = amap.config.domain_size

        def make(n: int, seed: int):
            pts = place_anchors(
                PlacementSpec(
                    Point2(0.0, 0.0), Point2(domain, domain), n, config.fhn_exclusion, seed
                ),
                core,
            )
            obs = sample_fhn_anchors(amap, pts, config.fhn_pulse)
            return core, _noisy(obs, config.noise_sigma, seed + 1)

        return make

    # ingested_csv
    all_obs = read_anchor_csv(config.csv_path)
    truth = Point2(*config.csv_source)

    def make(n: int, seed: int):
        if n > len(all_obs):
            raise ValueError(f"CSV has {len(all_obs)} anchors, trial needs {n}")
        rng = np.random.default_rng(seed)
        picks = np.sort(rng.choice(len(all_obs), size=n, replace=False))
        obs = [all_obs[i] for i in picks]
        return truth, _noisy(obs, config.noise_sigma, seed + 1)

    return make


def _solver_speed(spec: SolverSpec, est: Estimate, obs: list[AnchorObservation]) -> float:
    if spec.kind is SolverKind.TDOA:
        return float(spec.c_assumed)
    if spec.kind is SolverKind.MTDOA:
        return float(est.speed.taylor[0])
    values = []
    for o in obs:
        r, theta = polar_relative(o.position, est.source)
        values.append(speed_at(est.speed, r, theta))
    return float(np.mean(values))


def _run_solver(spec: SolverSpec, obs: list[AnchorObservation]) -> Estimate:
    if spec.kind is SolverKind.TDOA:
        return tdoa_linear(obs, spec.c_assumed)
    if spec.kind is SolverKind.MTDOA:
        return mtdoa(obs)
    return ntdoa(
        obs,
        spec.order,
        start_depth_spans=spec.start_depth_spans,
        projected=spec.projected,
    )


def run_bench(config: BenchConfig) -> BenchResult:
    """Run the full (solver x anchor_count x trial) sweep.

    Scenario inputs are generated once per (anchor_count, trial) and
    shared by all solvers, so solver columns are directly comparable.
    """
    make = _scenario_factory(config)
    cells: dict[tuple[str, int], Cell] = {}
    for n in config.anchor_counts:
        records: dict[str, tuple[list[float], list[float]]] = {
            spec.label: ([], []) for spec in config.solvers
        }
        for trial in range(config.trials):
            seed = _trial_seed(config.master_seed, n, trial)
            try:
                truth, obs = make(n, seed)
            except WavelocateError:
                for spec in config.solvers:
                    records[spec.label][0].append(float("nan"))
                    records[spec.label][1].append(float("nan"))
                continue
            for spec in config.solvers:
                errs, speeds = records[spec.label]
                try:
                    est = _run_solver(spec, obs)
                except WavelocateError:
                    est = None
                if est is None or not est.converged:
                    errs.append(float("nan"))
                    speeds.append(float("nan"))
                else:
                    errs.append(truth.distance_to(est.source))
                    speeds.append(_solver_speed(spec, est, obs))
        for spec in config.solvers:
            errs, speeds = records[spec.label]
            cells[(spec.label, n)] = Cell(tuple(errs), tuple(speeds))
    return BenchResult(config=config, cells=cells)


def cdf_table(result: BenchResult, radii: Sequence[float]) -> list[tuple[float, str, float]]:
    """Rows (radius, solver, percentage within radius).  Failed trials
    count in the denominator, so 100% requires every trial converged and
    within the radius."""
    rows = []
    for radius in radii:
        for spec in result.config.solvers:
            errors = [
                e
                for n in result.config.anchor_counts
                for e in result.cells[(spec.label, n)].errors
            ]
            within = sum(1 for e in errors if not math.isnan(e) and e <= radius)
            rows.append((float(radius), spec.label, 100.0 * within / len(errors)))
    return rows


def mae_table(result: BenchResult) -> list[tuple[int, str, float, float]]:
    """Rows (anchor_count, solver, MAE over converged trials, failure
    rate)."""
    rows = []
    for n in result.config.anchor_counts:
        for spec in result.config.solvers:
            cell = result.cells[(spec.label, n)]
            rows.append((n, spec.label, cell.mae, cell.failures / len(cell.errors)))
    return rows


def speed_table(result: BenchResult) -> list[tuple[str, float]]:
    """Rows (solver, mean estimated speed over converged trials)."""
    rows = []
    for spec in result.config.solvers:
        speeds = [
            s
            for n in result.config.anchor_counts
            for s in result.cells[(spec.label, n)].speeds
            if not math.isnan(s)
        ]
        rows.append((spec.label, float(np.mean(speeds)) if speeds else float("nan")))
    return rows


def _config_to_json(config: BenchConfig) -> dict:
    obj = asdict(config)
    obj["solvers"] = [
        {
            "kind": spec.kind.value,
            "c_assumed": spec.c_assumed,
            "order": [spec.order.taylor_order, spec.order.fourier_terms],
            "start_depth_spans": spec.start_depth_spans,
            "projected": spec.projected,
        }
        for spec in config.solvers
    ]
    return obj


def write_outputs(
    result: BenchResult, out_dir: str | Path, radii: Optional[Sequence[float]] = None
) -> None:
    """Write cdf.csv, mae.csv, speeds.csv and a run-manifest JSON.

    Output bytes depend only on the result, so identical configs produce
    identical files.  Default radii: 40 even steps up to the largest
    observed error."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if radii is None:
        finite = [
            e
            for cell in result.cells.values()
            for e in cell.errors
            if not math.isnan(e)
        ]
        top = max(finite) if finite else 1.0
        radii = [top * k / 40.0 for k in range(41)]

    with open(out / "cdf.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["radius", "solver", "percentage"])
        for radius, solver, pct in cdf_table(result, radii):
            writer.writerow([repr(radius), solver, repr(pct)])
    with open(out / "mae.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["anchor_count", "solver", "mae", "failure_rate"])
        for n, solver, mae, rate in mae_table(result):
            writer.writerow([n, solver, repr(mae), repr(rate)])
    with open(out / "speeds.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["solver", "mean_speed"])
        for solver, speed in speed_table(result):
            writer.writerow([solver, repr(speed)])
    manifest = {
        "config": _config_to_json(result.config),
        "seed_scheme": "sha256(master_seed:anchor_count:trial), first 8 bytes, big-endian",
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
