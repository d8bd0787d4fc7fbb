"""Command-line entry point: simulate, fhn, ingest, localize, bench.

Every subcommand writes a machine-readable result file and prints a
short human-readable summary.  Exit codes: 0 success, 1 usage error
(bad flags, unreadable input), 2 runtime/solver error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bench import BenchConfig, SolverSpec, run_bench, write_outputs
from .errors import WavelocateError
from .fhn import FhnConfig, run_fhn, sample_fhn_anchors, save_activation
from .ingest import extract_anchors, read_manifest
from .io import (
    read_anchor_csv,
    write_anchor_csv,
    write_estimate_json,
    write_scenario_json,
)
from .model import (
    Anisotropic,
    IsotropicKnown,
    IsotropicUnknown,
    Point2,
    Scenario,
    SolverKind,
    SpeedModel,
)
from .simulate import PlacementSpec, place_anchors, simulate_anisotropic, simulate_isotropic
from .solvers import NtdoaOrder, mtdoa, ntdoa, tdoa_linear

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


def _point(text: str) -> Point2:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}")
    return Point2(x, y)


def _order(text: str) -> NtdoaOrder:
    try:
        k, ell = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'K,L', got {text!r}")
    return NtdoaOrder(k, ell)


def _speed_model_from_json(obj: dict) -> SpeedModel:
    return SpeedModel(
        taylor=tuple(obj["taylor"]),
        fourier=tuple(tuple(term) for term in obj.get("fourier", [])),
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavelocate",
        description="Wavefront source localization: simulators, solvers, benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic scenario")
    p.add_argument("--medium", choices=["iso", "aniso"], required=True)
    p.add_argument("--source", type=_point, required=True, metavar="X,Y")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--c", type=float, help="constant speed (iso)")
    p.add_argument("--speed-model", help="JSON file {taylor, fourier} (aniso)")
    p.add_argument("--anchors", type=int, required=True)
    p.add_argument("--region", type=_point, nargs=2, metavar=("XMIN,YMIN", "XMAX,YMAX"),
                   default=[Point2(0.0, 0.0), Point2(1.0, 1.0)])
    p.add_argument("--exclusion", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fhn", help="run the spiral-wave simulator")
    p.add_argument("--config", help="JSON file of FhnConfig overrides")
    p.add_argument("--out", required=True, help="output directory for the activation map")
    p.add_argument("--anchors", type=int, help="sample this many anchors")
    p.add_argument("--pulse", type=int, default=2)
    p.add_argument("--exclusion", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--anchor-out", help="anchor CSV path (with --anchors)")

    p = sub.add_parser("ingest", help="extract anchors from a frame sequence")
    p.add_argument("--manifest", required=True)
    p.add_argument("--samples", type=int, required=True, help="boundary samples per frame")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="anchor CSV path")

    p = sub.add_parser("localize", help="run a solver on an anchor CSV")
    p.add_argument("--anchors", required=True, help="anchor CSV path")
    p.add_argument("--solver", choices=["tdoa", "mtdoa", "ntdoa"], required=True)
    p.add_argument("--c", type=float, help="assumed speed (tdoa)")
    p.add_argument("--order", type=_order, default=NtdoaOrder(), metavar="K,L")
    p.add_argument("--depth", type=float, default=3.0,
                   help="start-time lower bound in arrival-span units (ntdoa)")
    p.add_argument("--projected", action="store_true",
                   help="source-only search with the speed field refit per iterate (ntdoa)")
    p.add_argument("--out", required=True, help="estimate JSON path")

    p = sub.add_parser("bench", help="run a Monte-Carlo benchmark")
    p.add_argument("--config", required=True, help="benchmark config JSON")
    p.add_argument("--out-dir", required=True)
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    pts = place_anchors(
        PlacementSpec(args.region[0], args.region[1], args.anchors, args.exclusion, args.seed),
        args.source,
    )
    if args.medium == "iso":
        if args.c is None:
            print("simulate --medium iso requires --c", file=sys.stderr)
            return EXIT_USAGE
        obs = simulate_isotropic(args.source, args.t0, args.c, pts, args.sigma, args.seed)
        medium = IsotropicKnown(args.c)
    else:
        if args.speed_model is None:
            print("simulate --medium aniso requires --speed-model", file=sys.stderr)
            return EXIT_USAGE
        with open(args.speed_model) as fh:
            model = _speed_model_from_json(json.load(fh))
        obs = simulate_anisotropic(args.source, args.t0, model, pts, args.sigma, args.seed)
        medium = Anisotropic(model)
    scenario = Scenario(
        source=args.source,
        start_time=args.t0,
        medium=medium,
        anchors=tuple(obs),
        noise_sigma=args.sigma,
    )
    write_scenario_json(args.out, scenario)
    print(f"wrote {len(obs)} anchors to {args.out}")
    return EXIT_OK


def _cmd_fhn(args: argparse.Namespace) -> int:
    overrides = {}
    if args.config:
        with open(args.config) as fh:
            overrides = json.load(fh)
    config = FhnConfig(**overrides)
    amap = run_fhn(config)
    save_activation(amap, args.out)
    print(
        f"rotor core ({amap.rotor_core.x:.3f}, {amap.rotor_core.y:.3f}), "
        f"{amap.n_pulses} pulses, map saved to {args.out}"
    )
    if args.anchors:
        pts = place_anchors(
            PlacementSpec(
                Point2(0.0, 0.0),
                Point2(config.domain_size, config.domain_size),
                args.anchors,
                args.exclusion,
                args.seed,
            ),
            amap.rotor_core,
        )
        obs = sample_fhn_anchors(amap, pts, args.pulse)
        out = args.anchor_out or str(Path(args.out) / "anchors.csv")
        write_anchor_csv(out, obs)
        print(f"wrote {len(obs)} anchors to {out}")
    return EXIT_OK


def _cmd_ingest(args: argparse.Namespace) -> int:
    manifest = read_manifest(args.manifest)
    obs = extract_anchors(manifest, args.samples, args.seed)
    write_anchor_csv(args.out, obs)
    print(f"wrote {len(obs)} anchors to {args.out}")
    return EXIT_OK


def _cmd_localize(args: argparse.Namespace) -> int:
    obs = read_anchor_csv(args.anchors)
    if args.solver == "tdoa":
        if args.c is None:
            print("localize --solver tdoa requires --c", file=sys.stderr)
            return EXIT_USAGE
        est = tdoa_linear(obs, args.c)
    elif args.solver == "mtdoa":
        est = mtdoa(obs)
    else:
        est = ntdoa(
            obs, args.order, start_depth_spans=args.depth, projected=args.projected
        )
    write_estimate_json(args.out, est)
    print(
        f"{est.solver.value}: source ({est.source.x:.6g}, {est.source.y:.6g}), "
        f"t0 {est.start_time:.6g}, converged={est.converged}"
    )
    return EXIT_OK


def _bench_config_from_json(obj: dict) -> tuple[BenchConfig, Optional[list[float]]]:
    solvers = []
    for spec in obj["solvers"]:
        order = spec.get("order", [1, 1])
        solvers.append(
            SolverSpec(
                kind=SolverKind(spec["kind"]),
                c_assumed=spec.get("c_assumed"),
                order=NtdoaOrder(int(order[0]), int(order[1])),
                start_depth_spans=float(spec.get("start_depth_spans", 3.0)),
                projected=bool(spec.get("projected", False)),
            )
        )
    fhn_config = FhnConfig(**obj["fhn"]) if "fhn" in obj else None
    csv_source = tuple(obj["csv_source"]) if "csv_source" in obj else None
    config = BenchConfig(
        scenario_source=obj["scenario_source"],
        solvers=tuple(solvers),
        trials=int(obj.get("trials", 1000)),
        anchor_counts=tuple(obj.get("anchor_counts", [50])),
        noise_sigma=float(obj.get("noise_sigma", 0.0)),
        master_seed=int(obj.get("master_seed", 0)),
        region_size=float(obj.get("region_size", 1.0)),
        exclusion_radius=float(obj.get("exclusion_radius", 0.05)),
        fhn_config=fhn_config,
        fhn_pulse=int(obj.get("fhn_pulse", 2)),
        fhn_exclusion=float(obj.get("fhn_exclusion", 24.0)),
        csv_path=obj.get("csv_path"),
        csv_source=csv_source,
    )
    radii = [float(r) for r in obj["radii"]] if "radii" in obj else None
    return config, radii


def _cmd_bench(args: argparse.Namespace) -> int:
    with open(args.config) as fh:
        config, radii = _bench_config_from_json(json.load(fh))
    result = run_bench(config)
    write_outputs(result, args.out_dir, radii)
    print(f"benchmark results written to {args.out_dir}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fhn": _cmd_fhn,
    "ingest": _cmd_ingest,
    "localize": _cmd_localize,
    "bench": _cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WavelocateError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
