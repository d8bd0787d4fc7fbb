"""File formats shared across modules: anchor CSV, scenario JSON,
estimate JSON.

Anchor CSV: header ``x,y,t``, one row per anchor, plain decimal notation.
Scenario JSON: ``source:[x,y]``, ``start_time``, ``medium:{type,params}``,
``noise_sigma``, ``anchors:[[x,y,t],...]``, ``unit_label``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

from .model import (
    AnchorObservation,
    Anisotropic,
    Estimate,
    IsotropicKnown,
    IsotropicUnknown,
    Medium,
    Point2,
    Scenario,
    SpeedModel,
)


def write_anchor_csv(path: str | Path, anchors: Iterable[AnchorObservation]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "t"])
        for obs in anchors:
            writer.writerow(
                [repr(float(obs.position.x)), repr(float(obs.position.y)), repr(float(obs.arrival_time))]
            )


def read_anchor_csv(path: str | Path) -> list[AnchorObservation]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip().lower() for h in header] != ["x", "y", "t"]:
            raise ValueError(f"{path}: expected header 'x,y,t', got {header!r}")
        out = []
        for row in reader:
            if not row:
                continue
            x, y, t = (float(v) for v in row[:3])
            out.append(AnchorObservation(Point2(x, y), t))
    return out


def _medium_to_json(medium: Medium) -> dict:
    if isinstance(medium, IsotropicKnown):
        return {"type": "isotropic_known", "params": {"c": medium.c}}
    if isinstance(medium, IsotropicUnknown):
        return {"type": "isotropic_unknown", "params": {"c": medium.c}}
    if isinstance(medium, Anisotropic):
        return {
            "type": "anisotropic",
            "params": {
                "taylor": list(medium.model.taylor),
                "fourier": [list(term) for term in medium.model.fourier],
            },
        }
    raise TypeError(f"unknown medium {medium!r}")


def _medium_from_json(obj: dict) -> Medium:
    kind = obj["type"]
    params = obj.get("params", {})
    if kind == "isotropic_known":
        return IsotropicKnown(float(params["c"]))
    if kind == "isotropic_unknown":
        return IsotropicUnknown(float(params["c"]))
    if kind == "anisotropic":
        model = SpeedModel(
            taylor=tuple(params["taylor"]),
            fourier=tuple(tuple(term) for term in params.get("fourier", [])),
        )
        return Anisotropic(model)
    raise ValueError(f"unknown medium type {kind!r}")


def write_scenario_json(path: str | Path, scenario: Scenario) -> None:
    obj = {
        "source": [scenario.source.x, scenario.source.y],
        "start_time": scenario.start_time,
        "medium": _medium_to_json(scenario.medium),
        "noise_sigma": scenario.noise_sigma,
        "anchors": [[a.position.x, a.position.y, a.arrival_time] for a in scenario.anchors],
        "unit_label": scenario.unit_label,
    }
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def read_scenario_json(path: str | Path) -> Scenario:
    with open(path) as fh:
        obj = json.load(fh)
    anchors = tuple(
        AnchorObservation(Point2(float(x), float(y)), float(t)) for x, y, t in obj["anchors"]
    )
    return Scenario(
        source=Point2(*(float(v) for v in obj["source"])),
        start_time=float(obj["start_time"]),
        medium=_medium_from_json(obj["medium"]),
        anchors=anchors,
        noise_sigma=float(obj.get("noise_sigma", 0.0)),
        unit_label=obj.get("unit_label", ""),
    )


def estimate_to_json(estimate: Estimate) -> dict:
    """One schema for all three solvers (degenerate speed_model for
    TDOA/mTDOA) so downstream tooling is solver-agnostic."""
    return {
        "solver": estimate.solver.value,
        "source": [estimate.source.x, estimate.source.y],
        "t0": estimate.start_time,
        "speed_model": {
            "taylor": list(estimate.speed.taylor),
            "fourier": [list(term) for term in estimate.speed.fourier],
        },
        "objective_value": estimate.objective_value,
        "converged": estimate.converged,
        "iterations": estimate.iterations,
    }


def write_estimate_json(path: str | Path, estimate: Estimate) -> None:
    with open(path, "w") as fh:
        json.dump(estimate_to_json(estimate), fh, indent=2)
        fh.write("\n")


def write_pgm(path: str | Path, values: Sequence[Sequence[float]], maxval: int = 255) -> None:
    """Write a plain (P2, ASCII) PGM.  ``values`` are in [0, 1]."""
    rows = [[min(maxval, max(0, round(float(v) * maxval))) for v in row] for row in values]
    width = len(rows[0])
    height = len(rows)
    with open(path, "w") as fh:
        fh.write(f"P2\n{width} {height}\n{maxval}\n")
        for row in rows:
            fh.write(" ".join(str(v) for v in row))
            fh.write("\n")
