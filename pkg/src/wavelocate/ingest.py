"""Convert timestamped grayscale frame sequences into anchor
observations by sampling the boundary of each frame's newly-activated
region.

Frames are plain (P2, ASCII) PGM files, intensities normalized to
[0, 1].  A pixel is active when its intensity is >= the manifest
threshold; once active, a pixel stays active in all later frames even
if its intensity dips (occlusion repair).  Each anchor's arrival time is
the timestamp of the first frame whose front reached it.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyGrowth, FrameDecodeError, FrameShapeError
from .model import AnchorObservation, Point2


@dataclass(frozen=True)
class FrameManifest:
    """An ordered frame sequence with its physical scale and threshold.

    ``entries`` are (frame_path, timestamp) pairs with strictly
    increasing timestamps; ``pixel_size`` converts pixel indices to
    lengths; ``threshold`` is the activation intensity in (0, 1).
    """

    entries: tuple[tuple[Path, float], ...]
    pixel_size: float
    threshold: float

    def __post_init__(self) -> None:
        entries = tuple((Path(p), float(t)) for p, t in self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) < 2:
            raise ValueError(f"need >= 2 frames, got {len(entries)}")
        times = [t for _, t in entries]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("timestamps must be strictly increasing")
        if not (0.0 < self.threshold < 1.0):
            raise ValueError("threshold must be in (0, 1)")
        if self.pixel_size <= 0:
            raise ValueError("pixel_size must be > 0")


def read_manifest(path: str | Path) -> FrameManifest:
    """Load a manifest JSON: {pixel_size, threshold, frames:
    [{path, timestamp}, ...]}.  Frame paths resolve relative to the
    manifest file's directory."""
    path = Path(path)
    with open(path) as fh:
        obj = json.load(fh)
    base = path.parent
    entries = tuple(
        (base / frame["path"], float(frame["timestamp"])) for frame in obj["frames"]
    )
    return FrameManifest(
        entries=entries,
        pixel_size=float(obj["pixel_size"]),
        threshold=float(obj["threshold"]),
    )


def read_pgm(path: str | Path) -> np.ndarray:
    """Decode a plain (P2, ASCII) PGM into floats in [0, 1].

    Raises FrameDecodeError for anything that is not a well-formed P2
    file."""
    try:
        with open(path) as fh:
            tokens: list[str] = []
            for line in fh:
                hash_pos = line.find("#")
                if hash_pos >= 0:
                    line = line[:hash_pos]
                tokens.extend(line.split())
    except (OSError, UnicodeDecodeError) as exc:
        raise FrameDecodeError(f"{path}: {exc}") from exc
    if not tokens or tokens[0] != "P2":
        raise FrameDecodeError(f"{path}: not a plain PGM (P2) file")
    try:
        width, height, maxval = (int(v) for v in tokens[1:4])
        values = np.array([int(v) for v in tokens[4:]], dtype=float)
    except (ValueError, IndexError) as exc:
        raise FrameDecodeError(f"{path}: malformed header or samples") from exc
    if width < 1 or height < 1 or maxval < 1:
        raise FrameDecodeError(f"{path}: bad dimensions {width}x{height}, maxval {maxval}")
    if values.size != width * height:
        raise FrameDecodeError(
            f"{path}: expected {width * height} samples, got {values.size}"
        )
    if np.any(values < 0) or np.any(values > maxval):
        raise FrameDecodeError(f"{path}: sample out of range [0, {maxval}]")
    return values.reshape(height, width) / float(maxval)


def _boundary(new: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Rows (i, j) of newly-active pixels 4-adjacent to an inactive
    pixel; pixels on the image edge count as adjacent to the outside."""
    padded = np.pad(active, 1, mode="constant", constant_values=False)
    has_inactive_neighbor = ~(
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    ii, jj = np.nonzero(new & has_inactive_neighbor)
    return np.column_stack([ii, jj])


def extract_anchors(
    manifest: FrameManifest, per_frame_samples: int, seed: int = 0
) -> list[AnchorObservation]:
    """Sample anchor observations from the growth boundary of each frame.

    For every frame after the first: binarize at the threshold, apply
    the monotonic (once-active-stays-active) repair, take the pixels
    that became active in this frame and lie on the boundary of the
    active set, and sample up to ``per_frame_samples`` of them uniformly
    without replacement.  Each sampled pixel center becomes an anchor
    with the frame's timestamp.  Deterministic given ``seed``.

    Emits an EmptyGrowth warning for frames that add no pixels.
    """
    if per_frame_samples < 1:
        raise ValueError("per_frame_samples must be >= 1")
    rng = np.random.default_rng(seed)
    ps = manifest.pixel_size

    active: np.ndarray | None = None
    out: list[AnchorObservation] = []
    for index, (path, timestamp) in enumerate(manifest.entries):
        frame = read_pgm(path)
        current = frame >= manifest.threshold
        if active is None:
            active = current
            continue
        if current.shape != active.shape:
            raise FrameShapeError(
                f"{path}: frame shape {current.shape} != first frame {active.shape}"
            )
        grown = active | current
        new = grown & ~active
        active = grown
        if not new.any():
            warnings.warn(
                f"frame {index} ({path.name}) added no newly-activated pixels",
                EmptyGrowth,
                stacklevel=2,
            )
            continue
        boundary = _boundary(new, active)
        if boundary.shape[0] > per_frame_samples:
            picks = rng.choice(boundary.shape[0], size=per_frame_samples, replace=False)
            boundary = boundary[np.sort(picks)]
        for i, j in boundary:
            out.append(
                AnchorObservation(
                    Point2(float((j + 0.5) * ps), float((i + 0.5) * ps)), timestamp
                )
            )
    return out
