"""Per-frame image entropy and local extreme points of the entropy curve.

Frame indices exposed by this module are 1-based, matching the usual
``E(f_i), i = 1..n`` plot of an entropy curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sequence_io import Frame, FrameSequence

N_BINS = 256

MAXIMUM = "max"
MINIMUM = "min"


@dataclass(frozen=True)
class ExtremePoint:
    frame_index: int
    entropy: float


@dataclass(frozen=True)
class ExtremeSet:
    """Local extreme points sorted by frame index, with parallel max/min tags."""

    points: tuple
    kinds: tuple

    def __len__(self):
        return len(self.points)

    @property
    def indices(self) -> list:
        return [p.frame_index for p in self.points]

    @property
    def maxima(self) -> list:
        return [p.frame_index for p, k in zip(self.points, self.kinds) if k == MAXIMUM]

    @property
    def minima(self) -> list:
        return [p.frame_index for p, k in zip(self.points, self.kinds) if k == MINIMUM]


def histogram_entropy(counts) -> float:
    """Shannon entropy in bits of a histogram of counts; empty bins contribute 0."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts[counts > 0] / total
    h = float(-(p * np.log2(p)).sum())
    # -0.0 for a single-bin histogram
    return h if h > 0 else 0.0


def image_entropy(frame) -> float:
    """Entropy in bits of the 256-bin intensity histogram of an 8-bit frame."""
    pixels = frame.pixels if isinstance(frame, Frame) else np.asarray(frame, dtype=np.uint8)
    return histogram_entropy(np.bincount(pixels.ravel(), minlength=N_BINS))


def entropy_curve(seq: FrameSequence) -> np.ndarray:
    """Entropy of every frame; element ``i - 1`` holds ``E(f_i)``."""
    return np.array([image_entropy(f) for f in seq.frames], dtype=np.float64)


def local_extrema(curve) -> ExtremeSet:
    """Strict interior local maxima and minima of ``curve``.

    Endpoints never qualify since both neighbours are required, and plateaus
    yield nothing because the comparisons are strict.
    """
    e = np.asarray(curve, dtype=np.float64)
    if e.ndim != 1 or e.size < 3:
        raise ValueError(f"curve needs at least 3 values, got {e.size}")
    mid, left, right = e[1:-1], e[:-2], e[2:]
    is_max = (mid > right) & (mid > left)
    is_min = (right > mid) & (left > mid)
    points, kinds = [], []
    for j in np.flatnonzero(is_max | is_min):
        points.append(ExtremePoint(int(j) + 2, float(mid[j])))
        kinds.append(MAXIMUM if is_max[j] else MINIMUM)
    return ExtremeSet(tuple(points), tuple(kinds))
