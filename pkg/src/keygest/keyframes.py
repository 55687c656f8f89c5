"""Key-frame extraction: entropy curve, local extrema, density-peaks centers."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import density_peaks as dp
from .entropy import ExtremeSet, entropy_curve, local_extrema
from .sequence_io import FrameSequence

DEFAULT_N_KEYFRAMES = 5


@dataclass(frozen=True)
class KeyFrameSet:
    """Selected 1-based frame indices, strictly increasing."""

    indices: tuple
    n_requested: int
    fallback_used: bool = False


@dataclass
class KeyFrameTrace:
    """Intermediate results of one extraction, kept for reporting and plots."""

    keys: KeyFrameSet
    curve: np.ndarray
    extremes: ExtremeSet
    points: Optional[np.ndarray] = None
    profile: Optional[dp.DensityProfile] = None
    clustering: Optional[dp.Clustering] = None
    timings: dict = field(default_factory=dict)


def normalize_points(extremes: ExtremeSet, curve) -> np.ndarray:
    """Map extreme points to the unit square.

    Frame index i goes to (i - 1) / (n - 1); entropy is min-max scaled over the
    whole curve, and a constant curve maps to 0.
    """
    curve = np.asarray(curve, dtype=np.float64)
    n = len(curve)
    lo, hi = curve.min(), curve.max()
    span = hi - lo
    pts = np.zeros((len(extremes), 2))
    for k, p in enumerate(extremes.points):
        pts[k, 0] = (p.frame_index - 1) / (n - 1)
        pts[k, 1] = (p.entropy - lo) / span if span > 0 else 0.0
    return pts


def evenly_spaced(n: int, count: int) -> list:
    """``count`` indices spread over the interior frames 2..n-1.

    Half-way positions round to even, as Python's ``round`` does. A single
    index lands in the middle of the interior.
    """
    lo, hi = 2, max(n - 1, 2)
    if count <= 0:
        return []
    if count == 1:
        return [round((lo + hi) / 2)]
    return [round(lo + (hi - lo) * k / (count - 1)) for k in range(count)]


def fallback_indices(extreme_indices, n: int, n_requested: int) -> list:
    """Keep every extreme index, then fill evenly, then by lowest unused index."""
    target = min(n_requested, n)
    chosen = list(dict.fromkeys(int(i) for i in extreme_indices))[:target]
    taken = set(chosen)
    for i in evenly_spaced(n, target - len(chosen)):
        if len(chosen) >= target:
            break
        if i not in taken:
            chosen.append(i)
            taken.add(i)
    i = 1
    while len(chosen) < target:
        if i not in taken:
            chosen.append(i)
            taken.add(i)
        i += 1
    return sorted(chosen)


def keyframes_from_curve(
    curve,
    n: int = DEFAULT_N_KEYFRAMES,
    kernel: str = dp.GAUSSIAN,
    d_c: Optional[float] = None,
) -> KeyFrameTrace:
    """Run extrema detection and density clustering on a precomputed entropy curve."""
    if n < 1:
        raise ValueError(f"number of key frames must be >= 1, got {n}")
    if kernel not in dp.KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    curve = np.asarray(curve, dtype=np.float64)
    extremes = local_extrema(curve)
    trace = KeyFrameTrace(None, curve, extremes)
    if len(extremes) < n:
        idx = fallback_indices(extremes.indices, len(curve), n)
        trace.keys = KeyFrameSet(tuple(idx), n, fallback_used=True)
        return trace
    pts = normalize_points(extremes, curve)
    profile, clustering = dp.cluster(pts, n, kernel=kernel, d_c=d_c)
    frames = extremes.indices
    trace.keys = KeyFrameSet(tuple(sorted(frames[c] for c in clustering.centers)), n)
    trace.points, trace.profile, trace.clustering = pts, profile, clustering
    return trace


def extract_keyframes_traced(
    seq: FrameSequence,
    n: int = DEFAULT_N_KEYFRAMES,
    kernel: str = dp.GAUSSIAN,
    d_c: Optional[float] = None,
) -> KeyFrameTrace:
    t0 = time.perf_counter()
    curve = entropy_curve(seq)
    t1 = time.perf_counter()
    trace = keyframes_from_curve(curve, n, kernel, d_c)
    t2 = time.perf_counter()
    trace.timings = {"entropy": t1 - t0, "clustering": t2 - t1}
    return trace


def extract_keyframes(
    seq: FrameSequence,
    n: int = DEFAULT_N_KEYFRAMES,
    kernel: str = dp.GAUSSIAN,
    d_c: Optional[float] = None,
) -> KeyFrameSet:
    """Select ``min(n, len(seq))`` key frames, sorted by frame index.

    When the entropy curve has fewer than ``n`` local extrema (flat or
    monotone curves included) the result is filled by ``fallback_indices``
    and flagged with ``fallback_used``.
    """
    return extract_keyframes_traced(seq, n, kernel, d_c).keys


def subsample(seq: FrameSequence, keys) -> FrameSequence:
    """The key frames of ``seq`` in temporal order, keeping label and source id."""
    indices = keys.indices if isinstance(keys, KeyFrameSet) else tuple(keys)
    if not indices:
        raise ValueError("empty key-frame set")
    n = len(seq)
    bad = [i for i in indices if not 1 <= i <= n]
    if bad:
        raise IndexError(f"key-frame indices {bad} out of range 1..{n}")
    frames = tuple(seq.frames[i - 1] for i in sorted(indices))
    if len(frames) < 3:
        # FrameSequence needs 3 frames; pad by repeating the last key frame
        frames = frames + (frames[-1],) * (3 - len(frames))
    return FrameSequence(frames, seq.source_id, seq.label)
