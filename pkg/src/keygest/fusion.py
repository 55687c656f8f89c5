"""Fusion weights from single-cue accuracies and weighted concatenation."""

from __future__ import annotations

import math

import numpy as np


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def fusion_weights(accuracies) -> list:
    """Integer weight per cue from accuracies in percent.

    The least accurate cue gets weight 1 and the others scale linearly with
    their distance from it, on a 0..10 grid relative to the headroom left by
    the worst cue. Equal accuracies (including all at 100) give all ones, and
    every weight is clamped to at least 1.

    >>> fusion_weights([92.37, 60.78])
    [8, 1]
    """
    r = [float(a) for a in accuracies]
    if not r:
        raise ValueError("need at least one accuracy")
    for a in r:
        if not 0.0 <= a <= 100.0 or math.isnan(a):
            raise ValueError(f"accuracy {a} outside [0, 100]")
    lo = min(r)
    if lo == max(r) or lo == 100.0:
        return [1] * len(r)
    t = [(a - lo) / ((100.0 - lo) / 10.0) for a in r]
    t1 = [round_half_away(v) for v in t]
    t_max, t1_max = max(t), max(t1)
    t2 = [v * (t1_max - 1) / t_max + 1 for v in t]
    return [max(1, round_half_away(v)) for v in t2]


def fusion_trace(accuracies) -> dict:
    """Intermediate quantities of ``fusion_weights`` for reporting."""
    r = [float(a) for a in accuracies]
    w = fusion_weights(r)
    lo = min(r)
    if lo == max(r) or lo == 100.0:
        return {"T": [0.0] * len(r), "T1": [0] * len(r), "T2": [1.0] * len(r), "W": w}
    t = [(a - lo) / ((100.0 - lo) / 10.0) for a in r]
    t1 = [round_half_away(v) for v in t]
    t2 = [v * (max(t1) - 1) / max(t) + 1 for v in t]
    return {"T": t, "T1": t1, "T2": t2, "W": w}


def fuse(hist1, hist2, weights) -> np.ndarray:
    """``[alpha * hist1 || beta * hist2]``."""
    if len(weights) != 2:
        raise ValueError(f"need exactly two weights, got {len(weights)}")
    alpha, beta = weights
    return np.concatenate([alpha * np.asarray(hist1, dtype=np.float64), beta * np.asarray(hist2, dtype=np.float64)])
