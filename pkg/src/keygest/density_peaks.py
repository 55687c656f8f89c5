"""Density-peaks clustering of 2-D points.

Each point gets a local density ``rho`` (cutoff or gaussian kernel) and a
separation ``delta``: the distance to the nearest point of higher density.
Centers are the points with the largest ``delta``; every other point takes
the label of its nearest denser neighbour, visiting points from high to low
density.

Density ties are broken by point index, so "higher density" is the strict
total order (rho descending, index ascending).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

CUTOFF = "cutoff"
GAUSSIAN = "gaussian"
KERNELS = (CUTOFF, GAUSSIAN)

NO_HIGHER = -1
DC_PERCENTILE = 2.0
DC_FLOOR = 1e-6


@dataclass(frozen=True)
class DensityProfile:
    rho: np.ndarray
    delta: np.ndarray
    nearest_higher: np.ndarray
    order: np.ndarray
    d_c: float = float("nan")
    kernel: str = GAUSSIAN

    def __len__(self):
        return len(self.rho)


@dataclass(frozen=True)
class Clustering:
    """``centers`` in selection order; ``assignment[k]`` is the center index of point k."""

    centers: tuple
    assignment: Optional[np.ndarray] = None

    def members(self, center: int) -> list:
        return [int(k) for k in np.flatnonzero(self.assignment == center)]


def pairwise_distances(points) -> np.ndarray:
    """Symmetric Euclidean distance table of an (m, 2) point array."""
    p = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(p) == 0:
        raise ValueError("need at least one point")
    dx = p[:, None, 0] - p[None, :, 0]
    dy = p[:, None, 1] - p[None, :, 1]
    return np.sqrt(dx * dx + dy * dy)


def cutoff_distance(distances, percentile: float = DC_PERCENTILE, floor: float = DC_FLOOR) -> float:
    """Percentile of the nonzero pairwise distances (each pair once), floored."""
    d = np.asarray(distances, dtype=np.float64)
    upper = d[np.triu_indices(len(d), k=1)]
    nonzero = np.sort(upper[upper > 0])
    if nonzero.size == 0:
        return floor
    pos = (percentile / 100.0) * (nonzero.size - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, nonzero.size - 1)
    value = nonzero[lo] + (nonzero[hi] - nonzero[lo]) * (pos - lo)
    return max(float(value), floor)


def local_density(distances, d_c: float, kernel: str = GAUSSIAN) -> np.ndarray:
    """Per-point density; self-distances are excluded under both kernels."""
    if not d_c > 0:
        raise ValueError(f"cutoff distance must be positive, got {d_c}")
    d = np.asarray(distances, dtype=np.float64)
    m = len(d)
    off_diag = ~np.eye(m, dtype=bool)
    if kernel == CUTOFF:
        return ((d < d_c) & off_diag).sum(axis=1).astype(np.float64)
    if kernel == GAUSSIAN:
        w = np.exp(-((d / d_c) ** 2))
        w[~off_diag] = 0.0
        # exactly rounded row sums keep tie-breaking independent of summation order
        return np.array([math.fsum(row) for row in w])
    raise ValueError(f"unknown kernel {kernel!r}, expected one of {KERNELS}")


def density_order(rho) -> np.ndarray:
    """Point indices by descending density, ties to the lower index."""
    rho = np.asarray(rho, dtype=np.float64)
    return np.lexsort((np.arange(len(rho)), -rho))


def separation_delta(distances, rho):
    """Return ``(delta, nearest_higher)``.

    For the densest point ``delta`` is the largest pairwise distance and
    ``nearest_higher`` is ``NO_HIGHER``. Equidistant denser neighbours resolve
    to the lowest point index.
    """
    d = np.asarray(distances, dtype=np.float64)
    rho = np.asarray(rho, dtype=np.float64)
    if d.shape != (len(rho), len(rho)):
        raise ValueError(f"distance table {d.shape} does not match {len(rho)} densities")
    order = density_order(rho)
    m = len(rho)
    delta = np.zeros(m)
    nearest = np.full(m, NO_HIGHER, dtype=np.int64)
    top = order[0]
    delta[top] = d.max() if m > 1 else 0.0
    for rank in range(1, m):
        k = order[rank]
        higher = np.sort(order[:rank])
        j = int(np.argmin(d[k, higher]))
        nearest[k] = higher[j]
        delta[k] = d[k, higher[j]]
    return delta, nearest


def density_profile(points, d_c: Optional[float] = None, kernel: str = GAUSSIAN) -> DensityProfile:
    d = pairwise_distances(points)
    if d_c is None:
        d_c = cutoff_distance(d)
    rho = local_density(d, d_c, kernel)
    delta, nearest = separation_delta(d, rho)
    return DensityProfile(rho, delta, nearest, density_order(rho), float(d_c), kernel)


def select_centers(profile: DensityProfile, n_centers: int) -> Clustering:
    """The ``n_centers`` points with largest delta (ties: higher rho, then lower index)."""
    if n_centers < 1:
        raise ValueError(f"n_centers must be >= 1, got {n_centers}")
    m = len(profile)
    rank = np.lexsort((np.arange(m), -profile.rho, -profile.delta))
    return Clustering(tuple(int(k) for k in rank[:n_centers]))


def propagate_labels(profile: DensityProfile, centers) -> Clustering:
    """Assign every point to a center, from high to low density."""
    centers = tuple(int(c) for c in (centers.centers if isinstance(centers, Clustering) else centers))
    if not centers:
        raise ValueError("need at least one center")
    is_center = set(centers)
    assignment = np.full(len(profile), NO_HIGHER, dtype=np.int64)
    for k in profile.order:
        if k in is_center:
            assignment[k] = k
            continue
        parent = profile.nearest_higher[k]
        if parent == NO_HIGHER:
            raise ValueError(f"densest point {k} must be one of the centers")
        assignment[k] = assignment[parent]
    return Clustering(centers, assignment)


def cluster(points, n_centers: int, kernel: str = GAUSSIAN, d_c: Optional[float] = None):
    """Profile, select and propagate in one call; returns ``(profile, clustering)``."""
    profile = density_profile(points, d_c=d_c, kernel=kernel)
    centers = select_centers(profile, n_centers)
    return profile, propagate_labels(profile, centers)
