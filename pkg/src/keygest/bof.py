"""Bag-of-features: k-means codebooks and nearest-codeword histograms."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .descriptors import DEFAULT_STRIDE, dense_patch_descriptors

MAX_ITER = 100


@dataclass(frozen=True, eq=False)
class Codebook:
    centroids: np.ndarray
    seed: int = 0

    @property
    def size(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]


def squared_distances(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    """(n, k) squared Euclidean distances, computed directly (no expansion trick)."""
    out = np.empty((x.shape[0], c.shape[0]))
    for j in range(c.shape[0]):
        diff = x - c[j]
        out[:, j] = np.einsum("ij,ij->i", diff, diff)
    return out


def assign(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Index of the nearest centroid; ties go to the lowest index."""
    return np.argmin(squared_distances(x, c), axis=1)


def sse(x: np.ndarray, c: np.ndarray, labels: np.ndarray) -> float:
    diff = x - c[labels]
    return float(np.einsum("ij,ij->", diff, diff))


def kmeans_plus_plus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = [x[rng.integers(n)]]
    closest = squared_distances(x, centers[0][None, :])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            # every point already coincides with a center
            idx = int(rng.integers(n))
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(x[idx])
        closest = np.minimum(closest, squared_distances(x, x[idx][None, :])[:, 0])
    return np.array(centers, dtype=np.float64)


def lloyd(x: np.ndarray, centroids: np.ndarray, max_iter: int = MAX_ITER):
    """Lloyd iterations until the assignment stops changing.

    An empty cluster is reseeded with the point farthest from its current
    centroid. Returns ``(centroids, labels, sse_history)``.
    """
    c = centroids.copy()
    labels = assign(x, c)
    history = [sse(x, c, labels)]
    for _ in range(max_iter):
        for j in range(c.shape[0]):
            members = labels == j
            if members.any():
                c[j] = x[members].mean(axis=0)
        empty = [j for j in range(c.shape[0]) if not (labels == j).any()]
        for j in empty:
            d = np.einsum("ij,ij->i", x - c[labels], x - c[labels])
            far = int(np.argmax(d))
            c[j] = x[far]
            labels[far] = j
        new_labels = assign(x, c)
        history.append(sse(x, c, new_labels))
        if np.array_equal(new_labels, labels) and not empty:
            break
        labels = new_labels
    return c, labels, history


def train_codebook(descriptors, d: int, seed: int = 0, max_iter: int = MAX_ITER) -> Codebook:
    """k-means++ seeded from ``seed``, then Lloyd iterations."""
    x = np.asarray(descriptors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("need a non-empty (n, dim) descriptor array")
    if d < 1:
        raise ValueError(f"dictionary size must be >= 1, got {d}")
    n_distinct = len(np.unique(x, axis=0))
    if d > n_distinct:
        warnings.warn(
            f"dictionary size {d} exceeds {n_distinct} distinct descriptors; centroids will repeat",
            RuntimeWarning,
            stacklevel=2,
        )
    rng = np.random.default_rng(seed)
    init = kmeans_plus_plus(x, d, rng)
    centroids, _, _ = lloyd(x, init, max_iter)
    return Codebook(centroids, seed)


def encode(descriptors, codebook: Codebook) -> np.ndarray:
    """L1-normalized nearest-codeword histogram; empty input gives zeros."""
    x = np.asarray(descriptors, dtype=np.float64)
    if x.size == 0:
        return np.zeros(codebook.size)
    x = x.reshape(-1, x.shape[-1])
    if x.shape[1] != codebook.dim:
        raise ValueError(f"descriptor dim {x.shape[1]} does not match codebook dim {codebook.dim}")
    counts = np.bincount(assign(x, codebook.centroids), minlength=codebook.size).astype(np.float64)
    return counts / counts.sum()


def appearance_histogram(keyseq, codebook: Codebook, stride: int = DEFAULT_STRIDE) -> np.ndarray:
    """Per-frame BoF histograms of patch descriptors, concatenated in temporal order."""
    return np.concatenate([encode(dense_patch_descriptors(f, stride), codebook) for f in keyseq.frames])
