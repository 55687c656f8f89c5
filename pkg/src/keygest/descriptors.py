"""Appearance and motion descriptors.

Appearance: dense 64-D patch-gradient descriptors, one per 16x16 patch on a
stride grid (4x4 cells of sum dx, sum |dx|, sum dy, sum |dy|, L2-normalized).

Motion: LBP-TOP, uniform LBP(8, 1) histograms over the XY, XT and YT planes of
a (width, height, time) volume, 3 x 59 = 177 bins.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .sequence_io import Frame

PATCH = 16
CELLS = 4
APPEARANCE_DIM = CELLS * CELLS * 4
DEFAULT_STRIDE = 16

# (dx, dy) clockwise from east, image y axis pointing down
NEIGHBOR_OFFSETS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
N_UNIFORM_BINS = 59
LBP_TOP_DIM = 3 * N_UNIFORM_BINS


def _pixels(frame) -> np.ndarray:
    return frame.pixels if isinstance(frame, Frame) else np.asarray(frame)


def image_gradients(pixels):
    """Central differences with replicated borders; returns ``(dx, dy)``."""
    p = np.pad(np.asarray(pixels, dtype=np.float64), 1, mode="edge")
    dx = (p[1:-1, 2:] - p[1:-1, :-2]) / 2.0
    dy = (p[2:, 1:-1] - p[:-2, 1:-1]) / 2.0
    return dx, dy


def patch_grid(width: int, height: int, stride: int = DEFAULT_STRIDE) -> list:
    """Top-left ``(x, y)`` corners of every full patch on the stride grid, row-major."""
    return [(x, y) for y in range(0, height - PATCH + 1, stride) for x in range(0, width - PATCH + 1, stride)]


def dense_patch_descriptors(frame, stride: int = DEFAULT_STRIDE) -> np.ndarray:
    """One 64-D descriptor per patch on the grid of ``patch_grid``, shape (k, 64).

    Components are ordered cell-row, cell-column, then (sum dx, sum |dx|,
    sum dy, sum |dy|). Flat patches give zero vectors.
    """
    px = _pixels(frame)
    h, w = px.shape
    if h < PATCH or w < PATCH:
        raise ValueError(f"frame {w}x{h} is smaller than one {PATCH}x{PATCH} patch")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    dx, dy = image_gradients(px)
    c = PATCH // CELLS
    stats = []
    for g in (dx, np.abs(dx), dy, np.abs(dy)):
        win = sliding_window_view(g, (PATCH, PATCH))[::stride, ::stride]
        ny, nx = win.shape[:2]
        cells = win.reshape(ny, nx, CELLS, c, CELLS, c).sum(axis=(3, 5))
        stats.append(cells)
    desc = np.stack(stats, axis=-1).reshape(-1, APPEARANCE_DIM)
    norm = np.linalg.norm(desc, axis=1, keepdims=True)
    return np.divide(desc, norm, out=np.zeros_like(desc), where=norm > 0)


def lbp_code(frame, x: int, y: int) -> int:
    """LBP(8, 1) code of an interior pixel; a neighbour >= center sets its bit."""
    px = _pixels(frame)
    h, w = px.shape
    if not (1 <= x <= w - 2 and 1 <= y <= h - 2):
        raise IndexError(f"({x}, {y}) is not an interior pixel of a {w}x{h} frame")
    center = px[y, x]
    code = 0
    for b, (ox, oy) in enumerate(NEIGHBOR_OFFSETS):
        if px[y + oy, x + ox] >= center:
            code |= 1 << b
    return code


def lbp_codes(planes) -> np.ndarray:
    """LBP codes of every interior pixel over the last two axes (rows, cols)."""
    a = np.asarray(planes)
    if a.shape[-1] < 3 or a.shape[-2] < 3:
        raise ValueError(f"plane {a.shape[-2:]} too small for LBP")
    rows, cols = a.shape[-2], a.shape[-1]
    center = a[..., 1:-1, 1:-1]
    codes = np.zeros(center.shape, dtype=np.uint8)
    for b, (ox, oy) in enumerate(NEIGHBOR_OFFSETS):
        nb = a[..., 1 + oy : rows - 1 + oy, 1 + ox : cols - 1 + ox]
        codes |= (nb >= center).astype(np.uint8) << b
    return codes


def _transitions(code: int) -> int:
    bits = [(code >> b) & 1 for b in range(8)]
    return sum(bits[b] != bits[(b + 1) % 8] for b in range(8))


def _uniform_table() -> np.ndarray:
    table = np.full(256, N_UNIFORM_BINS - 1, dtype=np.int64)
    uniform = [c for c in range(256) if _transitions(c) <= 2]
    assert len(uniform) == N_UNIFORM_BINS - 1
    table[uniform] = np.arange(len(uniform))
    return table


UNIFORM_BIN = _uniform_table()


def uniform_histogram(codes) -> np.ndarray:
    return np.bincount(UNIFORM_BIN[np.asarray(codes).ravel()], minlength=N_UNIFORM_BINS).astype(np.float64)


def lbp_top_site_counts(width: int, height: int, length: int):
    """Number of coded sites in the XY, XT and YT plane sets."""
    return (
        length * (width - 2) * (height - 2),
        height * (width - 2) * (length - 2),
        width * (height - 2) * (length - 2),
    )


def lbp_top(volume) -> np.ndarray:
    """177-bin LBP-TOP histogram of a (width, height, time) volume, raw counts.

    XY planes use rows=y, cols=x; XT planes rows=t, cols=x; YT planes rows=t,
    cols=y. Every slice of each plane set is coded.
    """
    v = np.asarray(volume)
    if v.ndim != 3 or min(v.shape) < 3:
        raise ValueError(f"volume must be 3-D with every axis >= 3, got {v.shape}")
    xy = v.transpose(2, 1, 0)  # (t, y, x)
    xt = v.transpose(1, 2, 0)  # (y, t, x)
    yt = v.transpose(0, 2, 1)  # (x, t, y)
    return np.concatenate([uniform_histogram(lbp_codes(p)) for p in (xy, xt, yt)])


def normalize_blocks(hist, block: int = N_UNIFORM_BINS) -> np.ndarray:
    """L1-normalize consecutive blocks of ``block`` bins; empty blocks stay zero."""
    h = np.asarray(hist, dtype=np.float64).reshape(-1, block)
    s = h.sum(axis=1, keepdims=True)
    return np.divide(h, s, out=np.zeros_like(h), where=s > 0).ravel()
