"""Synthetic gesture clips: a textured patch following a class-specific motion.

Each class pairs one motion (rightward, leftward, downward, upward, circular,
scaling pulse) with one texture (horizontal stripes, vertical stripes,
checkerboard, diagonal stripes, dots, rings). Beyond six classes the pairs
are recombined so that no two classes share both. Start position, speed,
texture period, contrast and background noise are jittered per sequence.
"""

from __future__ import annotations

import numpy as np

from .sequence_io import MIN_FRAMES, FrameSequence, LabeledDataset, make_dataset

MOTIONS = ("right", "left", "down", "up", "circle", "pulse")
TEXTURES = ("hstripes", "vstripes", "checker", "diagonal", "dots", "rings")


def class_spec(k: int):
    """(motion, texture) of class ``k``; distinct for k < 36."""
    return MOTIONS[k % 6], TEXTURES[(k + k // 6) % 6]


def class_name(k: int) -> str:
    motion, texture = class_spec(k)
    return f"c{k:02d}_{motion}_{texture}"


def _texture(kind: str, u: np.ndarray, v: np.ndarray, period: float, phase: float) -> np.ndarray:
    f = 1.0 / period
    if kind == "hstripes":
        t = np.sin(2 * np.pi * (v * f + phase))
    elif kind == "vstripes":
        t = np.sin(2 * np.pi * (u * f + phase))
    elif kind == "checker":
        t = np.sin(2 * np.pi * (u * f + phase)) * np.sin(2 * np.pi * (v * f + phase))
    elif kind == "diagonal":
        t = np.sin(2 * np.pi * ((u + v) * f / np.sqrt(2) + phase))
    elif kind == "dots":
        t = np.cos(2 * np.pi * u * f) + np.cos(2 * np.pi * v * f) - 1.0
    elif kind == "rings":
        t = np.sin(2 * np.pi * (np.hypot(u, v) * f + phase))
    else:
        raise ValueError(f"unknown texture {kind!r}")
    return (t > 0).astype(np.float64)


def _trajectory(motion: str, n_frames: int, size: int, rng: np.random.Generator):
    """Per-frame (center_x, center_y, half_side) in pixels."""
    t = np.linspace(0.0, 1.0, n_frames)
    half0 = size * rng.uniform(0.24, 0.28)
    travel = size * rng.uniform(0.3, 0.4)
    jx, jy = rng.uniform(-0.05, 0.05, size=2) * size
    mid = size / 2.0
    half = np.full(n_frames, half0)
    if motion in ("right", "left"):
        sgn = 1.0 if motion == "right" else -1.0
        cx = mid + jx + sgn * travel * (t - 0.5)
        cy = np.full(n_frames, mid + jy)
    elif motion in ("down", "up"):
        sgn = 1.0 if motion == "down" else -1.0
        cy = mid + jy + sgn * travel * (t - 0.5)
        cx = np.full(n_frames, mid + jx)
    elif motion == "circle":
        radius = travel / 2.0
        theta = 2 * np.pi * t * rng.uniform(0.8, 1.0) + rng.uniform(0, 2 * np.pi)
        cx = mid + jx + radius * np.cos(theta)
        cy = mid + jy + radius * np.sin(theta)
    elif motion == "pulse":
        cx = np.full(n_frames, mid + jx)
        cy = np.full(n_frames, mid + jy)
        half = half0 * (1.0 + 0.6 * np.sin(np.pi * t * rng.uniform(1.6, 2.0)) ** 2)
    else:
        raise ValueError(f"unknown motion {motion!r}")
    return cx, cy, half


def render_sequence(k: int, n_frames: int, size, rng: np.random.Generator) -> np.ndarray:
    """(n_frames, height, width) uint8 clip for class ``k``."""
    width, height = (size, size) if np.isscalar(size) else size
    motion, texture = class_spec(k)
    cx, cy, half = _trajectory(motion, n_frames, min(width, height), rng)
    period = rng.uniform(5.0, 7.0)
    phase = rng.uniform(0.0, 1.0)
    bg_level = rng.uniform(50, 80)
    lo, hi = rng.uniform(90, 120), rng.uniform(190, 230)
    noise_sd = rng.uniform(4.0, 8.0)
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    frames = np.empty((n_frames, height, width), dtype=np.uint8)
    for i in range(n_frames):
        img = bg_level + noise_sd * rng.standard_normal((height, width))
        u, v = xs - cx[i], ys - cy[i]
        inside = (np.abs(u) <= half[i]) & (np.abs(v) <= half[i])
        tex = _texture(texture, u, v, period, phase)
        img[inside] = lo + (hi - lo) * tex[inside] + noise_sd * rng.standard_normal(int(inside.sum()))
        frames[i] = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    return frames


def generate_synthetic(classes: int = 6, per_class: int = 20, frames: int = 40, size=64, seed: int = 0) -> LabeledDataset:
    """Deterministic labeled dataset of ``classes * per_class`` clips."""
    if min(classes, per_class) < 1:
        raise ValueError("classes and per_class must be >= 1")
    if frames < MIN_FRAMES:
        raise ValueError(f"need at least {MIN_FRAMES} frames per clip")
    if classes > len(MOTIONS) * len(TEXTURES):
        raise ValueError(f"at most {len(MOTIONS) * len(TEXTURES)} distinct classes")
    root = np.random.SeedSequence(seed)
    children = root.spawn(classes * per_class)
    names = [class_name(k) for k in range(classes)]
    sequences = []
    for k in range(classes):
        for j in range(per_class):
            rng = np.random.default_rng(children[k * per_class + j])
            clip = render_sequence(k, frames, size, rng)
            sequences.append(FrameSequence.from_array(clip, source_id=f"{names[k]}/seq_{j:03d}", label=names[k]))
    return make_dataset(sequences, classes=names)
