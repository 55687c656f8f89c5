"""Loading and normalizing gesture videos stored as directories of frames."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from PIL import Image

FRAME_SUFFIXES = (".png", ".pgm")
MIN_FRAMES = 3
MIN_SIDE = 3

# ITU-R BT.601 luma weights
_LUMA = np.array([0.299, 0.587, 0.114])


class SequenceError(ValueError):
    """Base class for frame-sequence loading errors."""


class MissingDirectoryError(SequenceError):
    pass


class SequenceTooShortError(SequenceError):
    pass


class UndecodableFrameError(SequenceError):
    pass


class InconsistentDimensionsError(SequenceError):
    pass


@dataclass(frozen=True, eq=False)
class Frame:
    """A single 8-bit grayscale frame stored as a (height, width) array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if px.ndim != 2:
            raise ValueError(f"frame must be 2-D, got shape {px.shape}")
        if px.shape[0] < MIN_SIDE or px.shape[1] < MIN_SIDE:
            raise ValueError(f"frame must be at least {MIN_SIDE}x{MIN_SIDE}, got {px.shape[1]}x{px.shape[0]}")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True)
class FrameSequence:
    """Ordered grayscale frames of one gesture video."""

    frames: tuple
    source_id: str = ""
    label: Optional[str] = None

    def __post_init__(self):
        frames = tuple(f if isinstance(f, Frame) else Frame(f) for f in self.frames)
        if len(frames) < MIN_FRAMES:
            raise SequenceTooShortError(
                f"sequence too short: {len(frames)} frames, need at least {MIN_FRAMES}"
            )
        shape = frames[0].pixels.shape
        for i, f in enumerate(frames):
            if f.pixels.shape != shape:
                raise InconsistentDimensionsError(
                    f"frame {i} is {f.width}x{f.height}, expected {shape[1]}x{shape[0]}"
                )
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    @classmethod
    def from_array(cls, array, source_id="", label=None) -> "FrameSequence":
        """Build a sequence from a (n, height, width) uint8 array."""
        array = np.asarray(array)
        return cls(tuple(Frame(a) for a in array), source_id=source_id, label=label)

    def as_array(self) -> np.ndarray:
        """Frames stacked as a (n, height, width) array."""
        return np.stack([f.pixels for f in self.frames])


def rgb_to_luma(rgb: np.ndarray) -> np.ndarray:
    """BT.601 luma, rounded half-up, as uint8."""
    y = rgb[..., :3].astype(np.float64) @ _LUMA
    return np.floor(y + 0.5).clip(0, 255).astype(np.uint8)


def decode_frame(path) -> np.ndarray:
    """Decode one PNG/PGM file to a (height, width) uint8 array."""
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("L", "P", "LA", "PA") or mode.startswith("I"):
                if mode in ("P", "PA"):
                    im = im.convert("RGB")
                    return rgb_to_luma(np.asarray(im))
                if mode == "LA":
                    im = im.convert("L")
                arr = np.asarray(im)
                if arr.dtype != np.uint8:
                    # 16-bit grayscale: keep the high byte
                    arr = (arr.astype(np.uint32) >> 8).astype(np.uint8)
                return arr
            if mode == "1":
                return np.asarray(im.convert("L"))
            return rgb_to_luma(np.asarray(im.convert("RGB")))
    except (OSError, SyntaxError, ValueError) as exc:
        raise UndecodableFrameError(f"cannot decode frame {path}: {exc}") from exc


def resize_frame(pixels: np.ndarray, size) -> np.ndarray:
    """Bilinear resize to ``size = (width, height)``; identity when already that size."""
    width, height = int(size[0]), int(size[1])
    if pixels.shape == (height, width):
        return pixels
    im = Image.fromarray(np.ascontiguousarray(pixels, dtype=np.uint8))
    return np.asarray(im.resize((width, height), Image.BILINEAR))


def list_frame_files(path) -> list:
    path = Path(path)
    if not path.is_dir():
        raise MissingDirectoryError(f"no such directory: {path}")
    files = [p for p in path.iterdir() if p.is_file() and p.suffix.lower() in FRAME_SUFFIXES]
    return sorted(files, key=lambda p: p.name)


def load_sequence(path, target_size=None, label=None) -> FrameSequence:
    """Load a directory of frames as a FrameSequence.

    Frames are ordered lexicographically by filename, converted to 8-bit
    grayscale and, when ``target_size`` (width, height) is given, resized
    bilinearly.
    """
    files = list_frame_files(path)
    if len(files) < MIN_FRAMES:
        raise SequenceTooShortError(
            f"sequence too short: {path} has {len(files)} frames, need at least {MIN_FRAMES}"
        )
    frames = []
    for f in files:
        px = decode_frame(f)
        if target_size is not None:
            px = resize_frame(px, target_size)
        frames.append(px)
    if target_size is None:
        shapes = {px.shape for px in frames}
        if len(shapes) > 1:
            raise InconsistentDimensionsError(
                f"frames in {path} have inconsistent dimensions {sorted(shapes)}; pass target_size"
            )
    return FrameSequence(tuple(Frame(px) for px in frames), source_id=Path(path).name, label=label)


def save_sequence(seq: FrameSequence, path, fmt: str = "pgm") -> Path:
    """Write frames as ``frame_XXXXX.<fmt>``; PGM and PNG are both lossless."""
    fmt = fmt.lower().lstrip(".")
    if "." + fmt not in FRAME_SUFFIXES:
        raise ValueError(f"unsupported frame format {fmt!r}")
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(seq.frames):
        Image.fromarray(frame.pixels).save(path / f"frame_{i:05d}.{fmt}")
    return path


def to_grayscale_stack(seq: FrameSequence) -> np.ndarray:
    """Contiguous (width, height, n) volume with ``volume[x, y, t]`` = frame t at (x, y)."""
    return np.ascontiguousarray(seq.as_array().transpose(2, 1, 0))


def from_grayscale_stack(volume: np.ndarray, source_id="", label=None) -> FrameSequence:
    return FrameSequence.from_array(np.asarray(volume).transpose(2, 1, 0), source_id, label)


@dataclass
class LabeledDataset:
    """Sequences with dense integer labels; ``classes[i]`` names label ``i``."""

    sequences: list
    labels: np.ndarray
    classes: list = field(default_factory=list)

    def __len__(self):
        return len(self.sequences)

    def subset(self, idx: Iterable[int]) -> "LabeledDataset":
        idx = list(idx)
        return LabeledDataset([self.sequences[i] for i in idx], self.labels[idx], list(self.classes))


def make_dataset(sequences: Sequence[FrameSequence], classes=None) -> LabeledDataset:
    """Assign dense ids to the sequences' label strings (sorted unless ``classes`` is given)."""
    names = [s.label for s in sequences]
    if any(n is None for n in names):
        raise ValueError("every sequence in a dataset needs a label")
    if classes is None:
        classes = sorted(set(names))
    lookup = {c: i for i, c in enumerate(classes)}
    missing = sorted(set(names) - set(lookup))
    if missing:
        raise ValueError(f"labels not in class table: {missing}")
    return LabeledDataset(list(sequences), np.array([lookup[n] for n in names], dtype=np.int64), list(classes))


def load_dataset(root, target_size=None) -> LabeledDataset:
    """Load ``<root>/<class_name>/<sequence_id>/<frame>.{png,pgm}``."""
    root = Path(root)
    if not root.is_dir():
        raise MissingDirectoryError(f"no such directory: {root}")
    sequences = []
    for class_dir in sorted((p for p in root.iterdir() if p.is_dir()), key=lambda p: p.name):
        for seq_dir in sorted((p for p in class_dir.iterdir() if p.is_dir()), key=lambda p: p.name):
            seq = load_sequence(seq_dir, target_size=target_size, label=class_dir.name)
            object.__setattr__(seq, "source_id", f"{class_dir.name}/{seq_dir.name}")
            sequences.append(seq)
    if not sequences:
        raise SequenceError(f"no sequences found under {root}")
    return make_dataset(sequences)


def save_dataset(dataset: LabeledDataset, root, fmt: str = "pgm") -> Path:
    root = Path(root)
    for i, (seq, y) in enumerate(zip(dataset.sequences, dataset.labels)):
        name = os.path.basename(seq.source_id) or f"seq_{i:04d}"
        save_sequence(seq, root / dataset.classes[int(y)] / name, fmt=fmt)
    return root
