"""Pipeline configuration and the line-based ``key = value`` config file."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .density_peaks import GAUSSIAN, KERNELS


@dataclass(frozen=True)
class PipelineConfig:
    n_keyframes: int = 5
    dictionary_size: int = 16
    kernel: str = GAUSSIAN
    d_c: Optional[float] = None
    stride: int = 16
    svm_c: float = 1.0
    svm_epochs: int = 200
    seed: int = 0
    splits: int = 20
    train_fraction: float = 0.5
    validation_fraction: float = 0.25
    test_fraction: float = 0.25

    def __post_init__(self):
        for name in ("n_keyframes", "dictionary_size", "stride", "svm_epochs", "splits"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if self.d_c is not None and not self.d_c > 0:
            raise ValueError("d_c must be positive")
        if self.svm_c <= 0:
            raise ValueError("svm_c must be positive")
        fr = (self.train_fraction, self.validation_fraction, self.test_fraction)
        if min(fr) <= 0 or sum(fr) > 1 + 1e-9:
            raise ValueError(f"split fractions must be positive and sum to <= 1, got {fr}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {unknown}")
        return cls(**data)


_TYPES = {"n_keyframes": int, "dictionary_size": int, "stride": int, "svm_epochs": int, "splits": int,
          "seed": int, "svm_c": float, "train_fraction": float, "validation_fraction": float,
          "test_fraction": float, "kernel": str, "d_c": float}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key == "d_c" and value.lower() in ("", "none", "auto"):
            out[key] = None
            continue
        try:
            out[key] = _TYPES[key](value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def load_config(path=None, **overrides) -> PipelineConfig:
    """Defaults, then the config file, then non-None ``overrides``."""
    values = parse_config_text(Path(path).read_text()) if path else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig.from_dict(values)
