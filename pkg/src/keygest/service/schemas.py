"""Request and response models of the HTTP service.

Paths in requests are resolved on the server's filesystem.
"""

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

Kernel = Literal["gaussian", "cutoff"]


class SequenceRequest(BaseModel):
    input: str = Field(description="directory of frame images")
    target_size: Optional[Tuple[int, int]] = Field(None, description="(width, height) to resize to")


class EntropyResponse(BaseModel):
    source_id: str
    entropy_bits: List[float]


class ExtractRequest(SequenceRequest):
    n: int = Field(5, ge=1)
    kernel: Kernel = "gaussian"
    d_c: Optional[float] = Field(None, gt=0)


class ExtractResponse(BaseModel):
    source_id: str
    indices: List[int]
    fallback_used: bool
    entropy_bits: List[float]


class DecisionGraphRequest(ExtractRequest):
    pass


class DecisionPoint(BaseModel):
    frame_index: int
    entropy: float
    kind: Literal["max", "min"]
    x: float
    y: float
    rho: float
    delta: float
    nearest_higher: Optional[int] = Field(None, description="frame index of the nearest denser point")
    center: bool


class DecisionGraphResponse(BaseModel):
    source_id: str
    kernel: Kernel
    d_c: Optional[float]
    points: List[DecisionPoint]


class ConfigModel(BaseModel):
    """Partial pipeline config; unset fields keep their defaults."""

    model_config = ConfigDict(extra="forbid")

    n_keyframes: Optional[int] = Field(None, ge=1)
    dictionary_size: Optional[int] = Field(None, ge=1)
    kernel: Optional[Kernel] = None
    d_c: Optional[float] = Field(None, gt=0)
    stride: Optional[int] = Field(None, ge=1)
    svm_c: Optional[float] = Field(None, gt=0)
    svm_epochs: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = None
    splits: Optional[int] = Field(None, ge=1)
    train_fraction: Optional[float] = Field(None, gt=0, le=1)
    validation_fraction: Optional[float] = Field(None, gt=0, le=1)
    test_fraction: Optional[float] = Field(None, gt=0, le=1)


class DatasetRequest(BaseModel):
    dataset: str = Field(description="root of <class>/<sequence>/<frame> tree")
    target_size: Optional[Tuple[int, int]] = None
    config: ConfigModel = ConfigModel()


class TrainRequest(DatasetRequest):
    out: str = Field(description="path of the model file to write")


class TrainResponse(BaseModel):
    model: str
    classes: List[str]
    weights: List[int]
    validation_accuracies: List[float]
    feature_dim: int


class PredictRequest(SequenceRequest):
    model: str


class PredictResponse(BaseModel):
    source_id: str
    label: str
    label_id: int


class EvaluateRequest(DatasetRequest):
    ablation: bool = True
    timing: bool = False


class CueSummary(BaseModel):
    mean: float
    std: float


class EvaluateResponse(BaseModel):
    model_config = ConfigDict(extra="allow")

    config: dict
    classes: List[str]
    n_sequences: int
    feature_dim: int
    splits: List[dict]
    summary: Dict[str, CueSummary]
    confusion_matrix: List[List[int]]
    fallback_sequences: int
    timings: Optional[Dict[str, float]] = None


class SynthRequest(BaseModel):
    out: str
    classes: int = Field(6, ge=1, le=36)
    per_class: int = Field(20, ge=1)
    frames: int = Field(40, ge=3)
    size: Tuple[int, int] = (64, 64)
    seed: int = 0
    format: Literal["pgm", "png"] = "pgm"


class SynthResponse(BaseModel):
    out: str
    classes: List[str]
    sequences: int


class ErrorResponse(BaseModel):
    detail: str
