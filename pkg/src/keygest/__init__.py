"""Key-frame extraction by entropy and density peaks, and gesture recognition
by weighted fusion of appearance and motion histograms."""

from .config import PipelineConfig, load_config
from .density_peaks import cluster, density_profile
from .entropy import entropy_curve, image_entropy, local_extrema
from .fusion import fuse, fusion_weights
from .keyframes import KeyFrameSet, extract_keyframes, subsample
from .pipeline import TrainedModel, evaluate, predict_sequence, train
from .sequence_io import Frame, FrameSequence, load_dataset, load_sequence, to_grayscale_stack
from .synthetic import generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "Frame", "FrameSequence", "KeyFrameSet", "PipelineConfig", "TrainedModel",
    "cluster", "density_profile", "entropy_curve", "evaluate", "extract_keyframes",
    "fuse", "fusion_weights", "generate_synthetic", "image_entropy", "load_config",
    "load_dataset", "load_sequence", "local_extrema", "predict_sequence", "subsample",
    "to_grayscale_stack", "train",
]
