"""Training, prediction and repeated-split evaluation of the full recognizer.

Per sequence: key frames are extracted, the appearance cue is the
concatenated per-key-frame BoF of patch-gradient descriptors (N * D bins) and
the motion cue is the per-plane-normalized LBP-TOP histogram of the key-frame
volume (177 bins). Single-cue validation accuracies set the integer fusion
weights; the final SVM runs on the weighted concatenation.
"""

from __future__ import annotations

import json
import logging
import statistics
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import model_io
from .bof import Codebook, appearance_histogram, encode, train_codebook
from .classifier import LinearModel, train_svm
from .config import PipelineConfig
from .descriptors import LBP_TOP_DIM, dense_patch_descriptors, lbp_top, normalize_blocks
from .entropy import entropy_curve
from .fusion import fuse, fusion_weights
from .keyframes import KeyFrameSet, keyframes_from_curve, subsample
from .sequence_io import FrameSequence, LabeledDataset, to_grayscale_stack

log = logging.getLogger(__name__)

STAGES = ("entropy", "clustering", "feature_extraction", "classification")
TIMING_REPEATS = 5


@dataclass
class SequenceFeatures:
    """Split-independent features of one sequence."""

    keys: KeyFrameSet
    descriptors: list
    motion: np.ndarray


@dataclass(eq=False)
class TrainedModel:
    codebook: Codebook
    weights: tuple
    classifier: LinearModel
    config: PipelineConfig
    validation_accuracies: tuple = ()
    format_version: int = model_io.FORMAT_VERSION

    @property
    def classes(self) -> tuple:
        return self.classifier.classes

    @property
    def feature_dim(self) -> int:
        return self.config.n_keyframes * self.codebook.size + LBP_TOP_DIM

    def to_fields(self) -> dict:
        return {
            "config": json.dumps(self.config.to_dict(), sort_keys=True),
            "classes": json.dumps(list(self.classes)),
            "codebook.centroids": self.codebook.centroids,
            "codebook.seed": int(self.codebook.seed),
            "fusion.weights": np.array(self.weights, dtype=np.int64),
            "fusion.validation_accuracies": np.array(self.validation_accuracies, dtype=np.float64),
            "svm.weights": self.classifier.weights,
            "svm.bias": self.classifier.bias,
        }

    @classmethod
    def from_fields(cls, f: dict) -> "TrainedModel":
        try:
            cfg = PipelineConfig.from_dict(json.loads(f["config"]))
            classes = tuple(json.loads(f["classes"]))
            model = cls(
                Codebook(f["codebook.centroids"], int(f["codebook.seed"])),
                tuple(int(w) for w in f["fusion.weights"]),
                LinearModel(f["svm.weights"], f["svm.bias"], classes),
                cfg,
                tuple(float(a) for a in f["fusion.validation_accuracies"]),
            )
        except KeyError as exc:
            raise model_io.ModelFormatError(f"model file is missing field {exc}") from exc
        if model.classifier.dim != model.feature_dim:
            raise model_io.ModelFormatError(
                f"classifier dim {model.classifier.dim} != {model.feature_dim} expected from codebook and config"
            )
        return model

    def dumps(self) -> bytes:
        return model_io.dumps(self.to_fields())

    def save(self, path):
        return model_io.write(path, self.to_fields())

    @classmethod
    def load(cls, path) -> "TrainedModel":
        return cls.from_fields(model_io.read(path))


def featurize(seq: FrameSequence, cfg: PipelineConfig, timings: Optional[dict] = None) -> SequenceFeatures:
    t0 = time.perf_counter()
    curve = entropy_curve(seq)
    t1 = time.perf_counter()
    keys = keyframes_from_curve(curve, cfg.n_keyframes, cfg.kernel, cfg.d_c).keys
    t2 = time.perf_counter()
    keyseq = subsample(seq, keys)
    descriptors = [dense_patch_descriptors(f, cfg.stride) for f in keyseq.frames[: len(keys.indices)]]
    motion = normalize_blocks(lbp_top(to_grayscale_stack(keyseq)))
    t3 = time.perf_counter()
    if timings is not None:
        timings.update(entropy=t1 - t0, clustering=t2 - t1, feature_extraction=t3 - t2)
    return SequenceFeatures(keys, descriptors, motion)


def featurize_all(sequences, cfg: PipelineConfig) -> list:
    out = []
    for seq in sequences:
        try:
            out.append(featurize(seq, cfg))
        except Exception as exc:
            raise ValueError(f"featurizing {seq.source_id or '<unnamed>'}: {exc}") from exc
    return out


def appearance_vector(feat: SequenceFeatures, codebook: Codebook, n_keyframes: int) -> np.ndarray:
    """N * D histogram; short sequences leave trailing blocks at zero."""
    out = np.zeros(n_keyframes * codebook.size)
    for k, desc in enumerate(feat.descriptors[:n_keyframes]):
        out[k * codebook.size:(k + 1) * codebook.size] = encode(desc, codebook)
    return out


def accuracy(model: LinearModel, x: np.ndarray, y: np.ndarray) -> float:
    """Percent correct."""
    if len(y) == 0:
        return float("nan")
    return 100.0 * float(np.mean(model.predict(x) == y))


@dataclass
class _Fit:
    model: TrainedModel
    hist1: np.ndarray
    hist2: np.ndarray


def fit_features(train_feats, y_train, val_feats, y_val, classes, cfg: PipelineConfig) -> _Fit:
    """Train on explicit train/validation parts.

    The codebook sees descriptors of both parts; single-cue SVMs are fit on
    the train part and scored on the validation part to set the fusion
    weights; the final SVM is fit on both parts.
    """
    feats = list(train_feats) + list(val_feats)
    y = np.concatenate([np.asarray(y_train, dtype=np.int64), np.asarray(y_val, dtype=np.int64)])
    if len(np.unique(y)) < 2:
        raise ValueError("need at least two classes to train")
    all_desc = np.concatenate([d for f in feats for d in f.descriptors])
    codebook = train_codebook(all_desc, cfg.dictionary_size, seed=cfg.seed)
    hist1 = np.array([appearance_vector(f, codebook, cfg.n_keyframes) for f in feats])
    hist2 = np.array([f.motion for f in feats])
    n_tr = len(train_feats)
    svm = dict(c=cfg.svm_c, epochs=cfg.svm_epochs, seed=cfg.seed, classes=classes)
    if len(val_feats) and len(np.unique(y[:n_tr])) >= 2:
        r_a = accuracy(train_svm(hist1[:n_tr], y[:n_tr], **svm), hist1[n_tr:], y[n_tr:])
        r_m = accuracy(train_svm(hist2[:n_tr], y[:n_tr], **svm), hist2[n_tr:], y[n_tr:])
        r = (r_a, r_m)
        weights = tuple(fusion_weights(r))
    else:
        log.warning("no usable validation split; fusion weights default to (1, 1)")
        r, weights = (), (1, 1)
    fused = np.array([fuse(a, m, weights) for a, m in zip(hist1, hist2)])
    clf = train_svm(fused, y, **svm)
    return _Fit(TrainedModel(codebook, weights, clf, cfg, r), hist1, hist2)


def _part_sizes(n: int, cfg: PipelineConfig):
    n_val = max(1, int(np.floor(n * cfg.validation_fraction + 1e-9)))
    n_test = max(1, int(np.floor(n * cfg.test_fraction + 1e-9)))
    n_train = max(1, int(np.floor(n * cfg.train_fraction + 1e-9)))
    if sum((cfg.train_fraction, cfg.validation_fraction, cfg.test_fraction)) >= 1 - 1e-9:
        n_train = n - n_val - n_test
    if n_train < 1 or n_train + n_val + n_test > n:
        return None
    return n_train, n_val, n_test


def stratified_split(labels, cfg: PipelineConfig, rng: np.random.Generator):
    """Per-class shuffled train/validation/test index lists."""
    labels = np.asarray(labels)
    parts = ([], [], [])
    for k in np.unique(labels):
        idx = np.flatnonzero(labels == k)
        sizes = _part_sizes(len(idx), cfg)
        if sizes is None or len(idx) < 4:
            raise ValueError(f"class {k} has {len(idx)} samples; at least 4 needed for a train/validation/test split")
        idx = rng.permutation(idx)
        a, b, c = sizes
        parts[0].extend(idx[:a])
        parts[1].extend(idx[a:a + b])
        parts[2].extend(idx[a + b:a + b + c])
    return tuple(sorted(int(i) for i in p) for p in parts)


def _inner_split(labels, cfg: PipelineConfig, rng: np.random.Generator):
    """Split a training set into train/validation in the configured ratio."""
    share = cfg.validation_fraction / (cfg.train_fraction + cfg.validation_fraction)
    train, val = [], []
    for k in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == k))
        n_val = min(max(1, int(np.floor(len(idx) * share + 1e-9))), len(idx) - 1)
        val.extend(idx[:n_val])
        train.extend(idx[n_val:])
    return sorted(int(i) for i in train), sorted(int(i) for i in val)


def train(dataset: LabeledDataset, cfg: Optional[PipelineConfig] = None) -> TrainedModel:
    """Fit a model on ``dataset``, holding out a stratified validation part for the fusion weights."""
    cfg = cfg or PipelineConfig()
    if len(np.unique(dataset.labels)) < 2:
        raise ValueError("need at least two classes to train")
    feats = featurize_all(dataset.sequences, cfg)
    rng = np.random.default_rng([cfg.seed, 0x7EA1])
    tr, va = _inner_split(dataset.labels, cfg, rng)
    fit = fit_features([feats[i] for i in tr], dataset.labels[tr], [feats[i] for i in va], dataset.labels[va],
                       tuple(dataset.classes), cfg)
    return fit.model


def sequence_vector(model: TrainedModel, feat: SequenceFeatures) -> np.ndarray:
    hist1 = appearance_vector(feat, model.codebook, model.config.n_keyframes)
    return fuse(hist1, feat.motion, model.weights)


def predict_sequence(model: TrainedModel, seq: FrameSequence) -> str:
    """Label name predicted for ``seq``."""
    feat = featurize(seq, model.config)
    return model.classes[model.classifier.predict(sequence_vector(model, feat))]


def time_stages(model: TrainedModel, seq: FrameSequence, repeats: int = TIMING_REPEATS) -> dict:
    """Median wall-clock seconds per stage over ``repeats`` runs."""
    samples = {s: [] for s in STAGES}
    for _ in range(repeats):
        t = {}
        feat = featurize(seq, model.config, timings=t)
        x = sequence_vector(model, feat)
        t0 = time.perf_counter()
        model.classifier.predict(x)
        t["classification"] = time.perf_counter() - t0
        for s in STAGES:
            samples[s].append(t[s])
    return {s: statistics.median(v) for s, v in samples.items()}


def _summary(values) -> dict:
    vals = [float(v) for v in values]
    std = statistics.stdev(vals) if len(vals) > 1 else 0.0
    return {"mean": statistics.fmean(vals), "std": std}


def evaluate(dataset: LabeledDataset, cfg: Optional[PipelineConfig] = None, ablation: bool = True,
             timing: bool = False) -> dict:
    """Repeated stratified train/validation/test evaluation.

    Accuracies are percentages; ``std`` is the sample standard deviation over
    splits. The report is a plain JSON-ready dict and, without ``timing``, a
    deterministic function of the dataset and config.
    """
    cfg = cfg or PipelineConfig()
    labels = np.asarray(dataset.labels)
    if len(np.unique(labels)) < 2:
        raise ValueError("need at least two classes to evaluate")
    for k in np.unique(labels):
        if np.sum(labels == k) < 4:
            raise ValueError(f"class {dataset.classes[k]!r} has fewer than 4 sequences; cannot stratify")
    feats = featurize_all(dataset.sequences, cfg)
    classes = tuple(dataset.classes)
    n_classes = len(classes)
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    splits = []
    svm = dict(c=cfg.svm_c, epochs=cfg.svm_epochs, seed=cfg.seed, classes=classes)
    first = None
    for s in range(cfg.splits):
        rng = np.random.default_rng([cfg.seed, s])
        tr, va, te = stratified_split(labels, cfg, rng)
        fit = fit_features([feats[i] for i in tr], labels[tr], [feats[i] for i in va], labels[va], classes, cfg)
        model = fit.model
        x_test = np.array([sequence_vector(model, feats[i]) for i in te])
        y_test = labels[te]
        pred = model.classifier.predict(x_test)
        np.add.at(confusion, (y_test, pred), 1)
        row = {"split": s, "fused": accuracy(model.classifier, x_test, y_test),
               "weights": list(model.weights), "validation_accuracies": list(model.validation_accuracies)}
        if ablation:
            y_fit = labels[tr + va]
            h1_test = np.array([appearance_vector(feats[i], model.codebook, cfg.n_keyframes) for i in te])
            h2_test = np.array([feats[i].motion for i in te])
            row["appearance"] = accuracy(train_svm(fit.hist1, y_fit, **svm), h1_test, y_test)
            row["motion"] = accuracy(train_svm(fit.hist2, y_fit, **svm), h2_test, y_test)
        splits.append(row)
        if first is None:
            first = (model, te[0])
        log.info("split %d: fused %.2f%%", s, row["fused"])

    cues = ("fused", "appearance", "motion") if ablation else ("fused",)
    report = {
        "config": cfg.to_dict(),
        "classes": list(classes),
        "n_sequences": len(dataset),
        "feature_dim": cfg.n_keyframes * cfg.dictionary_size + LBP_TOP_DIM,
        "splits": splits,
        "summary": {c: _summary(r[c] for r in splits) for c in cues},
        "confusion_matrix": confusion.tolist(),
        "fallback_sequences": sum(f.keys.fallback_used for f in feats),
    }
    if timing:
        model, probe = first
        report["timings"] = time_stages(model, dataset.sequences[probe])
    return report


def format_table(report: dict) -> str:
    """Mean +- std grid of an evaluation report."""
    lines = [f"{'cue':<12} {'accuracy':>20}".rstrip()]
    for cue, s in report["summary"].items():
        acc = f"{s['mean']:.2f}% ± {s['std']:.2f}%"
        lines.append(f"{cue:<12} {acc:>20}")
    if "timings" in report:
        lines.append("")
        lines.append(f"{'stage':<20} {'seconds':>10}")
        for stage, sec in report["timings"].items():
            lines.append(f"{stage:<20} {sec:>10.4f}")
    return "\n".join(lines)
