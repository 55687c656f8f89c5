import statistics

import numpy as np
import pytest

from keygest import model_io
from keygest.config import PipelineConfig
from keygest.pipeline import (
    STAGES,
    TrainedModel,
    evaluate,
    format_table,
    predict_sequence,
    stratified_split,
    time_stages,
    train,
)
from keygest.sequence_io import FrameSequence, make_dataset
from keygest.synthetic import class_name, generate_synthetic


@pytest.fixture(scope="module")
def model(small_dataset, small_config):
    return train(small_dataset, small_config)


def test_model_dimensions(model, small_config):
    assert model.feature_dim == small_config.n_keyframes * small_config.dictionary_size + 177
    assert model.classifier.dim == model.feature_dim
    assert min(model.weights) >= 1


def test_default_dimension_is_257():
    ds = generate_synthetic(classes=2, per_class=4, frames=8, size=32, seed=1)
    m = train(ds, PipelineConfig(svm_epochs=20))
    assert m.feature_dim == m.classifier.dim == 257


def test_training_sequences_get_their_own_label(model, small_dataset):
    hits = [predict_sequence(model, s) == s.label for s in small_dataset.sequences]
    assert np.mean(hits) >= 0.9


def test_robust_prediction_paths(model, small_dataset):
    flat = FrameSequence.from_array(np.full((10, 48, 48), 128, dtype=np.uint8))
    assert predict_sequence(model, flat) in model.classes
    short = FrameSequence(small_dataset.sequences[0].frames[:3])
    assert predict_sequence(model, short) in model.classes


def test_model_roundtrip(model, small_dataset, tmp_path):
    path = tmp_path / "m.kg"
    model.save(path)
    back = TrainedModel.load(path)
    assert back.dumps() == model.dumps()
    probe = small_dataset.sequences[::3]
    assert [predict_sequence(back, s) for s in probe] == [predict_sequence(model, s) for s in probe]


def test_training_is_deterministic(small_dataset, small_config, model):
    assert train(small_dataset, small_config).dumps() == model.dumps()


def test_model_dim_mismatch_is_format_error(model):
    fields = model.to_fields()
    fields["svm.weights"] = fields["svm.weights"][:, :-1]
    with pytest.raises(model_io.ModelFormatError):
        TrainedModel.from_fields(fields)


def test_single_class_rejected(small_dataset):
    one = make_dataset([s for s in small_dataset.sequences if s.label == small_dataset.classes[0]])
    with pytest.raises(ValueError):
        train(one)
    with pytest.raises(ValueError):
        evaluate(one)


def test_stratified_split_proportions():
    labels = np.repeat([0, 1, 2], 20)
    tr, va, te = stratified_split(labels, PipelineConfig(), np.random.default_rng(0))
    assert (len(tr), len(va), len(te)) == (30, 15, 15)
    assert not set(tr) & set(va) and not set(va) & set(te)
    for part, size in ((tr, 10), (va, 5), (te, 5)):
        assert np.bincount(labels[part]).tolist() == [size] * 3
    with pytest.raises(ValueError, match="4"):
        stratified_split(np.repeat([0, 1], [3, 8]), PipelineConfig(), np.random.default_rng(0))


def test_evaluate_report(small_dataset, small_config):
    rep = evaluate(small_dataset, small_config)
    assert len(rep["splits"]) == 3
    for cue in ("fused", "appearance", "motion"):
        vals = [r[cue] for r in rep["splits"]]
        assert abs(rep["summary"][cue]["mean"] - statistics.fmean(vals)) <= 1e-12
        assert abs(rep["summary"][cue]["std"] - statistics.stdev(vals)) <= 1e-12
    n_test = len(stratified_split(small_dataset.labels, small_config, np.random.default_rng(0))[2])
    assert np.sum(rep["confusion_matrix"]) == 3 * n_test
    assert "timings" not in rep
    table = format_table(rep)
    assert "±" in table and "motion" in table


def test_evaluate_without_ablation(small_dataset, small_config):
    rep = evaluate(small_dataset, small_config.replace(splits=1), ablation=False)
    assert list(rep["summary"]) == ["fused"]


def test_timing_rows(model, small_dataset):
    t = time_stages(model, small_dataset.sequences[0], repeats=3)
    assert tuple(t) == STAGES and all(v >= 0 for v in t.values())


def test_synthetic_generator_contract():
    ds = generate_synthetic(classes=6, per_class=20, frames=40, size=64, seed=0)
    assert len(ds) == 120 and len(ds.classes) == 6
    assert all(len(s) == 40 and (s.width, s.height) == (64, 64) for s in ds.sequences)
    again = generate_synthetic(classes=6, per_class=20, frames=40, size=64, seed=0)
    assert all(a.as_array().tobytes() == b.as_array().tobytes() for a, b in zip(ds.sequences, again.sequences))
    arrays = [s.as_array() for s in ds.sequences]
    for i in range(0, 120, 7):
        for j in range(0, 120, 5):
            if ds.labels[i] != ds.labels[j]:
                assert not np.array_equal(arrays[i], arrays[j])
    assert ds.classes[0] == class_name(0)
