import numpy as np
import pytest
from fastapi.testclient import TestClient

from keygest.sequence_io import FrameSequence, save_dataset, save_sequence
from keygest.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture(scope="module")
def data_root(tmp_path_factory, small_dataset):
    root = tmp_path_factory.mktemp("ds")
    save_dataset(small_dataset, root)
    return root


def first_sequence(root):
    return str(sorted(p for p in sorted(root.iterdir())[0].iterdir())[0])


def test_health(client):
    assert client.get("/health").json()["status"] == "ok"


def test_entropy_and_extract(client, data_root):
    seq = first_sequence(data_root)
    ent = client.post("/entropy", json={"input": seq}).json()
    assert len(ent["entropy_bits"]) == 16
    ext = client.post("/extract", json={"input": seq, "n": 5, "kernel": "cutoff"}).json()
    assert set(ext) == {"source_id", "indices", "fallback_used", "entropy_bits"}
    assert len(ext["indices"]) == 5 and ext["indices"] == sorted(ext["indices"])
    assert ext["entropy_bits"] == ent["entropy_bits"]


def test_decision_graph(client, data_root):
    g = client.post("/decision-graph", json={"input": first_sequence(data_root), "n": 3}).json()
    assert g["points"]
    assert sum(p["center"] for p in g["points"]) == 3
    assert sum(p["nearest_higher"] is None for p in g["points"]) == 1


def test_decision_graph_of_flat_sequence(client, tmp_path):
    save_sequence(FrameSequence.from_array(np.zeros((6, 4, 4), dtype=np.uint8)), tmp_path)
    g = client.post("/decision-graph", json={"input": str(tmp_path)}).json()
    assert g["points"] == [] and g["d_c"] is None


def test_train_predict_evaluate(client, data_root, tmp_path, small_dataset):
    cfg = {"dictionary_size": 8, "svm_epochs": 40, "splits": 2}
    model = str(tmp_path / "m.kg")
    tr = client.post("/train", json={"dataset": str(data_root), "config": cfg, "out": model}).json()
    assert tr["feature_dim"] == 5 * 8 + 177 and tr["classes"] == list(small_dataset.classes)
    seq = first_sequence(data_root)
    pr = client.post("/predict", json={"input": seq, "model": model}).json()
    assert pr["label"] in tr["classes"] and tr["classes"][pr["label_id"]] == pr["label"]
    ev = client.post("/evaluate", json={"dataset": str(data_root), "config": cfg, "ablation": False}).json()
    assert len(ev["splits"]) == 2 and "timings" not in ev


def test_synth(client, tmp_path):
    r = client.post("/synth", json={"out": str(tmp_path), "classes": 2, "per_class": 2, "frames": 5, "size": [32, 24]})
    assert r.status_code == 200 and r.json()["sequences"] == 4
    assert len(list((tmp_path / r.json()["classes"][1]).glob("*/*.pgm"))) == 10


def test_errors(client, tmp_path):
    assert client.post("/extract", json={"input": str(tmp_path / "missing")}).status_code == 404
    assert client.post("/predict", json={"input": str(tmp_path), "model": str(tmp_path / "x")}).status_code == 404
    assert client.post("/extract", json={"input": str(tmp_path), "n": 0}).status_code == 422
    assert client.post("/train", json={"dataset": str(tmp_path), "out": "m", "config": {"bogus": 1}}).status_code == 422
    # an empty directory is a too-short sequence
    r = client.post("/entropy", json={"input": str(tmp_path)})
    assert r.status_code == 400 and "too short" in r.json()["detail"]
