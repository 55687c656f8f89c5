"""FastAPI service exposing extraction, training, prediction and evaluation."""

from __future__ import annotations

import logging
import os
from functools import lru_cache
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..config import PipelineConfig
from ..keyframes import extract_keyframes_traced
from ..pipeline import TrainedModel, evaluate, featurize, sequence_vector, train
from ..sequence_io import MissingDirectoryError, load_dataset, load_sequence, save_dataset
from ..synthetic import generate_synthetic
from . import schemas

log = logging.getLogger(__name__)


def _config(model: schemas.ConfigModel) -> PipelineConfig:
    return PipelineConfig().replace(**model.model_dump(exclude_none=True))


@lru_cache(maxsize=8)
def _cached_model(path: str, mtime_ns: int) -> TrainedModel:
    return TrainedModel.load(path)


def load_model(path: str) -> TrainedModel:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such model file: {path}")
    return _cached_model(str(p.resolve()), os.stat(p).st_mtime_ns)


def create_app() -> FastAPI:
    app = FastAPI(title="keygest", version=__version__)

    @app.exception_handler(FileNotFoundError)
    @app.exception_handler(MissingDirectoryError)
    async def not_found(request: Request, exc: Exception):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def bad_request(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/entropy", response_model=schemas.EntropyResponse)
    def entropy(req: schemas.SequenceRequest):
        from ..entropy import entropy_curve

        seq = load_sequence(req.input, req.target_size)
        return {"source_id": seq.source_id, "entropy_bits": entropy_curve(seq).tolist()}

    @app.post("/extract", response_model=schemas.ExtractResponse)
    def extract(req: schemas.ExtractRequest):
        seq = load_sequence(req.input, req.target_size)
        trace = extract_keyframes_traced(seq, req.n, req.kernel, req.d_c)
        return {
            "source_id": seq.source_id,
            "indices": list(trace.keys.indices),
            "fallback_used": trace.keys.fallback_used,
            "entropy_bits": trace.curve.tolist(),
        }

    @app.post("/decision-graph", response_model=schemas.DecisionGraphResponse)
    def decision_graph(req: schemas.DecisionGraphRequest):
        from .. import density_peaks as dp
        from ..keyframes import normalize_points

        seq = load_sequence(req.input, req.target_size)
        trace = extract_keyframes_traced(seq, req.n, req.kernel, req.d_c)
        ext = trace.extremes
        if not len(ext):
            return {"source_id": seq.source_id, "kernel": req.kernel, "d_c": None, "points": []}
        # fallback runs skip clustering, but the graph is still informative
        points = trace.points if trace.points is not None else normalize_points(ext, trace.curve)
        profile = trace.profile or dp.density_profile(points, req.d_c, req.kernel)
        centers = set(trace.clustering.centers) if trace.clustering else set()
        frames = ext.indices
        out = []
        for k, (p, kind) in enumerate(zip(ext.points, ext.kinds)):
            nh = int(profile.nearest_higher[k])
            out.append({
                "frame_index": p.frame_index, "entropy": p.entropy, "kind": kind,
                "x": float(points[k, 0]), "y": float(points[k, 1]),
                "rho": float(profile.rho[k]), "delta": float(profile.delta[k]),
                "nearest_higher": frames[nh] if nh >= 0 else None, "center": k in centers,
            })
        return {"source_id": seq.source_id, "kernel": req.kernel, "d_c": profile.d_c, "points": out}

    @app.post("/synth", response_model=schemas.SynthResponse)
    def synth(req: schemas.SynthRequest):
        ds = generate_synthetic(req.classes, req.per_class, req.frames, tuple(req.size), req.seed)
        save_dataset(ds, req.out, fmt=req.format)
        return {"out": req.out, "classes": ds.classes, "sequences": len(ds)}

    @app.post("/train", response_model=schemas.TrainResponse)
    def train_model(req: schemas.TrainRequest):
        cfg = _config(req.config)
        model = train(load_dataset(req.dataset, req.target_size), cfg)
        model.save(req.out)
        return {
            "model": req.out, "classes": list(model.classes), "weights": list(model.weights),
            "validation_accuracies": list(model.validation_accuracies), "feature_dim": model.feature_dim,
        }

    @app.post("/predict", response_model=schemas.PredictResponse)
    def predict(req: schemas.PredictRequest):
        model = load_model(req.model)
        seq = load_sequence(req.input, req.target_size)
        label_id = int(model.classifier.predict(sequence_vector(model, featurize(seq, model.config))))
        return {"source_id": seq.source_id, "label": model.classes[label_id], "label_id": label_id}

    @app.post("/evaluate", response_model=schemas.EvaluateResponse, response_model_exclude_none=True)
    def evaluate_dataset(req: schemas.EvaluateRequest):
        cfg = _config(req.config)
        return evaluate(load_dataset(req.dataset, req.target_size), cfg, req.ablation, req.timing)

    return app


app = create_app()


def serve(host: str = "127.0.0.1", port: int = 8000):
    import uvicorn

    uvicorn.run(app, host=host, port=port)
