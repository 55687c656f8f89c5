"""Command-line client for the keygest service.

Every subcommand is a request to the HTTP API. With ``--server URL`` it goes
to a running service (``keygest serve``); otherwise the app is run
in-process, so no server is needed for local use. Paths are resolved where
the service runs.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from .config import parse_config_text


class ClientError(RuntimeError):
    pass


def _client(server):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    with warnings.catch_warnings():
        # starlette nags about its httpx transport; irrelevant in-process
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def call(server, endpoint: str, payload: dict) -> dict:
    with _client(server) as client:
        resp = client.post(endpoint, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise ClientError(f"{endpoint}: {detail}")
    return resp.json()


def _abspath(p):
    return str(Path(p).resolve()) if p is not None else None


def _size(text):
    try:
        w, h = text.lower().split("x")
        return [int(w), int(h)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 320x240, got {text!r}")


def _config_payload(args) -> dict:
    cfg = parse_config_text(Path(args.config).read_text()) if args.config else {}
    flags = {
        "n_keyframes": args.n, "dictionary_size": args.dictionary_size, "kernel": args.kernel,
        "d_c": args.d_c, "stride": args.stride, "svm_c": args.svm_c, "svm_epochs": args.svm_epochs,
        "seed": args.seed, "splits": getattr(args, "splits", None),
    }
    cfg.update({k: v for k, v in flags.items() if v is not None})
    return {k: v for k, v in cfg.items() if v is not None}


def _emit(args, data, text=None):
    out = text if text is not None else json.dumps(data, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None) and args.command not in ("train", "synth"):
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def _sequence_args(p):
    p.add_argument("--input", "-i", required=True, help="directory of frame images")
    p.add_argument("--size", type=_size, help="resize frames to WxH")


def _pipeline_args(p, splits=False):
    p.add_argument("--dataset", "-d", required=True, help="<class>/<sequence>/<frame> tree")
    p.add_argument("--size", type=_size, help="resize frames to WxH")
    p.add_argument("--config", "-c", help="key = value config file")
    p.add_argument("--n", type=int, help="key frames per sequence")
    p.add_argument("--dictionary-size", "-D", type=int)
    p.add_argument("--kernel", choices=("gaussian", "cutoff"))
    p.add_argument("--d-c", type=float, help="cutoff distance (default: 2nd percentile)")
    p.add_argument("--stride", type=int)
    p.add_argument("--svm-c", type=float)
    p.add_argument("--svm-epochs", type=int)
    p.add_argument("--seed", type=int)
    if splits:
        p.add_argument("--splits", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="keygest", description=__doc__.splitlines()[0])
    parser.add_argument("--server", help="base URL of a running service; default runs in-process")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="per-frame entropy curve")
    _sequence_args(p)
    p.add_argument("--out", "-o")

    for name, helptext in (("extract", "key-frame indices"), ("decision-graph", "per-point rho and delta")):
        p = sub.add_parser(name, help=helptext)
        _sequence_args(p)
        p.add_argument("--n", type=int, default=5)
        p.add_argument("--kernel", choices=("gaussian", "cutoff"), default="gaussian")
        p.add_argument("--d-c", type=float)
        p.add_argument("--out", "-o")

    p = sub.add_parser("synth", help="write a synthetic gesture dataset")
    p.add_argument("--out", "-o", required=True)
    p.add_argument("--classes", type=int, default=6)
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--frames", type=int, default=40)
    p.add_argument("--size", type=_size, default=[64, 64])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("pgm", "png"), default="pgm")

    p = sub.add_parser("train", help="train and save a model")
    _pipeline_args(p)
    p.add_argument("--out", "-o", required=True, help="model file to write")

    p = sub.add_parser("predict", help="label one sequence")
    _sequence_args(p)
    p.add_argument("--model", "-m", required=True)
    p.add_argument("--out", "-o")

    p = sub.add_parser("evaluate", help="repeated stratified-split evaluation")
    _pipeline_args(p, splits=True)
    p.add_argument("--no-ablation", action="store_true", help="skip single-cue runs")
    p.add_argument("--timing", action="store_true", help="add per-stage timings (not deterministic)")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--out", "-o")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def run(args) -> int:
    cmd = args.command
    if cmd == "serve":
        from .service.app import serve

        serve(args.host, args.port)
        return 0
    if cmd in ("entropy", "extract", "decision-graph", "predict"):
        payload = {"input": _abspath(args.input), "target_size": args.size}
        if cmd in ("extract", "decision-graph"):
            payload.update(n=args.n, kernel=args.kernel, d_c=args.d_c)
        if cmd == "predict":
            payload["model"] = _abspath(args.model)
        _emit(args, call(args.server, "/" + cmd, payload))
    elif cmd == "synth":
        payload = dict(out=_abspath(args.out), classes=args.classes, per_class=args.per_class,
                       frames=args.frames, size=args.size, seed=args.seed, format=args.format)
        _emit(args, call(args.server, "/synth", payload))
    elif cmd == "train":
        payload = {"dataset": _abspath(args.dataset), "target_size": args.size,
                   "config": _config_payload(args), "out": _abspath(args.out)}
        _emit(args, call(args.server, "/train", payload))
    elif cmd == "evaluate":
        payload = {"dataset": _abspath(args.dataset), "target_size": args.size, "config": _config_payload(args),
                   "ablation": not args.no_ablation, "timing": args.timing}
        report = call(args.server, "/evaluate", payload)
        if args.format == "table":
            from .pipeline import format_table

            _emit(args, report, format_table(report) + "\n")
        else:
            _emit(args, report)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return run(args)
    except (ClientError, OSError, ValueError) as exc:
        print(f"keygest: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
