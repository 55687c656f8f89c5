import json

import pytest

from keygest.cli import build_parser, main
from keygest.sequence_io import save_dataset


@pytest.fixture(scope="module")
def data_root(tmp_path_factory, small_dataset):
    root = tmp_path_factory.mktemp("cli_ds")
    save_dataset(small_dataset, root)
    return root


def test_all_subcommands_exist():
    sub = next(a for a in build_parser()._actions if a.dest == "command")
    assert {"extract", "entropy", "decision-graph", "train", "predict", "evaluate", "synth"} <= set(sub.choices)


def test_extract_to_file(data_root, tmp_path, capsys):
    seq = next(next(data_root.iterdir()).iterdir())
    out = tmp_path / "keys.json"
    assert main(["extract", "--input", str(seq), "--n", "5", "--kernel", "gaussian", "--out", str(out)]) == 0
    keys = json.loads(out.read_text())
    assert len(keys["indices"]) == 5 and isinstance(keys["fallback_used"], bool)
    assert main(["entropy", "-i", str(seq)]) == 0
    assert len(json.loads(capsys.readouterr().out)["entropy_bits"]) == 16


def test_train_predict_with_config_file(data_root, tmp_path, capsys):
    conf = tmp_path / "k.conf"
    conf.write_text("dictionary_size = 4\nsvm_epochs = 30\n")
    model = tmp_path / "m.kg"
    assert main(["train", "-d", str(data_root), "-c", str(conf), "-D", "6", "-o", str(model)]) == 0
    assert json.loads(capsys.readouterr().out)["feature_dim"] == 5 * 6 + 177
    seq = next(next(data_root.iterdir()).iterdir())
    assert main(["predict", "-i", str(seq), "-m", str(model)]) == 0
    assert "label" in json.loads(capsys.readouterr().out)


def test_evaluate_table(data_root, capsys):
    assert main(["evaluate", "-d", str(data_root), "--splits", "1", "-D", "4", "--svm-epochs", "20",
                 "--format", "table"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("cue") and "fused" in out


def test_synth(tmp_path, capsys):
    assert main(["synth", "-o", str(tmp_path), "--classes", "2", "--per-class", "1", "--frames", "4",
                 "--size", "32x32", "--format", "png"]) == 0
    assert json.loads(capsys.readouterr().out)["sequences"] == 2
    assert len(list(tmp_path.glob("*/*/*.png"))) == 8


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["extract", "-i", str(tmp_path / "none")]) == 1
    assert "no such directory" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["synth", "-o", str(tmp_path), "--size", "big"])


def test_remote_server(data_root, capsys):
    import socket
    import threading
    import time

    import uvicorn

    from keygest.service import app

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        for _ in range(100):
            if server.started:
                break
            time.sleep(0.05)
        seq = next(next(data_root.iterdir()).iterdir())
        assert main(["--server", f"http://127.0.0.1:{port}", "entropy", "-i", str(seq)]) == 0
        remote = json.loads(capsys.readouterr().out)
        assert main(["entropy", "-i", str(seq)]) == 0
        assert json.loads(capsys.readouterr().out) == remote
    finally:
        server.should_exit = True
        thread.join(timeout=10)
