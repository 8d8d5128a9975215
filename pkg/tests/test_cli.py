import json

import pytest

from pcgkit.cli import main


@pytest.fixture(scope="module")
def toy_root(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "toy"
    assert main(["synth", "--out", str(out), "--patients", "20", "--seconds", "4"]) == 0
    return out


def write_config(path, toy_root, workdir, **overrides):
    config = {
        "experiment": "e1",
        "dataset_root": str(toy_root),
        "workdir": str(workdir),
        "window_seconds": 1,
        "feature": "wst",
        "model": "cnn1d",
        "model_overrides": {"conv_channels": [4, 8, 8, 8], "dense_widths": [32, 16, 8]},
        "batch_size": 16,
        "learning_rate": 1e-3,
        "epochs": 3,
        "seed": 0,
    }
    config.update(overrides)
    path.write_text(json.dumps(config))
    return path


def test_synth_writes_layout(toy_root):
    assert len(list(toy_root.glob("*.txt"))) == 20
    assert len(list(toy_root.glob("*.wav"))) == 20


def test_preprocess_command(toy_root, tmp_path, capsys):
    rc = main(
        [
            "preprocess",
            "--dataset-root",
            str(toy_root),
            "--dataset",
            "2022",
            "--window",
            "1",
            "--workdir",
            str(tmp_path / "work"),
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "segments: 80 ok" in out
    assert (tmp_path / "work" / "manifest.jsonl").exists()


def test_train_and_eval_commands(toy_root, tmp_path, capsys):
    config_path = write_config(tmp_path / "config.json", toy_root, tmp_path / "work")
    rc = main(["train", "--config", str(config_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "checkpoint:" in out
    checkpoint = tmp_path / "work" / "model-e1.ckpt"
    assert checkpoint.exists()

    rc = main(["eval", "--checkpoint", str(checkpoint), "--split", "test"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report["classes"]) == {"Present", "Unknown", "Absent"}


def test_extract_command(toy_root, tmp_path, capsys):
    config_path = write_config(tmp_path / "config.json", toy_root, tmp_path / "work")
    rc = main(["extract", "--config", str(config_path), "--features", "mfcc"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "train:" in out and "maps of shape" in out


def test_ablate_command(toy_root, tmp_path, capsys):
    config_path = write_config(
        tmp_path / "config.json", toy_root, tmp_path / "abl", epochs=2
    )
    rc = main(["ablate", "--config", str(config_path), "--sizes", "1,2"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "*" in out  # best row marked
    assert "1s" in out and "2s" in out


def test_seed_override(toy_root, tmp_path, capsys):
    config_path = write_config(tmp_path / "config.json", toy_root, tmp_path / "work2")
    rc = main(["train", "--config", str(config_path), "--seed", "3"])
    assert rc == 0
    report = json.loads((tmp_path / "work2" / "report-e1.json").read_text())
    assert report["extra"]["seed"] == 3
