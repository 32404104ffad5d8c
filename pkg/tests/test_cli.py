import json

import pytest

from lpart.cli import main
from lpart.streams import read_all, read_header


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture()
def data_files(tmp_path, capsys):
    train = tmp_path / "train.lpft"
    test = tmp_path / "test.lpft"
    code, _, _ = run(
        capsys,
        "synth", "--classes", "3", "--dim", "2", "--per-class", "60", "--spread", "0.03",
        "--seed", "5", "--out", str(train), "--test-per-class", "20", "--out-test", str(test),
    )
    assert code == 0
    return train, test


def test_synth_writes_both_files(data_files):
    train, test = data_files
    assert read_header(train).count == 180
    assert read_header(test).count == 60


def test_mask_and_normalize_round(tmp_path, capsys, data_files):
    train, _ = data_files
    masked = tmp_path / "masked.lpft"
    code, out, _ = run(
        capsys, "mask", "--in", str(train), "--out", str(masked),
        "--label-rate", "0.5", "--seed", "1",
    )
    assert code == 0
    info = json.loads(out)
    assert info["samples"] == 180 and 40 <= info["labeled"] <= 140
    normalized = tmp_path / "norm.lpft"
    code, out, _ = run(capsys, "normalize", "--in", str(masked), "--out", str(normalized))
    assert code == 0
    assert len(json.loads(out)["dimensions"]) == 2
    assert read_header(normalized).count == 180


def test_run_semi_json_report(tmp_path, capsys, data_files):
    train, test = data_files
    out_path = tmp_path / "report.json"
    code, _, _ = run(
        capsys,
        "run-semi", "--train", str(train), "--test", str(test), "--rho", "0.85",
        "--label-rate", "1.0", "--trials", "2", "--seed", "9", "--out", str(out_path),
    )
    assert code == 0
    report = json.loads(out_path.read_text())
    assert report["config"]["model"] == "lpart"
    assert report["aggregate"]["per_epoch"][0]["accuracy_mean"] > 0.9


def test_run_continual_csv_to_stdout(capsys, data_files):
    train, test = data_files
    code, out, _ = run(
        capsys,
        "run-continual", "--train", str(train), "--test", str(test), "--rho", "0.85",
        "--label-rate", "0.1", "--trials", "1", "--epochs", "3", "--format", "csv",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("kind,")
    assert len([l for l in lines if l.startswith("trial,")]) == 3


def test_fam_with_unlabeled_is_config_error(capsys, data_files):
    train, test = data_files
    code, _, err = run(
        capsys,
        "run-semi", "--train", str(train), "--test", str(test), "--model", "fam",
    )
    assert code == 2
    assert "unlabeled" in err


def test_missing_file_is_config_error(capsys, tmp_path):
    code, _, err = run(
        capsys,
        "run-semi", "--train", str(tmp_path / "nope.lpft"), "--test", str(tmp_path / "n2.lpft"),
    )
    assert code == 2


def test_corrupt_file_is_format_error(capsys, tmp_path, data_files):
    _, test = data_files
    bad = tmp_path / "bad.lpft"
    bad.write_bytes(b"JUNKJUNKJUNKJUNKJUNKJUNK" + bytes(100))
    code, _, err = run(capsys, "run-semi", "--train", str(bad), "--test", str(test))
    assert code == 3
    assert "magic" in err


def test_snapshot_and_predict_round_trip(tmp_path, capsys, data_files):
    train, test = data_files
    snap = tmp_path / "model.lpms"
    code, out, _ = run(
        capsys, "snapshot", "--train", str(train), "--rho", "0.85", "--out", str(snap),
    )
    assert code == 0
    assert json.loads(out)["nodes"] > 0
    pred_path = tmp_path / "pred.json"
    code, _, _ = run(
        capsys, "predict", "--snapshot", str(snap), "--test", str(test),
        "--out", str(pred_path),
    )
    assert code == 0
    predictions = json.loads(pred_path.read_text())["predictions"]
    header, samples = read_all(test)
    assert len(predictions) == header.count
    accuracy = sum(p["predicted"] == p["label"] for p in predictions) / len(predictions)
    assert accuracy > 0.9


def test_fam_snapshot_predict(tmp_path, capsys, data_files):
    train, test = data_files
    snap = tmp_path / "model.fams"
    code, _, _ = run(
        capsys, "snapshot", "--model", "fam", "--train", str(train), "--rho", "0.85",
        "--out", str(snap),
    )
    assert code == 0
    assert snap.read_bytes()[:4] == b"FAMS"
    code, out, _ = run(
        capsys, "predict", "--snapshot", str(snap), "--test", str(test), "--format", "csv",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "index,label,predicted,u1,u2"
    assert len(lines) == 61


def test_predict_rejects_foreign_snapshot(capsys, tmp_path, data_files):
    _, test = data_files
    junk = tmp_path / "junk.bin"
    junk.write_bytes(b"WHAT" + bytes(64))
    code, _, err = run(capsys, "predict", "--snapshot", str(junk), "--test", str(test))
    assert code == 3
    assert "magic" in err


def test_csv_stream_paths(tmp_path, capsys):
    train_csv = tmp_path / "train.csv"
    code, _, _ = run(
        capsys, "synth", "--classes", "2", "--dim", "2", "--per-class", "30",
        "--spread", "0.02", "--seed", "3", "--out", str(train_csv),
    )
    assert code == 0
    assert train_csv.read_text().startswith("label,f0,f1")
    code, out, _ = run(
        capsys, "run-semi", "--train", str(train_csv), "--test", str(train_csv),
        "--rho", "0.8", "--trials", "1",
    )
    assert code == 0
    assert json.loads(out)["aggregate"]["per_epoch"][0]["accuracy_mean"] > 0.9
