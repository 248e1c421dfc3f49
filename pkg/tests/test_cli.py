from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from newsvol.artifacts import read_jsonl, without_timestamp
from newsvol.cli import main
from newsvol.synthetic import make_fixture

ARTIFACTS = (
    "joined.jsonl", "prices.jsonl", "garch.jsonl", "labeled.jsonl", "vocab.tsv",
    "train.features", "test.features", "model.jsonl", "report.jsonl", "report.txt",
)


@pytest.fixture(scope="module")
def inputs(tmp_path_factory):
    return make_fixture(planted_p=0, seed=1, n_docs=200).write(tmp_path_factory.mktemp("in"))


@pytest.fixture(scope="module")
def planted_inputs(tmp_path_factory):
    return make_fixture(planted_p=3, seed=0).write(tmp_path_factory.mktemp("in3"))


def run_pipeline(news, prices, work, *extra):
    base = ["--workdir", str(work), *extra]
    assert main(["ingest", "--news", str(news), "--prices", str(prices), *base]) == 0
    for step in ("fit", "label", "featurize", "train", "eval"):
        assert main([step, *base]) == 0, step


def test_end_to_end(inputs, tmp_path, capsys):
    run_pipeline(*inputs, tmp_path)
    for name in ARTIFACTS:
        assert (tmp_path / name).is_file(), name
    _, (report,) = read_jsonl(tmp_path / "report.jsonl", "report")
    assert report["test"]["accuracy"] >= 0.95
    assert "seed=42" in capsys.readouterr().out


def test_every_artifact_carries_seed_and_hash(inputs, tmp_path):
    run_pipeline(*inputs, tmp_path, "--seed", "5")
    for name in ARTIFACTS:
        header = json.loads((tmp_path / name).read_text(encoding="utf-8").partition("\n")[0])
        assert header["seed"] == 5 and len(header["config_hash"]) == 16, name


def test_byte_identical_reruns(inputs, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_pipeline(*inputs, a)
    run_pipeline(*inputs, b)
    for name in ARTIFACTS:
        ta, tb = (p.joinpath(name).read_bytes().decode("utf-8") for p in (a, b))
        assert without_timestamp(ta) == without_timestamp(tb), name
        assert "\r" not in ta


def test_label_p0(inputs, tmp_path, capsys):
    news, prices = inputs
    assert main(["ingest", "--news", str(news), "--prices", str(prices), "--workdir", str(tmp_path)]) == 0
    assert main(["label", "--p", "0", "--workdir", str(tmp_path)]) == 0
    header, rows = read_jsonl(tmp_path / "labeled.jsonl", "labeled")
    assert header["p"] == 0 and len(rows) == 200
    assert {r["label"] for r in rows} == {"Positive", "Negative"}
    assert not (tmp_path / "garch.jsonl").exists()  # p=0 needs no model


def test_three_class_labels(inputs, tmp_path):
    news, prices = inputs
    main(["ingest", "--news", str(news), "--prices", str(prices), "--workdir", str(tmp_path)])
    assert main(["label", "--p", "0", "--min-thr", "-0.003", "--max-thr", "0.003", "--workdir", str(tmp_path)]) == 0
    _, rows = read_jsonl(tmp_path / "labeled.jsonl", "labeled")
    assert {r["label"] for r in rows} == {"Positive", "Negative", "Neutral"}


def test_cv_and_grid(inputs, tmp_path, capsys):
    news, prices = inputs
    main(["ingest", "--news", str(news), "--prices", str(prices), "--workdir", str(tmp_path)])
    main(["label", "--workdir", str(tmp_path)])
    rc = main(["eval", "--folds", "4", "--grid", "C=0.1,1", "--model", "svm", "--workdir", str(tmp_path)])
    assert rc == 0
    _, (report,) = read_jsonl(tmp_path / "report.jsonl", "report")
    assert report["cv"]["k"] == 4 and len(report["cv"]["fold_accuracies"]) == 4
    assert report["grid"]["best"]["C"] in (0.1, 1.0)
    assert main(["report", "--workdir", str(tmp_path)]) == 0
    assert "CV mean accuracy" in capsys.readouterr().out


def test_sweep_planted(planted_inputs, tmp_path, capsys):
    news, prices = planted_inputs
    main(["ingest", "--news", str(news), "--prices", str(prices), "--workdir", str(tmp_path)])
    assert main(["sweep-p", "--p-max", "5", "--workdir", str(tmp_path)]) == 0
    _, (payload,) = read_jsonl(tmp_path / "sweep.jsonl", "sweep")
    assert [r[0] for r in payload["rows"]] == [0, 1, 2, 3, 4, 5]
    assert payload["best_p"] == 3


def test_chunk(capsys):
    assert main(["chunk", "quality", "of", "service"]) == 0
    assert "Rule2" in capsys.readouterr().out


class TestExitCodes:
    def test_missing_prccd_names_column(self, inputs, tmp_path, capsys):
        news, prices = inputs
        bad = tmp_path / "prices.csv"
        bad.write_text(Path(prices).read_text().replace("prccd", "close"))
        assert main(["ingest", "--news", str(news), "--prices", str(bad), "--workdir", str(tmp_path)]) == 2
        assert "prccd" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["ingest", "--news", str(tmp_path / "x.csv"), "--prices", str(tmp_path / "y.csv"),
                     "--workdir", str(tmp_path)]) == 2

    def test_missing_earlier_step(self, tmp_path, capsys):
        assert main(["label", "--workdir", str(tmp_path)]) == 2
        assert "earlier pipeline step" in capsys.readouterr().err

    def test_contract_errors(self, tmp_path):
        assert main(["label", "--min-thr", "0.1", "--workdir", str(tmp_path)]) == 1
        assert main(["label", "--split", "1.5", "--workdir", str(tmp_path)]) == 1
        assert main(["ingest", "--workdir", str(tmp_path)]) == 1

    def test_bad_thresholds(self, inputs, tmp_path):
        news, prices = inputs
        main(["ingest", "--news", str(news), "--prices", str(prices), "--workdir", str(tmp_path)])
        assert main(["label", "--min-thr", "0.1", "--max-thr", "-0.1", "--workdir", str(tmp_path)]) == 1

    def test_vocab_mismatch(self, inputs, tmp_path):
        run_pipeline(*inputs, tmp_path)
        model = tmp_path / "model.jsonl"
        text = model.read_text()
        header = json.loads(text.partition("\n")[0])
        model.write_text(text.replace(header["vocab_checksum"], "0" * len(header["vocab_checksum"])))
        assert main(["eval", "--workdir", str(tmp_path)]) == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2


class TestConfig:
    def test_env_workdir(self, inputs, tmp_path, monkeypatch):
        news, prices = inputs
        monkeypatch.setenv("PRIVYSENSE_WORKDIR", str(tmp_path / "env"))
        assert main(["ingest", "--news", str(news), "--prices", str(prices)]) == 0
        assert (tmp_path / "env" / "joined.jsonl").is_file()

    def test_precedence(self, inputs, tmp_path, monkeypatch):
        news, prices = inputs
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"workdir": str(tmp_path / "file"), "seed": 7, "news": str(news), "prices": str(prices)}))
        monkeypatch.setenv("PRIVYSENSE_WORKDIR", str(tmp_path / "env"))
        assert main(["ingest", "--config", str(cfg), "--seed", "9"]) == 0
        header, _ = read_jsonl(tmp_path / "file" / "joined.jsonl", "joined")
        assert header["seed"] == 9
        assert not (tmp_path / "env").exists()
        assert main(["label", "--config", str(cfg)]) == 0
        header, _ = read_jsonl(tmp_path / "file" / "labeled.jsonl", "labeled")
        assert header["seed"] == 7

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"colour": 1}))
        assert main(["label", "--config", str(cfg), "--workdir", str(tmp_path)]) == 2

    def test_paths_do_not_change_hash(self, inputs, tmp_path):
        news, prices = inputs
        for sub in ("a", "b"):
            main(["ingest", "--news", str(news), "--prices", str(prices), "--workdir", str(tmp_path / sub)])
        ha, _ = read_jsonl(tmp_path / "a" / "joined.jsonl")
        hb, _ = read_jsonl(tmp_path / "b" / "joined.jsonl")
        assert ha["config_hash"] == hb["config_hash"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "newsvol", "chunk", "effective algorithm"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "Rule1" in proc.stdout
