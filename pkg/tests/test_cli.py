import csv
import json
from pathlib import Path

import pytest

from seqlab.cli import main
from seqlab.ingest import parse_conll, save_canonical_jsonl

DATA = Path(__file__).parent / "data"


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDatasetSetup:
    def test_builtin_creates_canonical_files(self, tmp_path, capsys):
        code, out, _ = run(
            ["--data-dir", str(tmp_path), "dataset", "set-up", "--source", "BI",
             "--name", "mini-conll"],
            capsys,
        )
        assert code == 0
        for name in ("train.jsonl", "val.jsonl", "test.jsonl", "analysis.json"):
            assert (tmp_path / "mini-conll" / name).is_file()
        assert '"scheme_detected": "BIO"' in out

    def test_unknown_source_is_a_usage_error(self, tmp_path, capsys):
        code, _, _ = run(
            ["--data-dir", str(tmp_path), "dataset", "set-up", "--source", "XX",
             "--name", "x"],
            capsys,
        )
        assert code == 2

    def test_fraction_applies_ceil_rule(self, tmp_path, capsys):
        source = tmp_path / "data.conll"
        source.write_text("".join(f"w{i} B-X\n\n" for i in range(10)))
        code, _, _ = run(
            ["--data-dir", str(tmp_path), "dataset", "set-up", "--source", "LF",
             "--name", "half", "--path", str(source), "--fraction", "0.5"],
            capsys,
        )
        assert code == 0
        lines = (tmp_path / "half" / "train.jsonl").read_text().splitlines()
        assert len(lines) == 4  # ceil(0.5 * 8)

    def test_missing_path_is_a_data_error(self, tmp_path, capsys):
        code, _, err = run(
            ["--data-dir", str(tmp_path), "dataset", "set-up", "--source", "LF",
             "--name", "x"],
            capsys,
        )
        assert code == 1
        assert "error" in err


class TestConvert:
    def write_bio_fixture(self, path):
        docs = parse_conll("Ada B-PER\nLovelace I-PER\nmet O\nGrace B-PER\n")
        save_canonical_jsonl(docs, path)

    def test_round_trip_is_byte_identical(self, tmp_path, capsys):
        source = tmp_path / "bio.jsonl"
        self.write_bio_fixture(source)
        bilou = tmp_path / "bilou.jsonl"
        back = tmp_path / "back.jsonl"
        code, _, _ = run(
            ["convert", "--from", "BIO", "--to", "BILOU",
             "--input", str(source), "--output", str(bilou)],
            capsys,
        )
        assert code == 0
        code, _, _ = run(
            ["convert", "--from", "BILOU", "--to", "BIO",
             "--input", str(bilou), "--output", str(back)],
            capsys,
        )
        assert code == 0
        assert back.read_bytes() == source.read_bytes()

    def test_inconsistent_input_lists_violations(self, tmp_path, capsys):
        source = tmp_path / "bad.jsonl"
        source.write_text('{"words":["a","b"],"labels":["O","I-PER"]}\n')
        code, _, err = run(
            ["convert", "--from", "BIO", "--to", "BILOU",
             "--input", str(source), "--output", str(tmp_path / "out.jsonl")],
            capsys,
        )
        assert code == 1
        assert "line 1" in err and "dangling_inside" in err

    def test_io_target_warns_about_lossiness(self, tmp_path, capsys):
        source = tmp_path / "bio.jsonl"
        self.write_bio_fixture(source)
        code, _, err = run(
            ["convert", "--from", "BIO", "--to", "IO",
             "--input", str(source), "--output", str(tmp_path / "io.jsonl")],
            capsys,
        )
        assert code == 0
        assert "lossy" in err


class TestEvaluate:
    def test_echo_tagger_scores_one(self, tmp_path, capsys):
        run(["--data-dir", str(tmp_path), "dataset", "set-up", "--source", "BI",
             "--name", "mini-conll"], capsys)
        dataset_dir = tmp_path / "mini-conll"
        code, out, _ = run(
            ["--data-dir", str(tmp_path), "evaluate",
             "--tagger", f"echo:{dataset_dir / 'test.jsonl'}",
             "--dataset", "mini-conll", "--phase", "test"],
            capsys,
        )
        assert code == 0
        assert "strict entity micro f1 = 1.0000" in out
        report = json.loads((dataset_dir / "eval_test.json").read_text())
        assert "strict" in report and "lenient" in report
        assert report["strict"]["micro"]["entity"]["f1"] == 1.0

    def test_all_o_tagger_scores_zero(self, tmp_path, capsys):
        run(["--data-dir", str(tmp_path), "dataset", "set-up", "--source", "BI",
             "--name", "mini-conll"], capsys)
        code, out, _ = run(
            ["--data-dir", str(tmp_path), "evaluate", "--tagger", "all-o",
             "--dataset", "mini-conll", "--phase", "test"],
            capsys,
        )
        assert code == 0
        assert "strict entity micro f1 = 0.0000" in out

    def test_phase_selects_file(self, tmp_path, capsys):
        run(["--data-dir", str(tmp_path), "dataset", "set-up", "--source", "BI",
             "--name", "mini-conll"], capsys)
        dataset_dir = tmp_path / "mini-conll"
        (dataset_dir / "test.jsonl").unlink()
        # val still evaluates; test does not
        code, _, _ = run(
            ["--data-dir", str(tmp_path), "evaluate",
             "--tagger", "all-o", "--dataset", "mini-conll", "--phase", "val"],
            capsys,
        )
        assert code == 0
        code, _, err = run(
            ["--data-dir", str(tmp_path), "evaluate",
             "--tagger", "all-o", "--dataset", "mini-conll", "--phase", "test"],
            capsys,
        )
        assert code == 1


class TestPredict:
    def test_single_text_lists_entity_fields(self, capsys):
        code, out, _ = run(
            ["predict", "--tagger", f"lexicon:{DATA / 'un_lexicon.json'}",
             "--text", "The United Nations"],
            capsys,
        )
        assert code == 0
        predictions = json.loads(out)
        assert predictions == [
            {"char_start": 4, "char_end": 18, "token": "United Nations", "tag": "ORG"}
        ]

    def test_word_level_with_probabilities(self, capsys):
        code, out, _ = run(
            ["predict", "--tagger", f"lexicon:{DATA / 'un_lexicon.json'}",
             "--text", "The United Nations", "--level", "word", "--probabilities"],
            capsys,
        )
        assert code == 0
        predictions = json.loads(out)
        assert len(predictions) == 3
        assert all("probability" in p for p in predictions)

    def test_file_mode_alignment(self, tmp_path, capsys):
        source = tmp_path / "in.jsonl"
        source.write_text(
            "".join(json.dumps({"text": f"line {i}"}) + "\n" for i in range(3))
        )
        sink = tmp_path / "out.jsonl"
        code, out, _ = run(
            ["predict", "--tagger", "all-o", "--input", str(source),
             "--output", str(sink)],
            capsys,
        )
        assert code == 0
        assert "processed=3 failed=0" in out
        assert len(sink.read_text().splitlines()) == 3

    def test_text_and_input_are_mutually_exclusive(self, capsys):
        code, _, _ = run(
            ["predict", "--tagger", "all-o", "--text", "x", "--input", "y"],
            capsys,
        )
        assert code == 2

    def test_bad_tagger_uri_fails_cleanly(self, capsys):
        code, _, err = run(
            ["predict", "--tagger", "hub:whatever", "--text", "x"], capsys
        )
        assert code == 1
        assert "cannot load tagger" in err


class TestScheduleSimulate:
    def test_constant_losses_patience_zero_gives_one_row(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "max_lr": 1.0, "restart_period_initial": 4, "max_epochs": 10,
            "early_stop_patience": 0, "val_losses": [1.0, 1.0, 1.0],
        }))
        out_csv = tmp_path / "out.csv"
        code, _, _ = run(
            ["schedule", "simulate", "--config", str(cfg), "--output", str(out_csv)],
            capsys,
        )
        assert code == 0
        rows = list(csv.DictReader(out_csv.open()))
        assert len(rows) == 1
        assert rows[0]["epoch"] == "1" and rows[0]["stopped"] == "true"

    def test_preset_with_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"preset": "adaptive", "max_epochs": 4}))
        losses = tmp_path / "losses.json"
        losses.write_text(json.dumps([0.9, 0.8, 0.7, 0.6, 0.5]))
        code, out, _ = run(
            ["schedule", "simulate", "--config", str(cfg), "--losses", str(losses)],
            capsys,
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "epoch,lr,stopped"
        assert len(lines) == 5  # header + 4 epochs

    def test_bad_config_is_a_usage_error(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"preset": "bogus"}))
        code, _, err = run(
            ["schedule", "simulate", "--config", str(cfg)], capsys
        )
        assert code == 2
        assert "bad schedule config" in err


class TestAggregateCommand:
    def write_run(self, directory, name, seed, f1):
        directory.mkdir(parents=True, exist_ok=True)
        (directory / f"{name}.json").write_text(json.dumps({
            "run_name": name, "seed": seed,
            "reports": {"strict": {"micro": {"entity": {"f1": f1}}}},
            "artifacts_path": "",
        }))

    def test_two_runs(self, tmp_path, capsys):
        run_dir = tmp_path / "runs" / "my_training"
        self.write_run(run_dir, "run0", 0, 0.8)
        self.write_run(run_dir, "run1", 1, 0.9)
        code, out, _ = run(["aggregate", "--runs-dir", str(run_dir)], capsys)
        assert code == 0
        assert "0.8500 +/- 0.0500" in out
        assert "best run: run1" in out
        payload = json.loads((run_dir / "aggregate.json").read_text())
        assert payload["metrics"]["strict.micro.entity.f1"]["mean"] == pytest.approx(0.85)

    def test_missing_run_dir(self, tmp_path, capsys):
        code, _, err = run(
            ["aggregate", "--runs-dir", str(tmp_path / "none")], capsys
        )
        assert code == 1


class TestUsage:
    def test_no_command_is_usage_error(self, capsys):
        assert run([], capsys)[0] == 2

    def test_unknown_command_is_usage_error(self, capsys):
        assert run(["frobnicate"], capsys)[0] == 2
