"""Tests for the command line interface and its exit-code contract."""

import json
import subprocess
import sys
from pathlib import Path

from specdetect.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"
SCORES = DATA / "synthetic_pairs.jsonl"


class TestExitCodes:
    def test_validate_ok(self, capsys):
        assert main(["score", "--in", str(SCORES), "--validate"]) == 0
        out = capsys.readouterr().out
        assert "40 documents" in out and "20 pairs" in out

    def test_validation_failure_is_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("{broken\n")
        assert main(["score", "--in", str(bad), "--validate"]) == 1

    def test_missing_file_is_2(self, tmp_path):
        assert main(["score", "--in", str(tmp_path / "nope.jsonl"),
                     "--validate"]) == 2

    def test_numeric_failure_is_3(self, tmp_path):
        constant = tmp_path / "constant.jsonl"
        constant.write_text(json.dumps({
            "id": "c", "pair_key": "c", "source": "human", "model_name": "",
            "tokens": ["a", "b", "c"], "nll": [1.0, 1.0, 1.0]}) + "\n")
        assert main(["spectrum", "--in", str(constant),
                     "--out", str(tmp_path / "s.csv")]) == 3

    def test_bad_arguments_are_1(self):
        assert main(["score"]) == 1
        assert main(["no-such-command"]) == 1


class TestStageCommands:
    def test_spectrum_features_detect_pair_chain(self, tmp_path):
        spectra_csv = tmp_path / "spectra.csv"
        features_csv = tmp_path / "features.csv"
        report_json = tmp_path / "pairwise.json"

        assert main(["spectrum", "--in", str(SCORES),
                     "--out", str(spectra_csv)]) == 0
        assert main(["features", "--in", str(SCORES), "--grid-size", "16",
                     "--out", str(features_csv)]) == 0
        assert main(["detect-pair", "--spectra", str(spectra_csv),
                     "--corpus", str(SCORES), "--k-max", "8",
                     "--holdout", "--report", str(report_json)]) == 0
        payload = json.loads(report_json.read_text())
        assert payload["sweep"]["best"]["accuracy"] == 1.0
        assert payload["holdout"]["accuracy"] == 1.0

    def test_detect_pair_fixed_config(self, tmp_path):
        spectra_csv = tmp_path / "spectra.csv"
        main(["spectrum", "--in", str(SCORES), "--out", str(spectra_csv)])
        report_json = tmp_path / "fixed.json"
        assert main(["detect-pair", "--spectra", str(spectra_csv),
                     "--corpus", str(SCORES), "--delta-k", "2",
                     "--direction", "model_higher",
                     "--report", str(report_json)]) == 0
        payload = json.loads(report_json.read_text())
        assert payload["fixed_config"]["delta_k"] == 2
        assert payload["accuracy"] == 1.0

    def test_train_clf(self, tmp_path):
        features_csv = tmp_path / "features.csv"
        main(["features", "--in", str(SCORES), "--grid-size", "16",
              "--out", str(features_csv)])
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({
            "scalers": ["minmax"], "k_best": [8],
            "classifiers": {"knn": {"n_neighbors": [3]}},
        }))
        report = tmp_path / "clf.json"
        model_out = tmp_path / "pipeline.json"
        assert main(["train-clf", "--features", str(features_csv),
                     "--grid", str(grid), "--folds", "5", "--seed", "3",
                     "--report", str(report), "--model-out", str(model_out)]) == 0
        payload = json.loads(report.read_text())
        assert 0.0 <= payload["mean_accuracy"] <= 1.0
        assert json.loads(model_out.read_text())["format"] == "specdetect-pipeline"

    def test_train_ngram_and_rescore(self, tmp_path):
        model_path = tmp_path / "bigram.json"
        assert main(["train-ngram", "--corpus", str(DATA / "tiny_corpus.txt"),
                     "--min-count", "1", "--k", "0.2",
                     "--out", str(model_path)]) == 0
        rescored = tmp_path / "rescored.jsonl"
        assert main(["score", "--in", str(SCORES), "--ngram", str(model_path),
                     "--out", str(rescored)]) == 0
        assert main(["score", "--in", str(rescored), "--validate"]) == 0

    def test_analyze(self, tmp_path):
        report = tmp_path / "ablation.json"
        assert main(["analyze", "--corpus", str(SCORES),
                     "--condition", "mask:NOUN,VERB:mean_replace",
                     "--seed", "5", "--grid-size", "16",
                     "--report", str(report)]) == 0
        payload = json.loads(report.read_text())
        assert 0.0 <= payload["overlap_human"] <= 1.0
        assert payload["counts"]["mask_tags"] == ["NOUN", "VERB"]

    def test_analyze_length_and_yesno(self, tmp_path):
        for condition in ("length:50", "yesno"):
            report = tmp_path / f"{condition.replace(':', '_')}.json"
            assert main(["analyze", "--corpus", str(SCORES),
                         "--condition", condition, "--grid-size", "8",
                         "--report", str(report)]) == 0

    def test_plot_csv_and_svg(self, tmp_path):
        spectra_csv = tmp_path / "spectra.csv"
        main(["spectrum", "--in", str(SCORES), "--out", str(spectra_csv)])
        out_csv = tmp_path / "curves.csv"
        out_svg = tmp_path / "curves.svg"
        assert main(["plot", "--spectra", str(spectra_csv), "--corpus",
                     str(SCORES), "--bins", "16", "--bootstrap", "100",
                     "--seed", "1", "--out", str(out_csv)]) == 0
        assert main(["plot", "--spectra", str(spectra_csv), "--corpus",
                     str(SCORES), "--bins", "16", "--bootstrap", "100",
                     "--seed", "1", "--span", "0.5", "--out", str(out_svg)]) == 0
        assert out_csv.read_text().startswith("group,freq,mean,lo,hi")
        assert "<svg" in out_svg.read_text()

    def test_run_and_report(self, tmp_path):
        assert main(["run", "--config", str(DATA / "run_synthetic.yaml"),
                     "--out", str(tmp_path / "run")]) == 0
        pairwise = tmp_path / "run" / "pairwise_report.json"
        table_path = tmp_path / "table.md"
        assert main(["report", str(pairwise), "--out", str(table_path)]) == 0
        table = table_path.read_text()
        assert "synthetic-demo" in table
        assert "1.0000" in table


class TestConsoleEntryPoint:
    def test_module_invocation(self):
        result = subprocess.run(
            [sys.executable, "-m", "specdetect.cli", "score", "--in",
             str(SCORES), "--validate"],
            capture_output=True, text=True)
        assert result.returncode == 0
        assert "40 documents" in result.stdout
