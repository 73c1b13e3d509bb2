"""Cross-component contract tests.

The scorer talks to the detection library only through the JSONL score
file; validation goes through the primary package's own CLI
(``specdetect score --validate``), exactly as a user would wire the two.
"""

import json
import math
import shutil
import subprocess
from pathlib import Path

import pytest

from lmscore.scoring import Estimator, ScorerError, load_texts, score_with_lm

FIXTURES = Path(__file__).resolve().parent / "fixtures"
TINY_MODEL = FIXTURES / "tiny-model"
TEXTS = FIXTURES / "texts10.jsonl"
REFERENCE = FIXTURES / "reference_scores.json"

pytestmark = pytest.mark.skipif(
    not TINY_MODEL.is_dir(), reason="run tests/fixtures/make_fixtures.py first")


def validate_with_primary_cli(path):
    exe = shutil.which("specdetect")
    if exe is None:
        pytest.skip("primary package CLI not installed")
    return subprocess.run([exe, "score", "--in", str(path), "--validate"],
                          capture_output=True, text=True)


class TestScoreContract:
    def test_output_validates_against_primary_schema(self, tmp_path):
        out = tmp_path / "scores.jsonl"
        count = score_with_lm(TEXTS, TINY_MODEL, out)
        assert count == 10
        result = validate_with_primary_cli(out)
        assert result.returncode == 0, result.stderr
        assert "10 documents" in result.stdout
        assert "5 pairs" in result.stdout

    def test_token_and_score_counts_match(self, tmp_path):
        out = tmp_path / "scores.jsonl"
        score_with_lm(TEXTS, TINY_MODEL, out)
        lines = [json.loads(l) for l in out.read_text().splitlines()]
        assert len(lines) == 10
        for record in lines:
            assert len(record["tokens"]) == len(record["nll"])
            assert len(record["tokens"]) >= 2
            assert all(math.isfinite(v) for v in record["nll"])

    def test_values_match_pinned_reference(self, tmp_path):
        reference = json.loads(REFERENCE.read_text())
        out = tmp_path / "scores.jsonl"
        score_with_lm(TEXTS, TINY_MODEL, out)
        for line in out.read_text().splitlines():
            record = json.loads(line)
            pinned = reference[record["id"]]
            assert len(record["nll"]) == pinned["n_tokens"]
            for got, expected in zip(record["nll"], pinned["nll"]):
                assert abs(got - expected) < 1e-4

    def test_same_document_scored_twice_identical(self, tmp_path):
        first = tmp_path / "a.jsonl"
        second = tmp_path / "b.jsonl"
        score_with_lm(TEXTS, TINY_MODEL, first)
        score_with_lm(TEXTS, TINY_MODEL, second)
        assert first.read_bytes() == second.read_bytes()

    def test_metadata_passes_through(self, tmp_path):
        out = tmp_path / "scores.jsonl"
        score_with_lm(TEXTS, TINY_MODEL, out)
        records = {json.loads(l)["id"]: json.loads(l)
                   for l in out.read_text().splitlines()}
        assert records["q01.model"]["source"] == "model"
        assert records["q01.model"]["model_name"] == "toy-gen"
        assert records["q01.human"]["model_name"] == ""
        assert records["q01.human"]["pair_key"] == records["q01.model"]["pair_key"]

    def test_skip_prefix_drops_leading_tokens(self, tmp_path):
        full = tmp_path / "full.jsonl"
        skipped = tmp_path / "skipped.jsonl"
        score_with_lm(TEXTS, TINY_MODEL, full)
        score_with_lm(TEXTS, TINY_MODEL, skipped, skip_prefix=5)
        full_rec = json.loads(full.read_text().splitlines()[0])
        skip_rec = json.loads(skipped.read_text().splitlines()[0])
        assert skip_rec["tokens"] == full_rec["tokens"][5:]
        assert skip_rec["nll"] == full_rec["nll"][5:]
        assert validate_with_primary_cli(skipped).returncode == 0

    def test_first_token_scored_against_bos_only(self):
        estimator = Estimator.from_name(TINY_MODEL)
        tokens_a, nll_a, _ = estimator.score_text("The cat")
        tokens_b, nll_b, _ = estimator.score_text("The dog")
        # identical first token, identical context (BOS alone)
        assert tokens_a[0] == tokens_b[0]
        assert nll_a[0] == pytest.approx(nll_b[0], abs=1e-12)


class TestInputHandling:
    def test_load_texts(self):
        records = load_texts(TEXTS)
        assert len(records) == 10
        assert records[0].id == "q01.human"

    def test_empty_document_rejected(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text(json.dumps({"id": "x", "pair_key": "x",
                                   "source": "human", "model_name": "",
                                   "text": ""}) + "\n")
        with pytest.raises(ScorerError, match="empty"):
            load_texts(bad)

    def test_duplicate_id_rejected(self, tmp_path):
        record = json.dumps({"id": "x", "pair_key": "x", "source": "human",
                             "model_name": "", "text": "hello there"})
        bad = tmp_path / "dup.jsonl"
        bad.write_text(record + "\n" + record + "\n")
        with pytest.raises(ScorerError, match="duplicate"):
            load_texts(bad)

    def test_missing_field_rejected(self, tmp_path):
        bad = tmp_path / "missing.jsonl"
        bad.write_text(json.dumps({"id": "x", "text": "hello"}) + "\n")
        with pytest.raises(ScorerError, match="missing"):
            load_texts(bad)
