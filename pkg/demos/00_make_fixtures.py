"""
Regenerate the bundled fixtures under data/
===========================================

Everything in data/ is derived from seeded generators, so this script
reproduces the shipped files byte for byte.  Run from the repo root:

    python3 demos/00_make_fixtures.py
"""
from pathlib import Path

from specdetect import save_scores, synthetic_pair_corpus

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
DATA.mkdir(exist_ok=True)

# A 20-pair corpus whose "model" members carry 50% extra spectrum power in
# the 3 lowest frequency bins.  The pairwise heuristic separates it
# perfectly, which makes it a good smoke fixture for the full pipeline.
docs = synthetic_pair_corpus(
    n_pairs=20, n_tokens=128, boost=0.5, n_boost_bins=3, seed=20240901,
    model_name="synthetic-lm",
)
save_scores(docs, DATA / "synthetic_pairs.jsonl")
print(f"wrote {len(docs)} documents -> {DATA / 'synthetic_pairs.jsonl'}")

# One run config consuming that fixture end to end.
RUN_CONFIG = """\
# Full-pipeline run over the bundled synthetic fixture.
dataset: synthetic-demo
input:
  scores: synthetic_pairs.jsonl
estimator: reuse
features:
  grid_size: 64
  mode: plain
supervised:
  enabled: true
  folds: 5
  seed: 42
  grid: small
pairwise:
  enabled: true
  k_max: 10
  epsilon: 0.0
  holdout: true
  seed: 7
"""
(DATA / "run_synthetic.yaml").write_text(RUN_CONFIG, encoding="utf-8")
print(f"wrote {DATA / 'run_synthetic.yaml'}")

# A small plain-text corpus (one sentence per line) for bigram demos.
CORPUS = """\
the spectrum of a signal tells a story that the raw samples hide
a language model assigns a probability to every word it reads
surprising words cost more bits than familiar words
human writers spread information at an uneven and personal rhythm
generated text often paces its information with unusual regularity
a bigram model only remembers the single word that came before
counting word pairs in a corpus is enough to estimate likelihood
the cat sat on the mat and the dog sat on the log
every sentence in this file trains the toy bigram estimator
short texts make detection hard because statistics get noisy
frequency analysis turns a sequence of scores into a fingerprint
low frequencies describe slow drifts across a whole document
high frequencies capture word to word jitter in the scores
normalizing scores removes the scale that the estimator imposes
comparing paired texts removes the topic and keeps the style
"""
(DATA / "tiny_corpus.txt").write_text(CORPUS, encoding="utf-8")
print(f"wrote {DATA / 'tiny_corpus.txt'}")
