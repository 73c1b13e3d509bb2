"""Transformer-based per-token NLL scoring and POS tag export.

Bridges raw text to the detection library's JSONL score contract.
"""

__version__ = "0.1.0"

from .chartok import CharTokenizer
from .postag import align_tags, tag_scores_file, tag_text, tag_word
from .scoring import Estimator, ScorerError, TextRecord, load_texts, score_with_lm
