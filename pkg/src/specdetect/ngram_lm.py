"""Word-level bigram language model with add-k smoothing.

Serves as a cheap, self-contained likelihood estimator: training counts
bigrams over a plain-text corpus (one sentence per line) and scoring emits
one NLL (nats) per token.  Tokenization is deterministic so token positions
are reproducible: lowercase, split on whitespace, then peel leading and
trailing punctuation characters off as their own tokens.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError
from .scores import ScoredDocument

UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"

TOKENIZER_VERSION = "ws-punct-lower-v1"
MODEL_FORMAT = "specdetect-ngram"
MODEL_VERSION = 1

_PUNCT = set(string.punctuation)


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, split off edge punctuation.

    "Hello, world!" -> ["hello", ",", "world", "!"]
    """
    tokens: list[str] = []
    for chunk in text.lower().split():
        head: list[str] = []
        tail: list[str] = []
        start, end = 0, len(chunk)
        while start < end and chunk[start] in _PUNCT:
            head.append(chunk[start])
            start += 1
        while end > start and chunk[end - 1] in _PUNCT:
            tail.append(chunk[end - 1])
            end -= 1
        tokens.extend(head)
        if end > start:
            tokens.append(chunk[start:end])
        tokens.extend(reversed(tail))
    return tokens


@dataclass(frozen=True)
class NgramModel:
    """Smoothed bigram counts supporting NLL scoring of token sequences.

    ``unigram_counts`` are occurrence counts including the sentence boundary
    symbols; ``context_totals`` (outgoing bigram mass per context) equal the
    unigram counts for every token except sentence-final ``</s>``, and are
    the denominator that makes per-context probabilities sum to one.
    """

    vocab: frozenset[str]
    unigram_counts: dict[str, int]
    bigram_counts: dict[tuple[str, str], int]
    total_tokens: int
    smoothing_k: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.smoothing_k > 0:
            raise ValidationError(
                f"smoothing_k must be positive, got {self.smoothing_k}"
            )
        for symbol in (UNK, BOS, EOS):
            if symbol not in self.vocab:
                raise ValidationError(f"vocab is missing reserved symbol {symbol!r}")
        if sum(self.unigram_counts.values()) != self.total_tokens:
            raise ValidationError("unigram counts do not sum to total_tokens")
        for v, w in self.bigram_counts:
            if v not in self.vocab or w not in self.vocab:
                raise ValidationError(f"bigram ({v!r}, {w!r}) outside vocab")
        context_totals: dict[str, int] = {}
        for (v, _), count in self.bigram_counts.items():
            context_totals[v] = context_totals.get(v, 0) + count
        object.__setattr__(self, "_context_totals", context_totals)

    def context_total(self, context: str) -> int:
        return self._context_totals.get(context, 0)

    def prob(self, word: str, context: str) -> float:
        """Add-k probability P(word | context); both must be in-vocab."""
        k = self.smoothing_k
        numer = self.bigram_counts.get((context, word), 0) + k
        denom = self.context_total(context) + k * len(self.vocab)
        return numer / denom

    def lookup(self, token: str) -> str:
        """Map a raw token onto the vocab (lowercased, OOV -> <unk>)."""
        token = token.lower()
        return token if token in self.vocab else UNK


def train_ngram(corpus, min_count: int = 1, smoothing_k: float = 0.1,
                meta: dict | None = None) -> NgramModel:
    """Count bigrams over a plain-text corpus, one sentence per line.

    Words occurring fewer than ``min_count`` times are merged into ``<unk>``.
    Each line is wrapped in ``<s> ... </s>``.
    """
    with open(corpus, "r", encoding="utf-8") as handle:
        lines = handle.readlines()
    sentences = [tokenize(line) for line in lines]
    sentences = [s for s in sentences if s]
    if not sentences:
        raise ValidationError(f"corpus {corpus!r} is empty after tokenization")

    raw_counts: dict[str, int] = {}
    for sentence in sentences:
        for word in sentence:
            raw_counts[word] = raw_counts.get(word, 0) + 1
    kept = {w for w, c in raw_counts.items() if c >= min_count}
    vocab = frozenset(kept | {UNK, BOS, EOS})

    unigram_counts: dict[str, int] = {}
    bigram_counts: dict[tuple[str, str], int] = {}
    for sentence in sentences:
        mapped = [BOS] + [w if w in kept else UNK for w in sentence] + [EOS]
        for word in mapped:
            unigram_counts[word] = unigram_counts.get(word, 0) + 1
        for v, w in zip(mapped, mapped[1:]):
            bigram_counts[(v, w)] = bigram_counts.get((v, w), 0) + 1

    model_meta = {
        "corpus": str(corpus),
        "min_count": int(min_count),
        "n_sentences": len(sentences),
        "tokenizer": TOKENIZER_VERSION,
    }
    if meta:
        model_meta.update(meta)
    return NgramModel(
        vocab=vocab,
        unigram_counts=unigram_counts,
        bigram_counts=bigram_counts,
        total_tokens=sum(unigram_counts.values()),
        smoothing_k=float(smoothing_k),
        meta=model_meta,
    )


def score_tokens(model: NgramModel, tokens) -> list[float]:
    """NLL (nats) per token under the bigram model.

    The first token is conditioned on ``<s>``; OOV tokens are scored as
    ``<unk>``.  Smoothing keeps every value finite.
    """
    tokens = list(tokens)
    if not tokens:
        raise ValidationError("cannot score an empty token sequence")
    nll: list[float] = []
    context = BOS
    for token in tokens:
        word = model.lookup(token)
        nll.append(float(-np.log(model.prob(word, context))))
        context = word
    return nll


def score_document(model: NgramModel, doc: ScoredDocument) -> ScoredDocument:
    """Replace a document's scores with bigram NLLs for the same tokens."""
    return replace(doc, nll=tuple(score_tokens(model, doc.tokens)))


def save_model(model: NgramModel, path) -> None:
    """Persist the model as versioned JSON (counts, vocab, k, tokenizer)."""
    nested: dict[str, dict[str, int]] = {}
    for (v, w), count in model.bigram_counts.items():
        nested.setdefault(v, {})[w] = count
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "smoothing_k": model.smoothing_k,
        "vocab": sorted(model.vocab),
        "unigram_counts": model.unigram_counts,
        "bigram_counts": nested,
        "total_tokens": model.total_tokens,
        "meta": model.meta,
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False, sort_keys=True)
        handle.write("\n")


def load_model(path) -> NgramModel:
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    if payload.get("format") != MODEL_FORMAT:
        raise ValidationError(f"{path}: not a {MODEL_FORMAT} file")
    if payload.get("version") != MODEL_VERSION:
        raise ValidationError(
            f"{path}: unsupported model version {payload.get('version')}"
        )
    bigram_counts = {
        (v, w): count
        for v, inner in payload["bigram_counts"].items()
        for w, count in inner.items()
    }
    return NgramModel(
        vocab=frozenset(payload["vocab"]),
        unigram_counts=dict(payload["unigram_counts"]),
        bigram_counts=bigram_counts,
        total_tokens=int(payload["total_tokens"]),
        smoothing_k=float(payload["smoothing_k"]),
        meta=dict(payload.get("meta", {})),
    )
