"""Diagnostic experiments: leading yes/no ablation, length effects, POS masking.

Each experiment transforms the documents of a paired corpus, re-normalizes,
re-transforms, and reports how much the group-mean spectra moved, measured
by spectral overlap between before and after.  All randomness is seeded per
document, so reports are bit-identical across reruns.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError
from .features import resample
from .ngram_lm import NgramModel, score_document
from .scores import PairedCorpus, ScoredDocument, truncate, zscore
from .spectrum import Spectrum, magnitude_spectrum, spectral_overlap

MODE_MEAN_REPLACE = "mean_replace"
MODE_SENTENCE_UNIFORM = "sentence_uniform_random"
_MASK_MODES = (MODE_MEAN_REPLACE, MODE_SENTENCE_UNIFORM)

_YESNO = ("yes", "no")
_SENTENCE_ENDERS = {".", "!", "?"}


@dataclass(frozen=True)
class MaskSpec:
    """Which POS tags to mask and how to replace their scores."""

    tags: frozenset[str]
    mode: str = MODE_MEAN_REPLACE
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tags", frozenset(self.tags))
        if not self.tags:
            raise ValidationError("mask tags must be non-empty")
        if self.mode not in _MASK_MODES:
            raise ValidationError(f"unknown mask mode {self.mode!r}")


@dataclass(frozen=True)
class AblationCondition:
    """One of: yes/no stripping, length truncation, or POS masking."""

    kind: str
    n: int | None = None
    mask: MaskSpec | None = None

    def __post_init__(self):
        if self.kind == "yesno":
            pass
        elif self.kind == "length":
            if self.n is None or self.n < 2:
                raise ValidationError("length condition needs n >= 2")
        elif self.kind == "pos_mask":
            if self.mask is None:
                raise ValidationError("pos_mask condition needs a MaskSpec")
        else:
            raise ValidationError(f"unknown ablation condition {self.kind!r}")

    def label(self) -> str:
        if self.kind == "length":
            return f"length:{self.n}"
        if self.kind == "pos_mask":
            tags = "+".join(sorted(self.mask.tags))
            return f"mask:{tags}:{self.mask.mode}"
        return self.kind


@dataclass(frozen=True)
class AblationReport:
    """Before/after group-mean spectra and their overlaps, plus counters."""

    condition: str
    spectra_before: dict[str, Spectrum]
    spectra_after: dict[str, Spectrum]
    overlap_human: float
    overlap_model: float
    counts: dict

    def to_dict(self) -> dict:
        def spec_dict(spec: Spectrum) -> dict:
            return {"doc_id": spec.doc_id, "freqs": list(spec.freqs),
                    "power": list(spec.power), "n_input": spec.n_input}
        return {
            "condition": self.condition,
            "spectra_before": {g: spec_dict(s) for g, s in self.spectra_before.items()},
            "spectra_after": {g: spec_dict(s) for g, s in self.spectra_after.items()},
            "overlap_human": self.overlap_human,
            "overlap_model": self.overlap_model,
            "counts": dict(self.counts),
        }


def strip_leading_yesno(doc: ScoredDocument,
                        prompt_len: int = 0) -> tuple[ScoredDocument, bool]:
    """Drop a leading "yes"/"no" (case-insensitive) plus a following comma.

    Stripping repeats while the answer still opens with the pattern, which
    makes the operation idempotent.  ``prompt_len`` shifts the answer start
    past a shared prompt region.  Scores and annotations at the dropped
    positions are removed; callers re-score or re-normalize downstream.
    """
    if prompt_len < 0 or prompt_len >= doc.n_tokens:
        raise ValidationError(f"prompt_len {prompt_len} out of range")
    tokens = list(doc.tokens)
    nll = list(doc.nll)
    annotations = list(doc.annotations) if doc.annotations is not None else None

    stripped = False
    position = prompt_len
    while position < len(tokens) and tokens[position].lower() in _YESNO:
        drop = 1
        if position + 1 < len(tokens) and tokens[position + 1] == ",":
            drop = 2
        del tokens[position : position + drop]
        del nll[position : position + drop]
        if annotations is not None:
            del annotations[position : position + drop]
        stripped = True
    if not stripped:
        return doc, False
    if len(tokens) < 2:
        raise ValidationError(
            f"document {doc.id!r}: stripping the yes/no prefix leaves fewer "
            "than 2 tokens"
        )
    return (
        replace(doc, tokens=tuple(tokens), nll=tuple(nll),
                annotations=tuple(annotations) if annotations is not None else None),
        True,
    )


def count_yesno(docs) -> dict[tuple[str, str], tuple[int, int, int]]:
    """Per (source, model_name) group: how many docs open with yes / no."""
    counts: dict[tuple[str, str], list[int]] = {}
    for doc in docs:
        key = (doc.source, doc.model_name)
        entry = counts.setdefault(key, [0, 0, 0])
        first = doc.tokens[0].lower()
        if first == "yes":
            entry[0] += 1
        elif first == "no":
            entry[1] += 1
        entry[2] += 1
    return {key: tuple(entry) for key, entry in counts.items()}


def _sentence_spans(tokens) -> list[tuple[int, int]]:
    """Half-open token spans; a sentence ends after '.', '!' or '?'."""
    spans = []
    start = 0
    for i, token in enumerate(tokens):
        if token in _SENTENCE_ENDERS:
            spans.append((start, i + 1))
            start = i + 1
    if start < len(tokens):
        spans.append((start, len(tokens)))
    return spans


def _doc_rng(seed: int, doc_id: str) -> np.random.Generator:
    # independent, reproducible stream per document
    return np.random.default_rng([seed, zlib.crc32(doc_id.encode("utf-8"))])


def mask_scores(doc: ScoredDocument, spec: MaskSpec) -> ScoredDocument:
    """Overwrite the scores of tokens whose POS tag is in ``spec.tags``.

    ``mean_replace`` sets each masked score to the mean of the masked
    positions' original scores, which leaves the document mean unchanged.
    ``sentence_uniform_random`` draws uniformly between the min and max of
    the original scores within the same sentence (document-level bounds for
    single-token sentences); draws are seeded per document.
    Token identities, sequence length, and unmasked scores never change.
    """
    if doc.annotations is None:
        raise ValidationError(f"document {doc.id!r} has no POS annotations")
    masked = [i for i, tag in enumerate(doc.annotations) if tag in spec.tags]
    if not masked:
        return doc
    original = doc.nll_array()
    new_nll = original.copy()
    if spec.mode == MODE_MEAN_REPLACE:
        new_nll[masked] = original[masked].mean()
    else:
        spans = _sentence_spans(doc.tokens)
        span_of = {}
        for span in spans:
            for i in range(span[0], span[1]):
                span_of[i] = span
        doc_lo, doc_hi = float(original.min()), float(original.max())
        rng = _doc_rng(spec.seed, doc.id)
        for i in masked:
            start, end = span_of[i]
            if end - start <= 1:
                lo, hi = doc_lo, doc_hi
            else:
                window = original[start:end]
                lo, hi = float(window.min()), float(window.max())
            new_nll[i] = rng.uniform(lo, hi)
    return replace(doc, nll=tuple(new_nll))


def _group_mean_spectrum(docs, grid_size: int, group: str) -> Spectrum:
    if not docs:
        raise ValidationError(f"group {group!r} is empty")
    vectors = [resample(magnitude_spectrum(zscore(doc)), grid_size) for doc in docs]
    mean = np.mean([v.array() for v in vectors], axis=0)
    grid = vectors[0]
    return Spectrum(
        doc_id=f"mean:{group}",
        freqs=tuple(np.arange(1, grid_size + 1) / (2.0 * grid_size)),
        power=tuple(mean),
        n_input=2 * grid_size,
    )


def run_ablation(corpus: PairedCorpus, condition: AblationCondition,
                 estimator: NgramModel | None = None,
                 grid_size: int = 128) -> AblationReport:
    """Apply a condition to every document and measure the spectral movement.

    ``estimator`` of ``None`` reuses the stored scores (dropping entries for
    removed tokens, then re-normalizing); passing a bigram model re-scores
    the transformed tokens from scratch, which is exact.  Group-mean spectra
    are compared on a shared ``grid_size`` grid via spectral overlap.
    """
    if not corpus.docs:
        raise ValidationError("corpus has no documents")

    def base(doc: ScoredDocument) -> ScoredDocument:
        return doc if estimator is None else score_document(estimator, doc)

    counts: dict = {"n_docs": len(corpus.docs), "condition": condition.label(),
                    "estimator": "reuse_scores" if estimator is None else "ngram"}

    before = [base(doc) for doc in corpus.docs]
    after: list[ScoredDocument] = []
    if condition.kind == "yesno":
        n_stripped = 0
        for doc in corpus.docs:
            stripped_doc, flag = strip_leading_yesno(doc)
            n_stripped += int(flag)
            after.append(base(stripped_doc))
        counts["stripped"] = n_stripped
        yesno = count_yesno(corpus.docs)
        counts["yesno_counts"] = {
            f"{source}:{model}": {"yes": yes, "no": no, "total": total}
            for (source, model), (yes, no, total) in sorted(yesno.items())
        }
    elif condition.kind == "length":
        after = [base(truncate(doc, condition.n)) for doc in corpus.docs]
        counts["length"] = condition.n
    else:
        n_masked = 0
        for doc in corpus.docs:
            scored = base(doc)
            masked_doc = mask_scores(scored, condition.mask)
            n_masked += sum(
                1 for tag in doc.annotations or () if tag in condition.mask.tags
            )
            after.append(masked_doc)
        counts["masked_positions"] = n_masked
        counts["mask_tags"] = sorted(condition.mask.tags)
        counts["mask_mode"] = condition.mask.mode
        counts["seed"] = condition.mask.seed

    groups = {"human": [], "model": []}
    groups_after = {"human": [], "model": []}
    for doc_before, doc_after in zip(before, after):
        groups[doc_before.source].append(doc_before)
        groups_after[doc_after.source].append(doc_after)

    spectra_before = {g: _group_mean_spectrum(docs, grid_size, f"{g}:before")
                      for g, docs in groups.items() if docs}
    spectra_after = {g: _group_mean_spectrum(docs, grid_size, f"{g}:after")
                     for g, docs in groups_after.items() if docs}
    overlaps = {}
    for g in spectra_before:
        overlaps[g] = spectral_overlap(spectra_before[g], spectra_after[g])
    return AblationReport(
        condition=condition.label(),
        spectra_before=spectra_before,
        spectra_after=spectra_after,
        overlap_human=overlaps.get("human", float("nan")),
        overlap_model=overlaps.get("model", float("nan")),
        counts=counts,
    )
