"""Per-token likelihood sequences: data model, JSONL I/O, and normalization.

A :class:`ScoredDocument` holds a token sequence together with one negative
log probability (nats) per token, as produced by whatever estimator model
scored the text.  Documents from the same prompt share a ``pair_key`` so a
human text and its model counterpart can be matched up.  All types here are
immutable; every operation returns a new object.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConflictError, DegenerateInputError, ParseError, ValidationError

SOURCE_HUMAN = "human"
SOURCE_MODEL = "model"
_SOURCES = (SOURCE_HUMAN, SOURCE_MODEL)

_TRUNC_SUFFIX = re.compile(r"\.trunc(\d+)$")


@dataclass(frozen=True)
class ScoredDocument:
    """A token sequence with aligned per-token NLL scores.

    ``nll`` values are negative log probabilities in nats.  They are not
    required to be positive (estimators may emit arbitrary finite reals),
    only finite.  ``annotations``, when present, holds one POS tag per token.
    """

    id: str
    pair_key: str
    source: str
    model_name: str
    tokens: tuple[str, ...]
    nll: tuple[float, ...]
    annotations: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(str(t) for t in self.tokens))
        object.__setattr__(self, "nll", tuple(float(v) for v in self.nll))
        if self.annotations is not None:
            object.__setattr__(
                self, "annotations", tuple(str(a) for a in self.annotations)
            )
        if not self.id:
            raise ValidationError("document id must be non-empty")
        if self.source not in _SOURCES:
            raise ValidationError(
                f"document {self.id!r}: source must be one of {_SOURCES}, "
                f"got {self.source!r}"
            )
        n = len(self.tokens)
        if n < 2:
            raise ValidationError(
                f"document {self.id!r}: needs at least 2 tokens, got {n}"
            )
        if len(self.nll) != n:
            raise ValidationError(
                f"document {self.id!r}: {n} tokens but {len(self.nll)} scores"
            )
        if self.annotations is not None and len(self.annotations) != n:
            raise ValidationError(
                f"document {self.id!r}: {n} tokens but "
                f"{len(self.annotations)} annotations"
            )
        if not all(math.isfinite(v) for v in self.nll):
            raise ValidationError(f"document {self.id!r}: non-finite score")

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)

    def nll_array(self) -> np.ndarray:
        return np.asarray(self.nll, dtype=float)


@dataclass(frozen=True)
class NormalizedSeries:
    """Z-scored likelihood sequence of one document (mean 0, sample std 1)."""

    doc_id: str
    values: tuple[float, ...]
    mu: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.sigma > 0:
            raise ValidationError(
                f"series {self.doc_id!r}: sigma must be positive, got {self.sigma}"
            )
        arr = np.asarray(self.values)
        if abs(arr.mean()) > 1e-9:
            raise ValidationError(f"series {self.doc_id!r}: mean not 0")
        if abs(arr.std(ddof=1) - 1.0) > 1e-9:
            raise ValidationError(f"series {self.doc_id!r}: sample std not 1")

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class PairedCorpus:
    """Documents plus the (human_id, model_id) pairs recovered from them.

    ``incomplete`` lists pair keys that did not yield a full human/model
    pair; they are reported rather than silently dropped.
    """

    docs: tuple[ScoredDocument, ...]
    pairs: tuple[tuple[str, str], ...]
    incomplete: tuple[str, ...] = ()

    def doc_by_id(self, doc_id: str) -> ScoredDocument:
        for doc in self.docs:
            if doc.id == doc_id:
                return doc
        raise KeyError(doc_id)


# --- JSONL I/O -------------------------------------------------------------

_FIELD_ORDER = ("id", "pair_key", "source", "model_name", "tokens", "nll", "annotations")


def _doc_to_record(doc: ScoredDocument) -> dict:
    record = {
        "id": doc.id,
        "pair_key": doc.pair_key,
        "source": doc.source,
        "model_name": doc.model_name,
        "tokens": list(doc.tokens),
        "nll": list(doc.nll),
    }
    if doc.annotations is not None:
        record["annotations"] = list(doc.annotations)
    return record


def _doc_from_record(record: dict, line_number: int) -> ScoredDocument:
    if not isinstance(record, dict):
        raise ParseError("record is not a JSON object", line_number)
    missing = [k for k in ("id", "pair_key", "source", "model_name", "tokens", "nll")
               if k not in record]
    if missing:
        raise ParseError(f"missing fields {missing}", line_number)
    extra = [k for k in record if k not in _FIELD_ORDER]
    if extra:
        raise ParseError(f"unknown fields {extra}", line_number)
    try:
        return ScoredDocument(
            id=record["id"],
            pair_key=record["pair_key"],
            source=record["source"],
            model_name=record["model_name"],
            tokens=record["tokens"],
            nll=record["nll"],
            annotations=record.get("annotations"),
        )
    except ValidationError as exc:
        raise ParseError(str(exc), line_number) from exc


def load_scores(path, format: str = "jsonl") -> list[ScoredDocument]:
    """Read ScoredDocuments from a JSONL score file.

    Documents come back in file order.  Raises :class:`ParseError` (with the
    line number) on malformed lines and :class:`ValidationError` on duplicate
    ids.
    """
    if format != "jsonl":
        raise ValidationError(f"unsupported score format {format!r}")
    docs: list[ScoredDocument] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line_number) from exc
            doc = _doc_from_record(record, line_number)
            if doc.id in seen:
                raise ValidationError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)
            docs.append(doc)
    return docs


def save_scores(docs, path, format: str = "jsonl") -> None:
    """Write documents as JSONL, one object per line, full float precision.

    ``save_scores`` and :func:`load_scores` round-trip bit-identically:
    floats are serialized with Python's shortest round-trip repr.
    """
    if format != "jsonl":
        raise ValidationError(f"unsupported score format {format!r}")
    with open(path, "w", encoding="utf-8") as handle:
        for doc in docs:
            handle.write(json.dumps(_doc_to_record(doc), ensure_ascii=False))
            handle.write("\n")


# --- operations ------------------------------------------------------------


def zscore(doc: ScoredDocument) -> NormalizedSeries:
    """Standardize a document's scores to mean 0 and sample std 1.

    Uses the sample standard deviation (denominator N-1).  Raises
    :class:`DegenerateInputError` for constant sequences.
    """
    x = doc.nll_array()
    if x.size < 2:
        raise ValidationError(f"document {doc.id!r}: too short to normalize")
    mu = float(x.mean())
    sigma = float(x.std(ddof=1))
    if sigma == 0.0:
        raise DegenerateInputError(
            f"document {doc.id!r}: constant score sequence (sigma = 0)"
        )
    values = (x - mu) / sigma
    return NormalizedSeries(doc_id=doc.id, values=tuple(values), mu=mu, sigma=sigma)


def build_pairs(docs) -> PairedCorpus:
    """Group documents into human/model pairs by their ``pair_key``.

    Keys with exactly one human and one model document become pairs; keys
    missing one side are listed in ``incomplete``.  Two documents with the
    same source under one key raise :class:`ConflictError`.
    """
    docs = tuple(docs)
    seen_ids: set[str] = set()
    for doc in docs:
        if doc.id in seen_ids:
            raise ValidationError(f"duplicate document id {doc.id!r}")
        seen_ids.add(doc.id)

    by_key: dict[str, dict[str, ScoredDocument]] = {}
    key_order: list[str] = []
    for doc in docs:
        group = by_key.setdefault(doc.pair_key, {})
        if doc.pair_key not in key_order:
            key_order.append(doc.pair_key)
        if doc.source in group:
            raise ConflictError(
                f"pair key {doc.pair_key!r}: two {doc.source} documents "
                f"({group[doc.source].id!r} and {doc.id!r})"
            )
        group[doc.source] = doc

    pairs: list[tuple[str, str]] = []
    incomplete: list[str] = []
    for key in key_order:
        group = by_key[key]
        if SOURCE_HUMAN in group and SOURCE_MODEL in group:
            pairs.append((group[SOURCE_HUMAN].id, group[SOURCE_MODEL].id))
        else:
            incomplete.append(key)
    return PairedCorpus(docs=docs, pairs=tuple(pairs), incomplete=tuple(incomplete))


def truncate(doc: ScoredDocument, n: int) -> ScoredDocument:
    """Keep only the first ``min(n, N)`` tokens (no padding).

    The id gets a ``.trunc<n>`` suffix.  Repeated truncations collapse:
    an existing suffix is replaced and the effective length recorded, so
    ``truncate(truncate(d, m), n) == truncate(d, min(m, n))`` holds exactly.
    """
    n = int(n)
    if n < 2:
        raise ValidationError(f"truncation length must be >= 2, got {n}")
    match = _TRUNC_SUFFIX.search(doc.id)
    if match:
        base_id = doc.id[: match.start()]
        n = min(n, int(match.group(1)))
    else:
        base_id = doc.id
    effective = min(n, doc.n_tokens)
    annotations = doc.annotations[:effective] if doc.annotations is not None else None
    return replace(
        doc,
        id=f"{base_id}.trunc{n}",
        tokens=doc.tokens[:effective],
        nll=doc.nll[:effective],
        annotations=annotations,
    )
