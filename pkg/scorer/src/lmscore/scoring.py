"""Per-token NLL scoring with causal language models.

Emits the JSONL score-file contract consumed by the detection library: one
object per line with id, pair_key, source, model_name, tokens, nll (nats),
and optionally annotations.  The first token is scored against the model's
begin-of-sequence marker alone, so token and score counts always match.
Inference is deterministic: eval mode, no grad, float32, CPU or the default
device, no sampling anywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import torch

from .chartok import CharTokenizer, is_char_model


@dataclass(frozen=True)
class TextRecord:
    """One input document: metadata plus raw text."""

    id: str
    pair_key: str
    source: str
    model_name: str
    text: str


class ScorerError(Exception):
    pass


def load_texts(path) -> list[TextRecord]:
    records = []
    seen = set()
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ScorerError(f"{path}:{line_number}: invalid JSON ({exc.msg})")
            missing = [k for k in ("id", "pair_key", "source", "model_name", "text")
                       if k not in raw]
            if missing:
                raise ScorerError(f"{path}:{line_number}: missing fields {missing}")
            if not raw["text"]:
                raise ScorerError(f"{path}:{line_number}: empty document")
            if raw["id"] in seen:
                raise ScorerError(f"{path}:{line_number}: duplicate id {raw['id']!r}")
            seen.add(raw["id"])
            records.append(TextRecord(
                id=raw["id"], pair_key=raw["pair_key"], source=raw["source"],
                model_name=raw["model_name"], text=raw["text"]))
    return records


class Estimator:
    """A causal LM plus its tokenizer, wrapped for per-token scoring."""

    def __init__(self, model, tokenize, bos_id: int, name: str):
        self.model = model.eval()
        self._tokenize = tokenize
        self.bos_id = bos_id
        self.name = name

    @classmethod
    def from_name(cls, model_name: str) -> "Estimator":
        """Load an estimator by hub name or local path.

        A directory containing ``char_vocab.json`` is treated as a bundled
        character-level model; anything else goes through transformers'
        Auto classes (fast tokenizer required, for character offsets).
        """
        if is_char_model(model_name):
            from transformers import GPT2LMHeadModel

            tokenizer = CharTokenizer.load(model_name)
            model = GPT2LMHeadModel.from_pretrained(model_name)
            return cls(model, tokenizer.encode, tokenizer.bos_id,
                       name=str(model_name))

        from transformers import AutoModelForCausalLM, AutoTokenizer

        tokenizer = AutoTokenizer.from_pretrained(model_name)
        model = AutoModelForCausalLM.from_pretrained(model_name)
        bos_id = tokenizer.bos_token_id
        if bos_id is None:
            bos_id = tokenizer.eos_token_id
        if bos_id is None:
            raise ScorerError(
                f"{model_name}: tokenizer has neither BOS nor EOS token")

        def tokenize(text: str):
            enc = tokenizer(text, return_offsets_mapping=True,
                            add_special_tokens=False)
            ids = enc["input_ids"]
            offsets = [tuple(span) for span in enc["offset_mapping"]]
            tokens = [text[a:b] for a, b in offsets]
            return tokens, ids, offsets

        return cls(model, tokenize, int(bos_id), name=model_name)

    def score_text(self, text: str):
        """Tokens, per-token NLL in nats, and character offsets."""
        tokens, ids, offsets = self._tokenize(text)
        if not ids:
            raise ScorerError("document tokenized to nothing")
        input_ids = torch.tensor([[self.bos_id] + list(ids)], dtype=torch.long)
        with torch.no_grad():
            logits = self.model(input_ids).logits[0]
        log_probs = torch.log_softmax(logits.float(), dim=-1)
        targets = input_ids[0, 1:]
        nll = -log_probs[torch.arange(len(ids)), targets]
        values = [float(v) for v in nll]
        if not all(v == v and abs(v) != float("inf") for v in values):
            raise ScorerError("model emitted a non-finite score")
        return tokens, values, offsets


def score_with_lm(texts_path, model_name: str, out_path,
                  skip_prefix: int = 0) -> int:
    """Score every document in a text JSONL; returns the document count.

    ``skip_prefix`` drops the first n scored tokens from each emitted
    document, for corpora whose pairs share a prompt prefix that should not
    enter downstream normalization.
    """
    if skip_prefix < 0:
        raise ScorerError("skip_prefix must be >= 0")
    records = load_texts(texts_path)
    estimator = Estimator.from_name(model_name)
    with open(out_path, "w", encoding="utf-8") as handle:
        for record in records:
            tokens, nll, _ = estimator.score_text(record.text)
            if skip_prefix:
                tokens = tokens[skip_prefix:]
                nll = nll[skip_prefix:]
            if len(tokens) < 2:
                raise ScorerError(
                    f"document {record.id!r}: fewer than 2 tokens after "
                    f"skip_prefix={skip_prefix}")
            payload = {
                "id": record.id,
                "pair_key": record.pair_key,
                "source": record.source,
                "model_name": record.model_name,
                "tokens": tokens,
                "nll": nll,
            }
            handle.write(json.dumps(payload, ensure_ascii=False))
            handle.write("\n")
    return len(records)
