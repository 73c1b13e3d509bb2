"""Regenerate the scorer test fixtures.

Builds the tiny seeded character-level model, the 10-document text fixture,
and the pinned reference scores.  Deterministic: rerunning reproduces the
same files (the reference run is pinned to 1e-4, well above any BLAS-level
jitter between machines).

    python3 scorer/tests/fixtures/make_fixtures.py
"""
import json
import string
from pathlib import Path

import torch
from transformers import GPT2Config, GPT2LMHeadModel

HERE = Path(__file__).resolve().parent

CHARSET = string.ascii_letters + string.digits + string.punctuation + " "

TEXTS = [
    ("q01.human", "q01", "human", "",
     "The measured effect was small but consistent across all seven trials."),
    ("q01.model", "q01", "model", "toy-gen",
     "Yes, the effect is clearly present and statistically significant."),
    ("q02.human", "q02", "human", "",
     "Results varied considerably; more data would be needed to be sure."),
    ("q02.model", "q02", "model", "toy-gen",
     "No, the hypothesis is not supported by the available evidence."),
    ("q03.human", "q03", "human", "",
     "Cats run quickly when startled, though ours mostly sleeps all day."),
    ("q03.model", "q03", "model", "toy-gen",
     "Yes, cats run. They are agile animals with fast reflexes."),
    ("q04.human", "q04", "human", "",
     "We could not reproduce the finding with the original instrument."),
    ("q04.model", "q04", "model", "toy-gen",
     "The finding reproduces reliably under the documented conditions."),
    ("q05.human", "q05", "human", "",
     "Honestly, the answer depends on definitions nobody agrees about."),
    ("q05.model", "q05", "model", "toy-gen",
     "No. The definitions are standard and the answer is unambiguous."),
]


def main():
    model_dir = HERE / "tiny-model"
    model_dir.mkdir(exist_ok=True)

    config = GPT2Config(
        vocab_size=len(CHARSET) + 2,  # + BOS and UNK
        n_positions=256,
        n_embd=32,
        n_layer=2,
        n_head=2,
        bos_token_id=0,
        eos_token_id=0,
    )
    torch.manual_seed(20240901)
    model = GPT2LMHeadModel(config)
    model.save_pretrained(model_dir)
    (model_dir / "char_vocab.json").write_text(
        json.dumps({"charset": CHARSET}), encoding="utf-8")
    print(f"wrote tiny model ({sum(p.numel() for p in model.parameters())} "
          f"params) -> {model_dir}")

    texts_path = HERE / "texts10.jsonl"
    with open(texts_path, "w", encoding="utf-8") as handle:
        for doc_id, pair_key, source, model_name, text in TEXTS:
            handle.write(json.dumps({
                "id": doc_id, "pair_key": pair_key, "source": source,
                "model_name": model_name, "text": text}, ensure_ascii=False))
            handle.write("\n")
    print(f"wrote {len(TEXTS)} documents -> {texts_path}")

    # reference run: pin the scores the bundled model produces today
    import sys
    sys.path.insert(0, str(HERE.parent.parent / "src"))
    from lmscore.scoring import Estimator

    estimator = Estimator.from_name(model_dir)
    reference = {}
    for doc_id, _, _, _, text in TEXTS:
        tokens, nll, _ = estimator.score_text(text)
        reference[doc_id] = {"n_tokens": len(tokens), "nll": nll}
    reference_path = HERE / "reference_scores.json"
    reference_path.write_text(json.dumps(reference, indent=1), encoding="utf-8")
    print(f"wrote pinned reference -> {reference_path}")


if __name__ == "__main__":
    main()
