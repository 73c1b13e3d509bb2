"""
Ablations: what moves a likelihood spectrum?
============================================

Three diagnostic transforms, each followed by re-normalization and a fresh
transform.  Spectral overlap (1.0 = unchanged) between the group-mean
spectrum before and after quantifies how much each group moved.
"""
from specdetect import (
    AblationCondition,
    MaskSpec,
    ScoredDocument,
    build_pairs,
    count_yesno,
    load_scores,
    run_ablation,
    strip_leading_yesno,
)

# --- 1. Leading "Yes"/"No" answers ------------------------------------------
# Model answers often open with a fixed verdict token; humans rarely do.
doc = ScoredDocument(
    id="demo", pair_key="demo", source="model", model_name="toy",
    tokens=("Yes", ",", "the", "effect", "is", "real"),
    nll=(0.4, 0.6, 2.1, 3.5, 1.2, 2.8),
)
stripped, flag = strip_leading_yesno(doc)
print(f"stripped={flag}: {doc.tokens} -> {stripped.tokens}")

# --- 2. On the bundled corpus -----------------------------------------------
docs = load_scores("data/synthetic_pairs.jsonl")
corpus = build_pairs(docs)
print(f"\nyes/no openers per group: "
      f"{ {f'{s}:{m}' or s: c for (s, m), c in count_yesno(docs).items()} }")

length = run_ablation(corpus, AblationCondition(kind="length", n=64),
                      grid_size=32)
print(f"\ntruncation to 64 tokens:"
      f" overlap human={length.overlap_human:.4f}"
      f" model={length.overlap_model:.4f}")

# --- 3. POS masking -----------------------------------------------------------
# Replace the scores of selected POS tags with the masked positions' mean
# (leaves the document mean untouched), or with sentence-bounded uniform
# draws when mimicking estimators that cannot mask attention.
for mode in ("mean_replace", "sentence_uniform_random"):
    mask = MaskSpec(tags={"NOUN", "VERB", "ADJ"}, mode=mode, seed=11)
    outcome = run_ablation(corpus, AblationCondition(kind="pos_mask", mask=mask),
                           grid_size=32)
    print(f"mask NVA ({mode}): overlap human={outcome.overlap_human:.4f} "
          f"model={outcome.overlap_model:.4f} "
          f"({outcome.counts['masked_positions']} positions)")

# A mask that matches nothing is the identity: overlap exactly 1.
identity = run_ablation(
    corpus, AblationCondition(kind="pos_mask", mask=MaskSpec(tags={"NOSUCH"})),
    grid_size=32)
print(f"identity mask: overlap human={identity.overlap_human} "
      f"model={identity.overlap_model}")
