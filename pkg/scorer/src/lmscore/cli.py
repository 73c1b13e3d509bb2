"""Command line entry points: ``score-lm`` and ``tag-pos``."""

from __future__ import annotations

import argparse
import sys

from .postag import tag_scores_file
from .scoring import ScorerError, score_with_lm


def score_lm_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="score-lm",
        description="Per-token NLL scoring of raw texts with a causal LM")
    parser.add_argument("--model", required=True,
                        help="hub name, local model path, or bundled char-model dir")
    parser.add_argument("--in", dest="infile", required=True,
                        help="text JSONL: {id, pair_key, source, model_name, text}")
    parser.add_argument("--out", required=True, help="score JSONL to write")
    parser.add_argument("--skip-prefix", type=int, default=0,
                        help="drop the first N scored tokens of every document")
    args = parser.parse_args(argv)
    try:
        count = score_with_lm(args.infile, args.model, args.out,
                              skip_prefix=args.skip_prefix)
    except ScorerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"scored {count} documents -> {args.out}")
    return 0


def tag_pos_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tag-pos",
        description="Fill Universal POS annotations in a score JSONL")
    parser.add_argument("--in", dest="infile", required=True,
                        help="score JSONL produced by score-lm")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    try:
        count = tag_scores_file(args.infile, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"tagged {count} documents -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(score_lm_main())
