"""Command line interface.

One root command with a subcommand per pipeline stage.  Exit codes:
0 success, 1 validation failure, 2 I/O failure, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .analysis import AblationCondition, MaskSpec, run_ablation
from .errors import NumericError, StageError, ValidationError
from .features import (
    MODES,
    MODE_PLAIN,
    average_spectrum,
    featurize,
    read_features_csv,
    resample,
    write_features_csv,
)
from .harness import compare_table, run_pipeline
from .ngram_lm import load_model, save_model, score_document, train_ngram
from .pairwise import (
    HeuristicConfig,
    SpectrumPair,
    evaluate_config,
    holdout_eval,
    sweep_delta,
)
from .plots import CurveTable, bootstrap_ci, emit, group_mean_spectrum, smooth
from .scores import build_pairs, load_scores, save_scores, zscore
from .spectrum import Spectrum, magnitude_spectrum, read_spectra_csv, write_spectra_csv
from .supervised import (
    DEFAULT_GRID,
    cross_validate,
    expand_grid,
    fit,
    save_pipeline,
)


class _Parser(argparse.ArgumentParser):
    # route usage errors through the validation exit code
    def error(self, message):
        raise ValidationError(message)


def _write_json(payload, path):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")


def _doc_spectrum(doc, mode):
    series = zscore(doc)
    if mode == MODE_PLAIN:
        return magnitude_spectrum(series)
    return average_spectrum(series, mode)


# --- subcommand handlers -----------------------------------------------------


def _cmd_train_ngram(args):
    model = train_ngram(args.corpus, min_count=args.min_count, smoothing_k=args.k)
    save_model(model, args.out)
    print(f"trained bigram model: |vocab|={len(model.vocab)}, "
          f"{len(model.bigram_counts)} bigrams -> {args.out}")
    return 0


def _cmd_score(args):
    docs = load_scores(args.infile)
    if args.validate:
        corpus = build_pairs(docs)
        print(f"{args.infile}: {len(docs)} documents, {len(corpus.pairs)} pairs, "
              f"{len(corpus.incomplete)} incomplete pair keys")
    if args.ngram:
        if not args.out:
            raise ValidationError("--out is required when re-scoring with --ngram")
        model = load_model(args.ngram)
        rescored = [score_document(model, doc) for doc in docs]
        save_scores(rescored, args.out)
        print(f"re-scored {len(rescored)} documents -> {args.out}")
    elif not args.validate:
        raise ValidationError("nothing to do: pass --validate and/or --ngram")
    return 0


def _cmd_spectrum(args):
    docs = load_scores(args.infile)
    spectra = [_doc_spectrum(doc, args.mode) for doc in docs]
    write_spectra_csv(spectra, args.out)
    print(f"wrote {len(spectra)} spectra -> {args.out}")
    return 0


def _cmd_features(args):
    docs = load_scores(args.infile)
    vectors = [featurize(doc, args.grid_size, args.mode) for doc in docs]
    labels = [1 if doc.source == "model" else 0 for doc in docs]
    write_features_csv(vectors, labels, args.out)
    print(f"wrote {len(vectors)}x{args.grid_size} feature matrix -> {args.out}")
    return 0


def _cmd_train_clf(args):
    X, y, _ = read_features_csv(args.features)
    if args.grid:
        with open(args.grid, "r", encoding="utf-8") as handle:
            grid_spec = json.load(handle)
    else:
        grid_spec = DEFAULT_GRID
    grid = expand_grid(grid_spec, X.shape[1])
    report = cross_validate(X, y, grid, folds=args.folds, seed=args.seed)
    _write_json(report.to_dict(), args.report)
    print(f"best config {report.best_config} "
          f"mean accuracy {report.mean_accuracy:.4f} -> {args.report}")
    if args.model_out:
        best = next(c for c in grid if c.describe() == report.best_config)
        save_pipeline(fit(best, X, y), args.model_out)
        print(f"fitted best pipeline -> {args.model_out}")
    return 0


def _read_pairs_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["pair_key", "human_doc_id", "model_doc_id"]:
            raise ValidationError(f"{path}: unexpected pairs CSV header {header}")
        return [(row[0], row[1], row[2]) for row in reader]


def _cmd_detect_pair(args):
    spectra = {s.doc_id: s for s in read_spectra_csv(args.spectra)}
    if args.pairs:
        triples = _read_pairs_csv(args.pairs)
    elif args.corpus:
        corpus = build_pairs(load_scores(args.corpus))
        key_of = {doc.id: doc.pair_key for doc in corpus.docs}
        triples = [(key_of[h], h, m) for h, m in corpus.pairs]
    else:
        raise ValidationError("pass --pairs <csv> or --corpus <jsonl>")
    missing = [d for _, h, m in triples for d in (h, m) if d not in spectra]
    if missing:
        raise ValidationError(f"spectra file lacks documents: {missing[:5]}")
    pairs = [SpectrumPair(pair_key=key, human=spectra[h], model=spectra[m])
             for key, h, m in triples]

    payload = {"n_pairs": len(pairs), "epsilon": args.epsilon}
    if args.delta_k:
        cfg = HeuristicConfig(delta_k=args.delta_k, epsilon=args.epsilon,
                              direction=args.direction)
        payload["fixed_config"] = {"delta_k": cfg.delta_k, "direction": cfg.direction}
        payload["accuracy"] = evaluate_config(pairs, cfg)
        print(f"fixed config delta_k={cfg.delta_k} {cfg.direction}: "
              f"accuracy {payload['accuracy']:.4f}")
    else:
        min_bins = min(min(p.human.n_bins, p.model.n_bins) for p in pairs)
        k_max = min(args.k_max, min_bins)
        sweep = sweep_delta(pairs, k_max, args.epsilon)
        payload["k_max"] = k_max
        payload["sweep"] = sweep.to_dict()
        best = sweep.best
        print(f"best delta_k={best['delta_k']} {best['direction']}: "
              f"accuracy {best['accuracy']:.4f}")
        if args.holdout:
            payload["holdout"] = holdout_eval(pairs, k_max, args.epsilon,
                                              seed=args.seed)
            print(f"held-out accuracy {payload['holdout']['accuracy']:.4f}")
    _write_json(payload, args.report)
    return 0


def _parse_condition(text: str, seed: int) -> AblationCondition:
    if text == "yesno":
        return AblationCondition(kind="yesno")
    if text.startswith("length:"):
        return AblationCondition(kind="length", n=int(text.split(":", 1)[1]))
    if text.startswith("mask:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(
                "mask condition must look like mask:NOUN,VERB:mean_replace"
            )
        tags = frozenset(t.strip().upper() for t in parts[1].split(",") if t.strip())
        return AblationCondition(
            kind="pos_mask", mask=MaskSpec(tags=tags, mode=parts[2], seed=seed)
        )
    raise ValidationError(f"unknown condition {text!r}")


def _cmd_analyze(args):
    docs = load_scores(args.corpus)
    corpus = build_pairs(docs)
    condition = _parse_condition(args.condition, args.seed)
    estimator = None
    if args.estimator != "reuse":
        if not args.estimator.startswith("ngram:"):
            raise ValidationError("estimator must be 'reuse' or 'ngram:<model-path>'")
        estimator = load_model(args.estimator.split(":", 1)[1])
    report = run_ablation(corpus, condition, estimator, grid_size=args.grid_size)
    _write_json(report.to_dict(), args.report)
    print(f"{report.condition}: overlap human={report.overlap_human:.4f} "
          f"model={report.overlap_model:.4f} -> {args.report}")
    return 0


def _cmd_plot(args):
    spectra = read_spectra_csv(args.spectra)
    docs = {d.id: d for d in load_scores(args.corpus)}
    missing = [s.doc_id for s in spectra if s.doc_id not in docs]
    if missing:
        raise ValidationError(f"corpus lacks documents: {missing[:5]}")

    def group_of(doc_id):
        doc = docs[doc_id]
        if args.groups == "source":
            return doc.source
        if args.groups == "model_name":
            return doc.model_name or "human"
        return f"{doc.source}:{doc.model_name}" if doc.model_name else doc.source

    resampled = []
    freqs = tuple((k + 1) / (2.0 * args.bins) for k in range(args.bins))
    for spec in spectra:
        vector = resample(spec, args.bins)
        resampled.append(Spectrum(doc_id=spec.doc_id, freqs=freqs,
                                  power=vector.values, n_input=2 * args.bins))
    labels = [group_of(s.doc_id) for s in resampled]
    tables = group_mean_spectrum(resampled, labels)

    final = []
    for group, table in tables.items():
        members = [s for s, lab in zip(resampled, labels) if lab == group]
        lo = hi = None
        if len(members) >= 2 and args.bootstrap > 0:
            lo, hi = bootstrap_ci(members, n_resamples=args.bootstrap,
                                  seed=args.seed)
            lo, hi = tuple(lo), tuple(hi)
        smoothed = None
        if args.span:
            smoothed = tuple(smooth(table.freq, table.mean, args.span))
        final.append(CurveTable(group=group, freq=table.freq, mean=table.mean,
                                lo=lo, hi=hi, smoothed=smoothed))
    out = Path(args.out)
    emit(final, out, format="svg" if out.suffix == ".svg" else "csv")
    print(f"wrote {len(final)} group curves -> {out}")
    return 0


def _cmd_run(args):
    run_dir = run_pipeline(args.config, args.out)
    print(f"run complete -> {run_dir}")
    return 0


def _cmd_report(args):
    table = compare_table(args.reports, format=args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(table)
        print(f"wrote table -> {args.out}")
    else:
        print(table, end="")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specdetect",
                     description="Human vs. model text detection from "
                                 "likelihood spectra")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-ngram", help="train a bigram estimator")
    p.add_argument("--corpus", required=True)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--k", type=float, default=0.1)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_train_ngram)

    p = sub.add_parser("score", help="validate or re-score a JSONL score file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--validate", action="store_true")
    p.add_argument("--ngram")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_score)

    p = sub.add_parser("spectrum", help="compute magnitude spectra")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", choices=MODES, default=MODE_PLAIN)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("features", help="build the classifier feature matrix")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--grid-size", type=int, default=500)
    p.add_argument("--mode", choices=MODES, default=MODE_PLAIN)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_features)

    p = sub.add_parser("train-clf", help="grid-searched cross-validation")
    p.add_argument("--features", required=True)
    p.add_argument("--grid")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True)
    p.add_argument("--model-out")
    p.set_defaults(handler=_cmd_train_clf)

    p = sub.add_parser("detect-pair", help="pairwise low-band heuristic")
    p.add_argument("--spectra", required=True)
    p.add_argument("--pairs")
    p.add_argument("--corpus")
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--delta-k", type=int, dest="delta_k")
    p.add_argument("--direction", choices=["model_higher", "human_higher"],
                   default="model_higher")
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--holdout", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True)
    p.set_defaults(handler=_cmd_detect_pair)

    p = sub.add_parser("analyze", help="run a diagnostic ablation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--condition", required=True,
                   help="yesno | length:<n> | mask:<TAGS>:<mode>")
    p.add_argument("--estimator", default="reuse",
                   help="reuse | ngram:<model-path>")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-size", type=int, default=128)
    p.add_argument("--report", required=True)
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("plot", help="group-mean spectrum curves")
    p.add_argument("--spectra", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--groups", choices=["source", "model_name", "source_model"],
                   default="source")
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--bootstrap", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--span", type=float, default=0.0,
                   help="LOESS span in (0,1]; 0 disables smoothing")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_plot)

    p = sub.add_parser("run", help="full pipeline from a run config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_run)

    p = sub.add_parser("report", help="summarize pairwise reports as a table")
    p.add_argument("reports", nargs="+")
    p.add_argument("--format", choices=["markdown", "csv"], default="markdown")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        cause = exc.cause
        if isinstance(cause, NumericError):
            return 3
        if isinstance(cause, OSError):
            return 2
        return 1
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
