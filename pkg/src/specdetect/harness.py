"""End-to-end orchestration: one run config in, one report directory out.

A run reads a score file, optionally re-scores it with a bigram model,
computes spectra and feature vectors, evaluates the supervised grid and the
pairwise sweep, and leaves behind CSV/JSON artifacts plus a manifest with
the config hash, package version, seeds, and a checksum of every output.
Runs are fully deterministic: identical config and inputs give byte-identical
artifacts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import StageError, ValidationError
from .features import (
    MODES,
    MODE_PLAIN,
    average_spectrum,
    featurize,
    write_features_csv,
)
from .ngram_lm import load_model, score_document
from .pairwise import SpectrumPair, holdout_eval, sweep_delta
from .scores import build_pairs, load_scores, zscore
from .spectrum import magnitude_spectrum, write_spectra_csv
from .supervised import cross_validate, expand_grid, DEFAULT_GRID

SMALL_GRID = {
    "scalers": ["minmax", "zscore", "robust"],
    "k_best": [50],
    "classifiers": DEFAULT_GRID["classifiers"],
}


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one pipeline run."""

    dataset: str
    scores_path: Path
    ngram_model_path: Path | None
    grid_size: int
    feature_mode: str
    supervised_enabled: bool
    supervised_folds: int
    supervised_seed: int
    supervised_grid: dict | str
    pairwise_enabled: bool
    pairwise_k_max: int
    pairwise_epsilon: float
    pairwise_holdout: bool
    pairwise_seed: int

    @property
    def estimator_label(self) -> str:
        return "reuse_scores" if self.ngram_model_path is None else "bigram"


def load_run_config(path) -> RunConfig:
    """Parse and validate a YAML run config; fails before any work starts."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as handle:
        raw = yaml.safe_load(handle)
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: run config must be a mapping")

    def section(name):
        value = raw.get(name, {})
        if value is None:
            value = {}
        if not isinstance(value, dict):
            raise ValidationError(f"{path}: section {name!r} must be a mapping")
        return value

    input_cfg = section("input")
    if "scores" not in input_cfg:
        raise ValidationError(f"{path}: input.scores is required")
    scores_path = (path.parent / input_cfg["scores"]).resolve() \
        if not Path(input_cfg["scores"]).is_absolute() else Path(input_cfg["scores"])
    if not scores_path.is_file():
        raise ValidationError(f"{path}: score file {scores_path} does not exist")

    estimator = raw.get("estimator", "reuse")
    ngram_path = None
    if estimator not in (None, "reuse"):
        if not (isinstance(estimator, str) and estimator.startswith("ngram:")):
            raise ValidationError(
                f"{path}: estimator must be 'reuse' or 'ngram:<model-path>'"
            )
        candidate = estimator.split(":", 1)[1]
        ngram_path = (path.parent / candidate).resolve() \
            if not Path(candidate).is_absolute() else Path(candidate)
        if not ngram_path.is_file():
            raise ValidationError(f"{path}: ngram model {ngram_path} does not exist")

    features_cfg = section("features")
    grid_size = int(features_cfg.get("grid_size", 500))
    mode = features_cfg.get("mode", MODE_PLAIN)
    if mode not in MODES:
        raise ValidationError(f"{path}: unknown feature mode {mode!r}")
    if grid_size < 2:
        raise ValidationError(f"{path}: features.grid_size must be >= 2")

    supervised_cfg = section("supervised")
    grid_spec = supervised_cfg.get("grid", "small")
    if isinstance(grid_spec, str) and grid_spec not in ("small", "full"):
        raise ValidationError(f"{path}: supervised.grid must be small/full/mapping")

    pairwise_cfg = section("pairwise")
    return RunConfig(
        dataset=str(raw.get("dataset", scores_path.stem)),
        scores_path=scores_path,
        ngram_model_path=ngram_path,
        grid_size=grid_size,
        feature_mode=mode,
        supervised_enabled=bool(supervised_cfg.get("enabled", True)),
        supervised_folds=int(supervised_cfg.get("folds", 5)),
        supervised_seed=int(supervised_cfg.get("seed", 0)),
        supervised_grid=grid_spec,
        pairwise_enabled=bool(pairwise_cfg.get("enabled", True)),
        pairwise_k_max=int(pairwise_cfg.get("k_max", 10)),
        pairwise_epsilon=float(pairwise_cfg.get("epsilon", 0.0)),
        pairwise_holdout=bool(pairwise_cfg.get("holdout", False)),
        pairwise_seed=int(pairwise_cfg.get("seed", 0)),
    )


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_json(payload: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")


def run_pipeline(config_path, out_dir) -> Path:
    """Execute the full pipeline described by a run config.

    Returns the run directory, which afterwards contains ``spectra.csv``,
    ``features.csv``, ``eval_report.json``, ``pairwise_report.json``, and
    ``manifest.json``.  Any stage failure is re-raised as a
    :class:`StageError` naming the stage.
    """
    config_path = Path(config_path)
    config = load_run_config(config_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: dict[str, Path] = {}

    def stage(name, fn):
        try:
            return fn()
        except Exception as exc:
            raise StageError(name, exc) from exc

    docs = stage("load", lambda: load_scores(config.scores_path))

    if config.ngram_model_path is not None:
        model = stage("load-ngram", lambda: load_model(config.ngram_model_path))
        docs = stage("score", lambda: [score_document(model, d) for d in docs])

    corpus = stage("pairs", lambda: build_pairs(docs))

    def compute_spectra():
        specs = {}
        for doc in docs:
            if config.feature_mode == MODE_PLAIN:
                specs[doc.id] = magnitude_spectrum(zscore(doc))
            else:
                specs[doc.id] = average_spectrum(zscore(doc), config.feature_mode)
        return specs
    spectra = stage("spectrum", compute_spectra)
    spectra_path = out_dir / "spectra.csv"
    stage("spectrum", lambda: write_spectra_csv(spectra.values(), spectra_path))
    outputs["spectra.csv"] = spectra_path

    def compute_features():
        vectors = [featurize(doc, config.grid_size, config.feature_mode)
                   for doc in docs]
        y = [1 if doc.source == "model" else 0 for doc in docs]
        write_features_csv(vectors, y, out_dir / "features.csv")
        return np.stack([v.array() for v in vectors]), np.asarray(y)
    X, y = stage("features", compute_features)
    outputs["features.csv"] = out_dir / "features.csv"

    eval_payload = {"enabled": False}
    if config.supervised_enabled:
        def run_supervised():
            if config.supervised_grid == "full":
                grid = expand_grid(DEFAULT_GRID, X.shape[1])
            elif config.supervised_grid == "small":
                grid = expand_grid(SMALL_GRID, X.shape[1])
            else:
                grid = expand_grid(dict(config.supervised_grid), X.shape[1])
            report = cross_validate(X, y, grid, folds=config.supervised_folds,
                                    seed=config.supervised_seed)
            return dict(report.to_dict(), enabled=True)
        eval_payload = stage("supervised", run_supervised)
    _write_json(eval_payload, out_dir / "eval_report.json")
    outputs["eval_report.json"] = out_dir / "eval_report.json"

    pairwise_payload = {"enabled": False}
    if config.pairwise_enabled:
        def run_pairwise():
            if not corpus.pairs:
                raise ValidationError("pairwise evaluation needs paired documents")
            pairs = [SpectrumPair(pair_key=next(
                        d.pair_key for d in docs if d.id == human_id),
                        human=spectra[human_id], model=spectra[model_id])
                     for human_id, model_id in corpus.pairs]
            min_bins = min(min(p.human.n_bins, p.model.n_bins) for p in pairs)
            k_max = min(config.pairwise_k_max, min_bins)
            sweep = sweep_delta(pairs, k_max, config.pairwise_epsilon)
            model_names = sorted({d.model_name for d in docs if d.source == "model"})
            payload = {
                "enabled": True,
                "dataset": config.dataset,
                "estimator": config.estimator_label,
                "generator_models": model_names,
                "n_pairs": len(pairs),
                "k_max": k_max,
                "epsilon": config.pairwise_epsilon,
                "sweep": sweep.to_dict(),
                "incomplete_pairs": list(corpus.incomplete),
            }
            if config.pairwise_holdout:
                payload["holdout"] = holdout_eval(
                    pairs, k_max, config.pairwise_epsilon, seed=config.pairwise_seed)
            return payload
        pairwise_payload = stage("pairwise", run_pairwise)
    _write_json(pairwise_payload, out_dir / "pairwise_report.json")
    outputs["pairwise_report.json"] = out_dir / "pairwise_report.json"

    manifest = {
        "package_version": __version__,
        "config_sha256": _sha256(config_path),
        "dataset": config.dataset,
        "estimator": config.estimator_label,
        "seeds": {
            "supervised": config.supervised_seed,
            "pairwise": config.pairwise_seed,
        },
        "settings": {
            "grid_size": config.grid_size,
            "feature_mode": config.feature_mode,
            "supervised_folds": config.supervised_folds,
            "pairwise_k_max": config.pairwise_k_max,
            "pairwise_epsilon": config.pairwise_epsilon,
        },
        "outputs": {name: _sha256(path) for name, path in sorted(outputs.items())},
    }
    _write_json(manifest, out_dir / "manifest.json")
    return out_dir


def verify_manifest(run_dir) -> bool:
    """Re-hash a run directory's outputs against its manifest."""
    run_dir = Path(run_dir)
    with open(run_dir / "manifest.json", "r", encoding="utf-8") as handle:
        manifest = json.load(handle)
    for name, digest in manifest["outputs"].items():
        target = run_dir / name
        if not target.is_file() or _sha256(target) != digest:
            return False
    return True


def compare_table(reports, format: str = "markdown") -> str:
    """Summarize pairwise reports as a table.

    Columns: dataset, generator model, best accuracy, delta_k, estimator.
    Rows are sorted by dataset and then by descending accuracy.
    """
    rows = []
    for item in reports:
        if isinstance(item, (str, Path)):
            with open(item, "r", encoding="utf-8") as handle:
                item = json.load(handle)
        if not item.get("enabled", False):
            continue
        best = item["sweep"]["best"]
        rows.append({
            "dataset": item.get("dataset", "?"),
            "gen_model": ", ".join(item.get("generator_models", [])) or "?",
            "accuracy": best["accuracy"],
            "delta_k": best["delta_k"],
            "estimator": item.get("estimator", "?"),
        })
    rows.sort(key=lambda r: (r["dataset"], -r["accuracy"]))
    header = ["dataset", "gen. model", "accuracy", "delta_k", "estimator"]
    if format == "csv":
        lines = [",".join(["dataset", "gen_model", "accuracy", "delta_k", "estimator"])]
        for row in rows:
            lines.append(",".join([
                row["dataset"], row["gen_model"], f"{row['accuracy']:.4f}",
                str(row["delta_k"]), row["estimator"],
            ]))
        return "\n".join(lines) + "\n"
    if format != "markdown":
        raise ValidationError(f"unknown table format {format!r}")
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join(["---"] * len(header)) + "|"]
    for row in rows:
        lines.append(
            f"| {row['dataset']} | {row['gen_model']} | "
            f"{row['accuracy']:.4f} | {row['delta_k']} | {row['estimator']} |"
        )
    return "\n".join(lines) + "\n"
