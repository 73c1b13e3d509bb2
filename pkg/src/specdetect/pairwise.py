"""Zero-shot pairwise classification by low-frequency spectrum power.

Given two same-prompt texts, the member whose spectrum carries more power in
the lowest ``delta_k`` frequency bins is predicted to be the model text (or
the human text, when a group's calibrated direction is reversed).  A margin
at or below ``epsilon`` abstains; abstentions count as half-credit when
scoring accuracy so that results remain comparable across configurations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError
from .spectrum import Spectrum

DIRECTION_MODEL_HIGHER = "model_higher"
DIRECTION_HUMAN_HIGHER = "human_higher"
_DIRECTIONS = (DIRECTION_MODEL_HIGHER, DIRECTION_HUMAN_HIGHER)


@dataclass(frozen=True)
class HeuristicConfig:
    """Low-band comparison settings: band width, margin threshold, direction."""

    delta_k: int
    epsilon: float = 0.0
    direction: str = DIRECTION_MODEL_HIGHER

    def __post_init__(self):
        if self.delta_k < 1:
            raise ValidationError(f"delta_k must be >= 1, got {self.delta_k}")
        if self.epsilon < 0:
            raise ValidationError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.direction not in _DIRECTIONS:
            raise ValidationError(f"unknown direction {self.direction!r}")


@dataclass(frozen=True)
class PairVerdict:
    """Outcome for one pair; ``predicted_model_id`` is empty when abstaining."""

    pair_key: str
    predicted_model_id: str
    margin: float
    abstained: bool


class SpectrumPair(NamedTuple):
    """A labeled pair: which spectrum is truly human and which is model."""

    pair_key: str
    human: Spectrum
    model: Spectrum


@dataclass(frozen=True)
class SweepResult:
    """Accuracy of every (delta_k, direction) combination plus the winner."""

    rows: tuple[dict, ...]
    best: dict

    def to_dict(self) -> dict:
        return {"rows": [dict(r) for r in self.rows], "best": dict(self.best)}


def low_band_sum(spec: Spectrum, delta_k: int) -> float:
    """Sum of power over the ``delta_k`` lowest retained frequency bins."""
    if delta_k < 1:
        raise ValidationError(f"delta_k must be >= 1, got {delta_k}")
    if delta_k > spec.n_bins:
        raise ValidationError(
            f"delta_k {delta_k} exceeds the {spec.n_bins} bins of {spec.doc_id!r}"
        )
    return float(np.sum(spec.power[:delta_k]))


def classify_pair(a: Spectrum, b: Spectrum, cfg: HeuristicConfig,
                  pair_key_a: str | None = None,
                  pair_key_b: str | None = None) -> PairVerdict:
    """Predict which member of a pair is the model text.

    Swapping ``a`` and ``b`` never changes the prediction.  When both pair
    keys are supplied they must agree.
    """
    if pair_key_a is not None and pair_key_b is not None and pair_key_a != pair_key_b:
        raise ValidationError(
            f"pair keys differ: {pair_key_a!r} vs {pair_key_b!r}"
        )
    pair_key = pair_key_a if pair_key_a is not None else (pair_key_b or "")
    sum_a = low_band_sum(a, cfg.delta_k)
    sum_b = low_band_sum(b, cfg.delta_k)
    margin = abs(sum_a - sum_b)
    if margin <= cfg.epsilon:
        return PairVerdict(pair_key=pair_key, predicted_model_id="",
                           margin=margin, abstained=True)
    a_larger = sum_a > sum_b
    if cfg.direction == DIRECTION_MODEL_HIGHER:
        predicted = a.doc_id if a_larger else b.doc_id
    else:
        predicted = b.doc_id if a_larger else a.doc_id
    return PairVerdict(pair_key=pair_key, predicted_model_id=predicted,
                       margin=margin, abstained=False)


def evaluate_config(pairs, cfg: HeuristicConfig) -> float:
    """Accuracy of a fixed config over labeled pairs (abstentions score 0.5)."""
    pairs = list(pairs)
    if not pairs:
        raise ValidationError("no pairs to evaluate")
    score = 0.0
    for pair in pairs:
        verdict = classify_pair(pair.human, pair.model, cfg,
                                pair_key_a=pair.pair_key, pair_key_b=pair.pair_key)
        if verdict.abstained:
            score += 0.5
        elif verdict.predicted_model_id == pair.model.doc_id:
            score += 1.0
    return score / len(pairs)


def sweep_delta(pairs, k_max: int, epsilon: float = 0.0) -> SweepResult:
    """Try every band width 1..k_max in both directions; report the best.

    Selection is in-sample: the best row maximizes accuracy over the very
    pairs it is scored on, mirroring per-group tuning.  Ties go to the
    smallest delta_k, with ``model_higher`` preferred.  For an honest
    held-out protocol see :func:`holdout_eval`.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValidationError("no pairs to sweep")
    if k_max < 1:
        raise ValidationError(f"k_max must be >= 1, got {k_max}")
    min_bins = min(min(p.human.n_bins, p.model.n_bins) for p in pairs)
    if k_max > min_bins:
        raise ValidationError(
            f"k_max {k_max} exceeds the shortest spectrum ({min_bins} bins)"
        )
    rows: list[dict] = []
    best: dict | None = None
    for delta_k in range(1, k_max + 1):
        for direction in _DIRECTIONS:
            cfg = HeuristicConfig(delta_k=delta_k, epsilon=epsilon,
                                  direction=direction)
            accuracy = evaluate_config(pairs, cfg)
            row = {"delta_k": delta_k, "direction": direction,
                   "accuracy": accuracy}
            rows.append(row)
            if best is None or accuracy > best["accuracy"]:
                best = row
    return SweepResult(rows=tuple(rows), best=dict(best))


def calibrate_direction(calibration_pairs, delta_k: int) -> HeuristicConfig:
    """Majority direction of (model - human) low-band sums; ties go model-higher."""
    calibration_pairs = list(calibration_pairs)
    if not calibration_pairs:
        raise ValidationError("no calibration pairs")
    votes = 0
    for pair in calibration_pairs:
        diff = low_band_sum(pair.model, delta_k) - low_band_sum(pair.human, delta_k)
        if diff > 0:
            votes += 1
        elif diff < 0:
            votes -= 1
    direction = DIRECTION_MODEL_HIGHER if votes >= 0 else DIRECTION_HUMAN_HIGHER
    return HeuristicConfig(delta_k=delta_k, epsilon=0.0, direction=direction)


def holdout_eval(pairs, k_max: int, epsilon: float = 0.0, seed: int = 0,
                 calibration_fraction: float = 0.5) -> dict:
    """Tune (delta_k, direction) on one half of the pairs, score the other.

    This is the deployment-honest protocol: the in-sample sweep on the
    calibration split picks the config, and accuracy is reported on the
    disjoint evaluation split.
    """
    pairs = list(pairs)
    if len(pairs) < 2:
        raise ValidationError("holdout evaluation needs at least 2 pairs")
    if not 0.0 < calibration_fraction < 1.0:
        raise ValidationError("calibration_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pairs))
    n_cal = max(1, int(round(len(pairs) * calibration_fraction)))
    n_cal = min(n_cal, len(pairs) - 1)
    calibration = [pairs[i] for i in order[:n_cal]]
    evaluation = [pairs[i] for i in order[n_cal:]]
    sweep = sweep_delta(calibration, k_max, epsilon)
    cfg = HeuristicConfig(delta_k=sweep.best["delta_k"], epsilon=epsilon,
                          direction=sweep.best["direction"])
    return {
        "seed": seed,
        "n_calibration": len(calibration),
        "n_evaluation": len(evaluation),
        "delta_k": cfg.delta_k,
        "direction": cfg.direction,
        "calibration_accuracy": sweep.best["accuracy"],
        "accuracy": evaluate_config(evaluation, cfg),
    }
