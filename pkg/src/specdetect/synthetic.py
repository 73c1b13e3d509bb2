"""Seeded synthetic corpora and feature sets with known spectral structure.

These generators create the fixtures used throughout the test suite and the
demos: paired documents whose "model" member carries extra power in a known
low-frequency band, and feature matrices with a controlled class shift.
Because the injected structure is exact, expected outcomes (which band wins,
which class separates) are known by construction.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .scores import ScoredDocument

_WORDS = " ".join((
    "the a of to and in that it is was for on are as with his they at be",
    "this have from or one had by word but not what all were we when your",
    "can said there use an each which she do how their if will up other",
    "about out many then them these so some her would make like him into",
    "time has look two more write go see number way could people my",
)).split()

_UPOS = ("NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "AUX",
         "CCONJ", "PART", "NUM", "PUNCT")


def _random_tokens(rng: np.random.Generator, n: int) -> tuple[list[str], list[str]]:
    tokens = [str(_WORDS[i]) for i in rng.integers(0, len(_WORDS), size=n)]
    tags = [str(_UPOS[i]) for i in rng.integers(0, len(_UPOS) - 1, size=n)]
    # sprinkle sentence enders so sentence-based masking has spans to work with
    for i in range(9, n - 1, 10):
        tokens[i] = "."
        tags[i] = "PUNCT"
    return tokens, tags


def inject_low_band(values: np.ndarray, boost: float, n_bins: int) -> np.ndarray:
    """Scale the lowest ``n_bins`` DFT bins of a series by ``1 + boost``.

    Works in the time domain: the band-limited component is extracted by a
    masked inverse transform and added back scaled, so bins 1..n_bins of the
    result's spectrum are exactly ``(1 + boost)`` times the original ones
    (conjugate bins included, keeping the series real).
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    if n_bins < 1 or n_bins >= (n + 1) // 2:
        raise ValidationError(f"n_bins {n_bins} out of range for length {n}")
    transform = np.fft.fft(x)
    mask = np.zeros(n)
    mask[1 : n_bins + 1] = 1.0
    mask[n - n_bins :] = 1.0
    band = np.fft.ifft(transform * mask).real
    return x + boost * band


def synthetic_pair_corpus(n_pairs: int, n_tokens: int = 128, boost: float = 0.5,
                          n_boost_bins: int = 3, seed: int = 0,
                          model_name: str = "synthetic-lm",
                          with_annotations: bool = True,
                          nll_loc: float = 4.0,
                          nll_scale: float = 1.5) -> list[ScoredDocument]:
    """Paired documents where model members get a low-band power injection.

    Each pair shares its base noise sequence: the human member keeps it, the
    model member is the same sequence with bins 1..n_boost_bins amplified by
    ``1 + boost``.  With any positive boost the model member's low-band sum
    exceeds the human's in every pair, so a pairwise sweep should find a
    perfect band no wider than ``n_boost_bins``.
    """
    if n_pairs < 1:
        raise ValidationError("n_pairs must be >= 1")
    rng = np.random.default_rng(seed)
    docs: list[ScoredDocument] = []
    for p in range(n_pairs):
        base = rng.normal(loc=nll_loc, scale=nll_scale, size=n_tokens)
        boosted = inject_low_band(base, boost, n_boost_bins)
        tokens, tags = _random_tokens(rng, n_tokens)
        key = f"pair{p:04d}"
        common = {"pair_key": key}
        docs.append(ScoredDocument(
            id=f"{key}.human", source="human", model_name="",
            tokens=tokens, nll=tuple(base),
            annotations=tuple(tags) if with_annotations else None, **common))
        docs.append(ScoredDocument(
            id=f"{key}.model", source="model", model_name=model_name,
            tokens=tokens, nll=tuple(boosted),
            annotations=tuple(tags) if with_annotations else None, **common))
    return docs


def synthetic_feature_set(n_samples: int, n_features: int = 500,
                          shift: float = 3.0, n_shifted: int = 25,
                          seed: int = 0):
    """Standard-normal features; class 1 gets ``+shift`` on the first bins.

    ``shift`` is in units of the within-class standard deviation (which is
    1), so the default is a 3-sigma class separation on the shifted block.
    Returns ``(X, y)`` with balanced classes.
    """
    if n_samples < 2:
        raise ValidationError("n_samples must be >= 2")
    if not 1 <= n_shifted <= n_features:
        raise ValidationError("n_shifted out of range")
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n_samples, n_features))
    y = np.zeros(n_samples, dtype=int)
    y[1::2] = 1
    X[y == 1, :n_shifted] += shift
    return X, y


def shuffled_labels(y, seed: int = 0) -> np.ndarray:
    """A label permutation that destroys any feature-label association."""
    rng = np.random.default_rng(seed)
    return rng.permutation(np.asarray(y))
