"""Detection of model-generated text from the spectrum of token surprisal.

The pipeline: per-token negative log likelihoods are z-scored within each
document, transformed with the DFT into a one-sided magnitude spectrum, and
classified either by a supervised pipeline over resampled spectra or by a
zero-shot pairwise comparison of low-frequency power.
"""

__version__ = "0.1.0"

from .errors import (
    ConflictError,
    DegenerateInputError,
    NumericError,
    ParseError,
    SpecDetectError,
    StageError,
    ValidationError,
)
from .scores import (
    NormalizedSeries,
    PairedCorpus,
    ScoredDocument,
    build_pairs,
    load_scores,
    save_scores,
    truncate,
    zscore,
)
from .ngram_lm import NgramModel, score_document, score_tokens, tokenize, train_ngram
from .spectrum import (
    Spectrum,
    dft,
    magnitude_spectrum,
    naive_dft,
    spectral_overlap,
)
from .features import (
    FeatureVector,
    average_spectrum,
    circularize,
    feature_matrix,
    featurize,
    resample,
)
from .supervised import EvalReport, Pipeline, cross_validate, fit, predict
from .pairwise import (
    HeuristicConfig,
    PairVerdict,
    SpectrumPair,
    calibrate_direction,
    classify_pair,
    low_band_sum,
    sweep_delta,
)
from .analysis import (
    AblationCondition,
    AblationReport,
    MaskSpec,
    count_yesno,
    mask_scores,
    run_ablation,
    strip_leading_yesno,
)
from .plots import CurveTable, bootstrap_ci, emit, group_mean_spectrum, smooth
from .harness import compare_table, load_run_config, run_pipeline
from .synthetic import synthetic_feature_set, synthetic_pair_corpus
