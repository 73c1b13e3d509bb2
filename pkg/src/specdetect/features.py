"""Fixed-length classifier features built from magnitude spectra.

Documents differ in length, so their spectra live on different frequency
grids; :func:`resample` interpolates every spectrum onto a shared grid of
``B`` equally spaced frequencies spanning (0, 0.5].  Two circular-shift
averaging modes are provided alongside the plain spectrum.  Note that the
magnitude spectrum is invariant under circular shifts, which makes the
magnitude-averaging mode identical to the plain spectrum and makes complex
averaging over all rotations cancel every non-DC bin; the test suite
asserts both identities, and ``plain`` is therefore the default feature
mode.  See the README for the full argument.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .scores import NormalizedSeries, ScoredDocument, zscore
from .spectrum import Spectrum, magnitude_spectrum

MODE_PLAIN = "plain"
MODE_CIRCULAR_MAG = "circular_mag"
MODE_CIRCULAR_COMPLEX = "circular_complex"
MODES = (MODE_PLAIN, MODE_CIRCULAR_MAG, MODE_CIRCULAR_COMPLEX)

LABEL_HUMAN = 0
LABEL_MODEL = 1


@dataclass(frozen=True)
class FeatureVector:
    """A spectrum resampled onto a fixed grid, ready for a classifier."""

    doc_id: str
    grid_size: int
    values: tuple[float, ...]
    mode: str

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.mode not in MODES:
            raise ValidationError(f"unknown feature mode {self.mode!r}")
        if len(self.values) != self.grid_size:
            raise ValidationError(
                f"feature vector {self.doc_id!r}: {len(self.values)} values "
                f"for grid_size {self.grid_size}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValidationError(f"feature vector {self.doc_id!r}: non-finite value")

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def feature_grid(grid_size: int) -> np.ndarray:
    """The shared frequency grid: B equally spaced points ending at 0.5."""
    if grid_size < 2:
        raise ValidationError(f"grid_size must be >= 2, got {grid_size}")
    return np.arange(1, grid_size + 1) / (2.0 * grid_size)


def circularize(values, t: int) -> np.ndarray:
    """Rotate a series by ``t``: the first t entries move to the end."""
    x = np.asarray(values, dtype=float)
    if not 0 <= t < x.size:
        raise ValidationError(f"rotation {t} out of range for length {x.size}")
    return np.roll(x, -t)


def average_spectrum(series: NormalizedSeries, mode: str) -> Spectrum:
    """Average the spectra of all N circular rotations of the series.

    ``circular_mag`` averages the magnitude spectra of the rotations;
    ``circular_complex`` takes the magnitude of the averaged complex
    spectra.  Both are analytically degenerate (see module docstring) but
    kept selectable for comparison studies.
    """
    if mode not in (MODE_CIRCULAR_MAG, MODE_CIRCULAR_COMPLEX):
        raise ValidationError(f"average_spectrum mode must be circular, got {mode!r}")
    x = series.array()
    n = x.size
    rotations = np.stack([np.roll(x, -t) for t in range(n)])
    transforms = np.fft.fft(rotations, axis=1)
    half = n // 2
    if mode == MODE_CIRCULAR_MAG:
        power = np.abs(transforms).mean(axis=0)
    else:
        power = np.abs(transforms.mean(axis=0))
    k = np.arange(1, half + 1)
    return Spectrum(
        doc_id=series.doc_id,
        freqs=tuple(k / n),
        power=tuple(power[1 : half + 1]),
        n_input=n,
    )


def resample(spec: Spectrum, grid_size: int) -> FeatureVector:
    """Linearly interpolate a spectrum onto the shared frequency grid.

    Frequencies outside the spectrum's own range are clamped to its nearest
    bin, so output values always stay within [min(power), max(power)].
    """
    if spec.n_bins < 2:
        raise ValidationError(
            f"spectrum {spec.doc_id!r}: needs >= 2 bins to resample"
        )
    grid = feature_grid(grid_size)
    values = np.interp(grid, spec.freq_array(), spec.power_array())
    return FeatureVector(
        doc_id=spec.doc_id,
        grid_size=grid_size,
        values=tuple(values),
        mode=MODE_PLAIN,
    )


def featurize(doc: ScoredDocument, grid_size: int,
              mode: str = MODE_PLAIN) -> FeatureVector:
    """Document -> z-score -> (possibly averaged) spectrum -> fixed grid."""
    if mode not in MODES:
        raise ValidationError(f"unknown feature mode {mode!r}")
    series = zscore(doc)
    if mode == MODE_PLAIN:
        spec = magnitude_spectrum(series)
    else:
        spec = average_spectrum(series, mode)
    vector = resample(spec, grid_size)
    return FeatureVector(
        doc_id=vector.doc_id,
        grid_size=grid_size,
        values=vector.values,
        mode=mode,
    )


def feature_matrix(docs, grid_size: int, mode: str = MODE_PLAIN):
    """Stack feature vectors for a document list.

    Returns ``(X, y, doc_ids)`` where ``y`` is 0 for human and 1 for model.
    """
    docs = list(docs)
    if not docs:
        raise ValidationError("feature_matrix: no documents")
    vectors = [featurize(doc, grid_size, mode) for doc in docs]
    X = np.stack([v.array() for v in vectors])
    y = np.array([LABEL_MODEL if d.source == "model" else LABEL_HUMAN for d in docs])
    return X, y, [doc.id for doc in docs]


# --- CSV export ------------------------------------------------------------


def write_features_csv(vectors, labels, path) -> None:
    """Write a feature matrix as CSV: ``doc_id,label,f_1..f_B``."""
    vectors = list(vectors)
    labels = list(labels)
    if len(vectors) != len(labels):
        raise ValidationError("write_features_csv: vectors/labels length mismatch")
    if not vectors:
        raise ValidationError("write_features_csv: no feature vectors")
    grid_size = vectors[0].grid_size
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["doc_id", "label"] + [f"f_{i}" for i in range(1, grid_size + 1)])
        for vector, label in zip(vectors, labels):
            if vector.grid_size != grid_size:
                raise ValidationError("write_features_csv: mixed grid sizes")
            if label not in (LABEL_HUMAN, LABEL_MODEL):
                raise ValidationError(f"label must be 0 or 1, got {label!r}")
            writer.writerow([vector.doc_id, label] + [repr(v) for v in vector.values])


def read_features_csv(path):
    """Read a feature CSV back as ``(X, y, doc_ids)``."""
    doc_ids: list[str] = []
    labels: list[int] = []
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header or header[:2] != ["doc_id", "label"]:
            raise ValidationError(f"{path}: unexpected feature CSV header")
        width = len(header) - 2
        for line_number, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValidationError(f"{path}:{line_number}: wrong column count")
            doc_ids.append(row[0])
            labels.append(int(row[1]))
            rows.append([float(v) for v in row[2:]])
    if not rows:
        raise ValidationError(f"{path}: no feature rows")
    X = np.asarray(rows, dtype=float)
    if X.shape[1] != width:
        raise ValidationError(f"{path}: inconsistent feature width")
    return X, np.asarray(labels, dtype=int), doc_ids
