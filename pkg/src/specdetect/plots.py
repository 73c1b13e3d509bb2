"""Group-mean spectrum curves with bootstrap bands, LOESS smoothing, and export.

Curves are emitted as CSV tables or as small standalone SVG files (one
polyline plus a shaded confidence band per group).  Smoothing is locally
weighted linear regression with tricube weights; it is evaluated at the
input frequencies so tables keep their grid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .spectrum import Spectrum, same_grid


@dataclass(frozen=True)
class CurveTable:
    """One group's curve: mean per frequency, optional band and smooth."""

    group: str
    freq: tuple[float, ...]
    mean: tuple[float, ...]
    lo: tuple[float, ...] | None = None
    hi: tuple[float, ...] | None = None
    smoothed: tuple[float, ...] | None = None

    def __post_init__(self):
        for name in ("freq", "mean", "lo", "hi", "smoothed"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, tuple(float(v) for v in value))
        for name in ("mean", "lo", "hi", "smoothed"):
            value = getattr(self, name)
            if value is not None and len(value) != len(self.freq):
                raise ValidationError(
                    f"curve {self.group!r}: {name} length differs from freq"
                )


def _common_grid(spectra) -> np.ndarray:
    spectra = list(spectra)
    if not spectra:
        raise ValidationError("no spectra given")
    first = spectra[0]
    for spec in spectra[1:]:
        if not same_grid(first, spec):
            raise ValidationError(
                f"spectra {first.doc_id!r} and {spec.doc_id!r} are on "
                "different grids; resample first"
            )
    return first.freq_array()


def group_mean_spectrum(spectra, labels) -> dict[str, CurveTable]:
    """Arithmetic per-bin mean of the spectra within each label group."""
    spectra = list(spectra)
    labels = list(labels)
    if len(spectra) != len(labels):
        raise ValidationError("spectra/labels length mismatch")
    freqs = _common_grid(spectra)
    by_group: dict[str, list[Spectrum]] = {}
    for spec, label in zip(spectra, labels):
        by_group.setdefault(str(label), []).append(spec)
    tables = {}
    for group in sorted(by_group):
        members = by_group[group]
        if not members:
            raise ValidationError(f"group {group!r} is empty")
        mean = np.mean([s.power_array() for s in members], axis=0)
        tables[group] = CurveTable(group=group, freq=tuple(freqs), mean=tuple(mean))
    return tables


def bootstrap_ci(spectra, n_resamples: int = 1000, level: float = 0.95,
                 seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Percentile bootstrap band for the per-bin mean of one group.

    Documents are resampled with replacement ``n_resamples`` times; the band
    is the (1-level)/2 and (1+level)/2 percentiles of the resampled means.
    Seeded and deterministic.
    """
    spectra = list(spectra)
    if len(spectra) < 2:
        raise ValidationError("bootstrap needs a group of at least 2 spectra")
    if n_resamples < 1:
        raise ValidationError(f"n_resamples must be >= 1, got {n_resamples}")
    if not 0.0 < level < 1.0:
        raise ValidationError(f"level must be in (0, 1), got {level}")
    _common_grid(spectra)
    power = np.stack([s.power_array() for s in spectra])
    rng = np.random.default_rng(seed)
    n = power.shape[0]
    means = np.empty((n_resamples, power.shape[1]))
    for b in range(n_resamples):
        means[b] = power[rng.integers(0, n, size=n)].mean(axis=0)
    lo_pct = 100.0 * (1.0 - level) / 2.0
    lo = np.percentile(means, lo_pct, axis=0)
    hi = np.percentile(means, 100.0 - lo_pct, axis=0)
    return lo, hi


def smooth(freq, values, span: float) -> np.ndarray:
    """LOESS: local linear fits with tricube weights, window = span * range.

    Evaluated at the input frequencies.  A full-span window reproduces any
    globally linear curve exactly; the fit is shift-equivariant in value.
    """
    freq = np.asarray(freq, dtype=float)
    values = np.asarray(values, dtype=float)
    if freq.size != values.size:
        raise ValidationError("freq/values length mismatch")
    if freq.size < 3:
        raise ValidationError("smoothing needs at least 3 points")
    if not 0.0 < span <= 1.0:
        raise ValidationError(f"span must be in (0, 1], got {span}")
    window = span * (freq.max() - freq.min())
    if window <= 0:
        raise ValidationError("degenerate frequency range")
    out = np.empty_like(values)
    for i, f0 in enumerate(freq):
        d = np.abs(freq - f0) / window
        w = np.where(d < 1.0, (1.0 - d**3) ** 3, 0.0)
        wsum = w.sum()
        x = freq - f0
        sw = wsum
        swx = (w * x).sum()
        swxx = (w * x * x).sum()
        swy = (w * values).sum()
        swxy = (w * x * values).sum()
        denom = sw * swxx - swx * swx
        if denom <= 1e-300:
            out[i] = swy / wsum  # too few distinct points: weighted mean
        else:
            # intercept of the local fit at x = 0 (i.e. at f0)
            out[i] = (swxx * swy - swx * swxy) / denom
    return out


def emit(tables, path, format: str = "csv") -> None:
    """Write curve tables to CSV or a simple SVG figure."""
    tables = list(tables)
    if format == "csv":
        _emit_csv(tables, path)
    elif format == "svg":
        _emit_svg(tables, path)
    else:
        raise ValidationError(f"unknown emit format {format!r}")


def _columns(tables) -> list[str]:
    with_smooth = any(t.smoothed is not None for t in tables)
    cols = ["group", "freq", "mean", "lo", "hi"]
    return cols + ["smoothed"] if with_smooth else cols


def _emit_csv(tables, path) -> None:
    cols = _columns(tables)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(cols)
        for table in tables:
            n = len(table.freq)
            lo = table.lo if table.lo is not None else [""] * n
            hi = table.hi if table.hi is not None else [""] * n
            smoothed = table.smoothed if table.smoothed is not None else [""] * n
            for i in range(n):
                row = [table.group, repr(table.freq[i]), repr(table.mean[i]),
                       repr(lo[i]) if lo[i] != "" else "",
                       repr(hi[i]) if hi[i] != "" else ""]
                if "smoothed" in cols:
                    row.append(repr(smoothed[i]) if smoothed[i] != "" else "")
                writer.writerow(row)


def read_curves_csv(path) -> list[CurveTable]:
    groups: dict[str, dict[str, list]] = {}
    order: list[str] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header or header[:3] != ["group", "freq", "mean"]:
            raise ValidationError(f"{path}: unexpected curves CSV header")
        has_smooth = "smoothed" in header
        for row in reader:
            group = row[0]
            if group not in groups:
                groups[group] = {"freq": [], "mean": [], "lo": [], "hi": [],
                                 "smoothed": []}
                order.append(group)
            entry = groups[group]
            entry["freq"].append(float(row[1]))
            entry["mean"].append(float(row[2]))
            entry["lo"].append(float(row[3]) if row[3] != "" else None)
            entry["hi"].append(float(row[4]) if row[4] != "" else None)
            if has_smooth:
                entry["smoothed"].append(float(row[5]) if row[5] != "" else None)
    tables = []
    for group in order:
        entry = groups[group]

        def pack(values):
            if any(v is None for v in values) or not values:
                return None
            return tuple(values)

        tables.append(CurveTable(
            group=group,
            freq=tuple(entry["freq"]),
            mean=tuple(entry["mean"]),
            lo=pack(entry["lo"]),
            hi=pack(entry["hi"]),
            smoothed=pack(entry["smoothed"]) if has_smooth else None,
        ))
    return tables


_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _emit_svg(tables, path, width: int = 640, height: int = 400) -> None:
    if not tables:
        raise ValidationError("no curve tables to plot")
    margin = 56
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    all_f = np.concatenate([np.asarray(t.freq) for t in tables])
    all_v = [np.asarray(t.mean) for t in tables]
    for t in tables:
        if t.lo is not None:
            all_v.append(np.asarray(t.lo))
        if t.hi is not None:
            all_v.append(np.asarray(t.hi))
    all_v = np.concatenate(all_v)
    f_lo, f_hi = float(all_f.min()), float(all_f.max())
    v_lo, v_hi = float(all_v.min()), float(all_v.max())
    if f_hi == f_lo:
        f_hi = f_lo + 1.0
    if v_hi == v_lo:
        v_hi = v_lo + 1.0

    def sx(f):
        return margin + (f - f_lo) / (f_hi - f_lo) * plot_w

    def sy(v):
        return height - margin - (v - v_lo) / (v_hi - v_lo) * plot_h

    def pts(fs, vs):
        return " ".join(f"{sx(f):.2f},{sy(v):.2f}" for f, v in zip(fs, vs))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle" '
        f'font-size="13">normalized frequency</text>',
        f'<text x="16" y="{height / 2:.0f}" text-anchor="middle" '
        f'font-size="13" transform="rotate(-90 16 {height / 2:.0f})">'
        f'spectrum power</text>',
    ]
    for tick in np.linspace(f_lo, f_hi, 6):
        parts.append(
            f'<text x="{sx(tick):.1f}" y="{height - margin + 16}" '
            f'text-anchor="middle" font-size="10">{tick:.2f}</text>'
        )
    for tick in np.linspace(v_lo, v_hi, 5):
        parts.append(
            f'<text x="{margin - 6}" y="{sy(tick):.1f}" text-anchor="end" '
            f'font-size="10">{tick:.3g}</text>'
        )
    for i, table in enumerate(tables):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        if table.lo is not None and table.hi is not None:
            band = (pts(table.freq, table.hi) + " "
                    + pts(table.freq[::-1], table.lo[::-1]))
            parts.append(
                f'<polygon points="{band}" fill="{color}" opacity="0.18" '
                f'stroke="none"/>'
            )
        line = table.smoothed if table.smoothed is not None else table.mean
        parts.append(
            f'<polyline points="{pts(table.freq, line)}" fill="none" '
            f'stroke="{color}" stroke-width="1.6"/>'
        )
        parts.append(
            f'<text x="{width - margin - 4}" y="{margin + 16 + 16 * i}" '
            f'text-anchor="end" font-size="12" fill="{color}">{table.group}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(parts))
        handle.write("\n")
