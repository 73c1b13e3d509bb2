"""Tests for the DFT, magnitude spectra, and spectral overlap."""

import cmath

import numpy as np
import pytest

from specdetect import (
    ScoredDocument,
    Spectrum,
    ValidationError,
    dft,
    magnitude_spectrum,
    naive_dft,
    spectral_overlap,
    zscore,
)
from specdetect.spectrum import overlap_ratio, read_spectra_csv, write_spectra_csv


def loop_dft(values):
    """Second, fully independent oracle: scalar loops and cmath only."""
    n = len(values)
    out = []
    for k in range(n):
        acc = 0j
        for i, x in enumerate(values):
            acc += x * cmath.exp(-2j * cmath.pi * k * i / n)
        out.append(acc)
    return out


def series_of(values, doc_id="d"):
    doc = ScoredDocument(id=doc_id, pair_key="p", source="human", model_name="",
                         tokens=tuple(f"t{i}" for i in range(len(values))),
                         nll=tuple(values))
    return zscore(doc)


class TestDft:
    def test_impulse_flat_spectrum(self):
        out = dft([1.0, 0.0, 0.0, 0.0])
        np.testing.assert_allclose(np.abs(out), 1.0, atol=1e-12)

    def test_alternating_all_power_at_nyquist(self):
        out = dft([1.0, -1.0, 1.0, -1.0])
        np.testing.assert_allclose(np.abs(out), [0.0, 0.0, 4.0, 0.0], atol=1e-12)

    def test_matches_naive_oracle_length7(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=7)
        np.testing.assert_allclose(dft(x), naive_dft(x), rtol=0, atol=1e-9)

    def test_naive_matches_scalar_loop(self):
        # guards the vectorized oracle itself with plain-Python arithmetic
        rng = np.random.default_rng(1)
        for n in (2, 3, 5, 8, 13):
            x = rng.normal(size=n)
            np.testing.assert_allclose(naive_dft(x), loop_dft(list(x)),
                                       rtol=0, atol=1e-9)

    def test_fast_equals_naive_all_small_sizes(self):
        rng = np.random.default_rng(2)
        for n in range(2, 65):
            x = rng.normal(size=n)
            fast, slow = dft(x), naive_dft(x)
            scale = np.max(np.abs(slow))
            assert np.max(np.abs(fast - slow)) / scale < 1e-9

    def test_too_short_rejected(self):
        with pytest.raises(ValidationError):
            dft([1.0])

    def test_linearity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(2, 40))
            x, y = rng.normal(size=n), rng.normal(size=n)
            a, b = rng.normal(), rng.normal()
            lhs = dft(a * x + b * y)
            rhs = a * dft(x) + b * dft(y)
            np.testing.assert_allclose(lhs, rhs, atol=1e-9)

    def test_conjugate_symmetry_real_input(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(2, 50))
            out = dft(rng.normal(size=n))
            for k in range(1, n):
                assert out[n - k] == pytest.approx(np.conj(out[k]), abs=1e-9)

    def test_circular_shift_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(2, 40))
            x = rng.normal(size=n)
            base = np.abs(dft(x))
            for shift in range(n):
                rotated = np.abs(dft(np.roll(x, -shift)))
                np.testing.assert_allclose(rotated, base, atol=1e-9)


class TestMagnitudeSpectrum:
    def test_dc_bin_is_negligible_after_zscore(self):
        rng = np.random.default_rng(6)
        series = series_of(rng.normal(size=33))
        transform = dft(series.array())
        assert abs(transform[0]) < 1e-9

    def test_bin_layout_even_n(self):
        series = series_of(np.arange(8.0) + np.random.default_rng(7).normal(size=8))
        spec = magnitude_spectrum(series)
        assert spec.n_bins == 4
        np.testing.assert_allclose(spec.freqs, [0.125, 0.25, 0.375, 0.5])

    def test_bin_layout_odd_n(self):
        series = series_of(np.random.default_rng(8).normal(size=7))
        spec = magnitude_spectrum(series)
        assert spec.n_bins == 3
        np.testing.assert_allclose(spec.freqs, [1 / 7, 2 / 7, 3 / 7])

    def test_parseval_on_zscored_input(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            n = int(rng.integers(2, 200))
            values = rng.normal(size=n)
            if np.std(values, ddof=1) == 0:
                continue
            series = series_of(values)
            transform = dft(series.array())
            energy = float(np.sum(np.abs(transform) ** 2) / n)
            assert energy == pytest.approx(n - 1, abs=1e-6)

    def test_power_nonnegative(self):
        rng = np.random.default_rng(10)
        spec = magnitude_spectrum(series_of(rng.normal(size=50)))
        assert np.all(spec.power_array() >= 0)


class TestSpectrumInvariants:
    def test_bad_bin_count_rejected(self):
        with pytest.raises(ValidationError):
            Spectrum(doc_id="x", freqs=(0.25,), power=(1.0, 2.0), n_input=4)

    def test_decreasing_freqs_rejected(self):
        with pytest.raises(ValidationError):
            Spectrum(doc_id="x", freqs=(0.5, 0.25), power=(1.0, 1.0), n_input=4)

    def test_negative_power_rejected(self):
        with pytest.raises(ValidationError):
            Spectrum(doc_id="x", freqs=(0.25, 0.5), power=(1.0, -1.0), n_input=4)


class TestSpectralOverlap:
    def make(self, power, doc_id="s"):
        n = 2 * len(power)
        freqs = tuple((k + 1) / n for k in range(len(power)))
        return Spectrum(doc_id=doc_id, freqs=freqs, power=tuple(power), n_input=n)

    def test_identical_is_one(self):
        a = self.make([1.0, 2.0, 3.0])
        assert spectral_overlap(a, a) == 1.0

    def test_disjoint_support_is_zero(self):
        assert spectral_overlap(self.make([1.0, 0.0]), self.make([0.0, 1.0])) == 0.0

    def test_hand_value(self):
        assert spectral_overlap(self.make([1.0, 1.0]), self.make([1.0, 3.0])) == 0.5

    def test_all_zero_pair_defined_as_one(self):
        assert spectral_overlap(self.make([0.0, 0.0]), self.make([0.0, 0.0])) == 1.0

    def test_symmetry_and_scaling(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            p = rng.uniform(0, 5, size=8)
            q = rng.uniform(0, 5, size=8)
            c = float(rng.uniform(0.1, 10))
            assert overlap_ratio(p, q) == pytest.approx(overlap_ratio(q, p))
            assert overlap_ratio(c * p, c * q) == pytest.approx(
                overlap_ratio(p, q), rel=1e-12)
            assert 0.0 <= overlap_ratio(p, q) <= 1.0

    def test_one_iff_equal(self):
        rng = np.random.default_rng(12)
        p = rng.uniform(0.1, 5, size=6)
        q = p.copy()
        q[3] += 0.5
        assert overlap_ratio(p, p) == 1.0
        assert overlap_ratio(p, q) < 1.0

    def test_grid_mismatch_rejected(self):
        a = self.make([1.0, 2.0])
        b = self.make([1.0, 2.0, 3.0])
        with pytest.raises(ValidationError):
            spectral_overlap(a, b)


class TestSpectraCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(13)
        spectra = [magnitude_spectrum(series_of(rng.normal(size=n), doc_id=f"d{n}"))
                   for n in (8, 9, 20)]
        path = tmp_path / "spectra.csv"
        write_spectra_csv(spectra, path)
        loaded = read_spectra_csv(path)
        assert sorted(s.doc_id for s in loaded) == ["d20", "d8", "d9"]
        by_id = {s.doc_id: s for s in loaded}
        for spec in spectra:
            got = by_id[spec.doc_id]
            assert got.n_input == spec.n_input
            np.testing.assert_array_equal(got.power_array(), spec.power_array())
            np.testing.assert_array_equal(got.freq_array(), spec.freq_array())

    def test_deterministic_ordering(self, tmp_path):
        rng = np.random.default_rng(14)
        spectra = [magnitude_spectrum(series_of(rng.normal(size=6), doc_id=name))
                   for name in ("zeta", "alpha", "mid")]
        path = tmp_path / "spectra.csv"
        write_spectra_csv(spectra, path)
        rows = path.read_text().strip().splitlines()[1:]
        names = [row.split(",")[0] for row in rows]
        assert names == sorted(names)
