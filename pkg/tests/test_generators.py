import datetime as dt

import numpy as np
import pytest

import reference
from mfhurst import generators
from mfhurst.core import mfdfa
from mfhurst.errors import InputError
from mfhurst.generators import (
    EmbeddingFailureError,
    analytic_cascade_hq,
    binomial_cascade,
    binomial_cascade_values,
    fgn,
    fgn_autocovariance,
    white_noise,
)
from mfhurst.ingest import ReturnKind

# frozen closed-form values for p = 0.75 (recomputed at 40 digits)
CASCADE_H2 = 0.8390359525563188
CASCADE_H5 = 0.6138525324874227
CASCADE_HM5 = 1.8011849667914211
CASCADE_DH5 = 1.1873324343039983
CASCADE_H0 = 1.2075187496394219
FGN_GAMMA1_H07 = 0.3195079107728943


class TestWhiteNoise:
    def test_deterministic(self):
        a = white_noise(1000, seed=5)
        b = white_noise(1000, seed=5)
        assert a.values.tolist() == b.values.tolist()
        assert a.dates == b.dates

    def test_large_sample_statistics(self):
        w = white_noise(10**5, seed=0).values
        assert abs(w.mean()) < 4 / np.sqrt(10**5)
        assert abs(w.var() - 1.0) < 0.05

    def test_single_value(self):
        series = white_noise(1, seed=3)
        assert len(series) == 1
        assert series.kind is ReturnKind.LOG

    def test_n_zero_rejected(self):
        with pytest.raises(InputError):
            white_noise(0)

    def test_consecutive_dates(self):
        series = white_noise(5, seed=1)
        deltas = {(b - a).days for a, b in zip(series.dates, series.dates[1:])}
        assert deltas == {1}


class TestFgn:
    def test_autocovariance_closed_form(self):
        assert fgn_autocovariance(0, 0.7) == 1.0
        assert fgn_autocovariance(1, 0.7) == pytest.approx(FGN_GAMMA1_H07, rel=1e-14)
        assert fgn_autocovariance(1, 0.5) == 0.0
        assert fgn_autocovariance(3, 0.5) == 0.0

    def test_deterministic(self):
        a = fgn(512, 0.7, seed=9)
        b = fgn(512, 0.7, seed=9)
        assert a.values.tolist() == b.values.tolist()

    def test_half_hurst_is_white(self):
        x = fgn(2**14, 0.5, seed=4).values
        assert abs(reference.lag_autocorrelation(x, 1)) < 4 / np.sqrt(x.size)

    @pytest.mark.parametrize("seed", range(10))
    def test_lag1_autocorrelation_h07(self, seed):
        x = fgn(2**14, 0.7, seed=seed).values
        assert reference.lag_autocorrelation(x, 1) == pytest.approx(
            FGN_GAMMA1_H07, abs=0.02
        )

    def test_hurst_recovery_h07(self):
        _, spec = mfdfa(fgn(2**14, 0.7, seed=1))
        assert spec.h(2.0) == pytest.approx(0.7, abs=0.05)

    @pytest.mark.parametrize("hurst", [0.3, 0.5, 0.7])
    def test_monofractal_width_stays_small(self, hurst):
        # fGn is monofractal; the residual width is finite-size bias
        for seed in (0, 1, 2):
            _, spec = mfdfa(fgn(2**14, hurst, seed=seed))
            assert abs(spec.width(5.0)) <= 0.2

    @pytest.mark.parametrize("hurst", [0.3, 0.5, 0.7])
    def test_covariance_fidelity(self, hurst):
        # sample autocovariance about the known zero mean, 50 seeds,
        # each of lags 1..10 within 3 standard errors of the closed form
        n = 2**12
        lags = np.arange(1, 11)
        acov = np.empty((50, lags.size))
        for seed in range(50):
            x = fgn(n, hurst, seed=seed).values
            for i, k in enumerate(lags):
                acov[seed, i] = x[k:] @ x[:-k] / n
        gamma = fgn_autocovariance(lags, hurst)
        se = acov.std(axis=0, ddof=1) / np.sqrt(acov.shape[0])
        z = np.abs(acov.mean(axis=0) - gamma) / se
        assert np.all(z < 3.0), z

    def test_invalid_parameters(self):
        with pytest.raises(InputError):
            fgn(1, 0.7)
        with pytest.raises(InputError):
            fgn(100, 0.0)
        with pytest.raises(InputError):
            fgn(100, 1.0)

    def test_embedding_failure_after_doublings(self, monkeypatch):
        calls = []

        def always_indefinite(m, hurst):
            calls.append(m)
            return np.array([-1.0, 1.0])

        monkeypatch.setattr(generators, "_embedding_eigenvalues", always_indefinite)
        with pytest.raises(EmbeddingFailureError):
            fgn(64, 0.7, seed=0)
        assert calls == [64, 128, 256, 512]


class TestBinomialCascade:
    def test_single_split(self):
        series = binomial_cascade(1, 0.75)
        assert series.values.tolist() == [0.75, 0.25]

    @pytest.mark.parametrize("k", [1, 2, 8, 16, 24])
    def test_mass_conservation(self, k):
        masses = binomial_cascade_values(k, 0.75)
        assert masses.min() > 0.0
        assert abs(masses.sum() - 1.0) < 1e-12

    def test_randomized_variant_conserves_mass(self):
        masses = binomial_cascade_values(10, 0.8, seed=77)
        assert abs(masses.sum() - 1.0) < 1e-12
        assert masses.tolist() != binomial_cascade_values(10, 0.8, seed=0).tolist()

    def test_randomized_variant_deterministic_per_seed(self):
        a = binomial_cascade_values(8, 0.75, seed=3)
        b = binomial_cascade_values(8, 0.75, seed=3)
        assert a.tolist() == b.tolist()

    def test_estimated_h2(self):
        _, spec = mfdfa(binomial_cascade(16, 0.75))
        assert spec.h(2.0) == pytest.approx(CASCADE_H2, abs=0.1)

    def test_parameter_validation(self):
        with pytest.raises(InputError):
            binomial_cascade_values(0, 0.75)
        with pytest.raises(InputError):
            binomial_cascade_values(25, 0.75)
        with pytest.raises(InputError):
            binomial_cascade_values(4, 0.5)
        with pytest.raises(InputError):
            binomial_cascade_values(4, 1.0)

    def test_dated_series_rejects_calendar_overflow(self):
        with pytest.raises(InputError):
            binomial_cascade(22, 0.75)


class TestAnalyticCascadeHq:
    def test_frozen_values(self):
        assert analytic_cascade_hq(2.0, 0.75) == pytest.approx(CASCADE_H2, rel=1e-14)
        assert analytic_cascade_hq(5.0, 0.75) == pytest.approx(CASCADE_H5, rel=1e-14)
        assert analytic_cascade_hq(-5.0, 0.75) == pytest.approx(CASCADE_HM5, rel=1e-14)
        assert analytic_cascade_hq(0.0, 0.75) == pytest.approx(CASCADE_H0, rel=1e-14)

    def test_h_at_q1_is_one_for_any_p(self):
        for p in (0.6, 0.75, 0.9):
            assert analytic_cascade_hq(1.0, p) == pytest.approx(1.0, rel=1e-14)

    def test_width_antisymmetry(self):
        dh5 = analytic_cascade_hq(-5.0, 0.75) - analytic_cascade_hq(5.0, 0.75)
        assert dh5 == pytest.approx(CASCADE_DH5, rel=1e-14)

    def test_degenerates_to_monofractal_near_half(self):
        q = np.linspace(-5, 5, 41)
        h = analytic_cascade_hq(q, 0.5 + 1e-9)
        assert np.allclose(h, 1.0, atol=1e-7)

    def test_strictly_decreasing_on_default_grid(self):
        q = np.linspace(-5, 5, 41)
        h = analytic_cascade_hq(q, 0.75)
        assert np.all(np.diff(h) < 0)

    def test_continuous_at_zero(self):
        assert analytic_cascade_hq(1e-9, 0.75) == pytest.approx(
            analytic_cascade_hq(0.0, 0.75), abs=1e-6
        )

    def test_matches_extended_precision(self):
        for q in (-5.0, -1.0, 0.0, 0.25, 2.0, 5.0):
            assert analytic_cascade_hq(q, 0.75) == pytest.approx(
                reference.cascade_hq(q, 0.75), rel=1e-13
            )


class TestGeneratorSeriesContracts:
    def test_all_generators_emit_log_kind_with_dates(self):
        for series in (
            white_noise(16, seed=0),
            fgn(16, 0.6, seed=0),
            binomial_cascade(4, 0.75),
        ):
            assert series.kind is ReturnKind.LOG
            assert len(series.dates) == len(series)
            assert series.dates[0] == dt.date(2000, 1, 1)
