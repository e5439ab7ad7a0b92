import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cabletide.analysis import (M2_PERIOD_S, BlockAccumulator, DecimatedSeries, analyze,
                                block_average, boxcar_attenuation, dominant_periods,
                                linear_detrend, peak_envelope, pearson_correlation, periodogram,
                                phase_to_length, predicted_at_series, retrend, sliding_amplitude)
from cabletide.errors import (DegenerateTime, EmptySeries, GridMismatch, SpanTooShort,
                              TooFewPoints, WindowTooSmall, ZeroVariance)
from cabletide.instrument import (NOISE_FREE, ArtifactModel, RecordingConfig, RecordingSeries,
                                  StationTemperature, synthesize_mpd_series)
from cabletide.tide import EquilibriumParams, UniformField

DAY = 86400.0
S2_PERIOD_S = 43200.0


def recording(t, y, rate):
    rc = RecordingConfig(duration_s=t.size / rate, sample_rate_hz=rate)
    return RecordingSeries(rc, np.asarray(t, dtype=float), np.asarray(y, dtype=float))


def binned(t, y, width=600.0):
    return DecimatedSeries.from_samples(t, y, width)


def bin_centres(n, width=600.0):
    return (np.arange(n) + 0.5) * width


# --- block averaging ------------------------------------------------------------

class TestBlockAverage:
    def test_constant(self):
        t = np.arange(36_000) / 30.0
        out = block_average(recording(t, np.full(t.size, 2.75), 30.0), 600.0)
        assert np.all(out.value == 2.75)

    def test_counting(self):
        t = np.arange(36_000) / 30.0
        out = block_average(recording(t, np.zeros(t.size), 30.0), 600.0)
        assert len(out) == 2
        np.testing.assert_array_equal(out.source_count_per_bin, [18_000, 18_000])
        np.testing.assert_array_equal(out.t_s, [300.0, 900.0])
        assert out.bin_width_s == 600.0

    def test_means(self):
        t = np.arange(1200.0)
        out = block_average(recording(t, t, 1.0), 600.0)
        np.testing.assert_allclose(out.value, [299.5, 899.5], rtol=1e-15)

    def test_trailing_partial_bin(self):
        # 300 of 600 samples is exactly half: kept
        t = np.arange(900.0)
        assert len(block_average(recording(t, t, 1.0), 600.0)) == 2
        t = np.arange(899.0)
        assert len(block_average(recording(t, t, 1.0), 600.0)) == 1

    def test_empty(self):
        with pytest.raises(EmptySeries):
            block_average(DecimatedSeries.from_samples([], [], 600.0), 600.0)

    def test_window_too_small(self):
        t = np.arange(100) / 30.0
        with pytest.raises(WindowTooSmall):
            block_average(recording(t, t, 30.0), 2 / 30.0)
        with pytest.raises(WindowTooSmall):
            block_average(binned(bin_centres(4), np.ones(4)), 300.0)

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        t = np.arange(7200) / 2.0
        once = block_average(recording(t, rng.normal(size=t.size), 2.0), 600.0)
        twice = block_average(once, 600.0)
        assert twice.value.tobytes() == once.value.tobytes()
        np.testing.assert_array_equal(twice.t_s, once.t_s)
        np.testing.assert_array_equal(twice.source_count_per_bin, once.source_count_per_bin)

    def test_rebinning_matches_direct(self):
        rng = np.random.default_rng(1)
        t = np.arange(12_000) / 2.0
        rec = recording(t, rng.normal(size=t.size), 2.0)
        direct = block_average(rec, 1800.0)
        staged = block_average(block_average(rec, 600.0), 1800.0)
        np.testing.assert_allclose(staged.value, direct.value, rtol=1e-12, atol=1e-15)
        np.testing.assert_array_equal(staged.source_count_per_bin, direct.source_count_per_bin)

    def test_streaming_accumulator(self):
        rng = np.random.default_rng(2)
        t = np.arange(20_000) / 3.0
        y = rng.normal(size=t.size)
        acc = BlockAccumulator(600.0, 1800)
        for lo in range(0, t.size, 777):
            acc.add(t[lo:lo + 777], y[lo:lo + 777])
        np.testing.assert_allclose(acc.finalize().value,
                                   block_average(recording(t, y, 3.0), 600.0).value,
                                   rtol=1e-12, atol=1e-15)

    def test_held_noise_sigma(self):
        # 0.65 deg draws held for 60 s, 600 s bins -> 0.65 / sqrt(10)
        stds = []
        for seed in range(100):
            rng = np.random.default_rng(seed)
            y = np.repeat(0.65 * rng.normal(size=100), 60)
            out = block_average(recording(np.arange(6000.0), y, 1.0), 600.0)
            stds.append(out.value)
        assert np.concatenate(stds).std() == pytest.approx(0.65 / math.sqrt(10), rel=0.2)
        assert 0.65 / math.sqrt(10) == pytest.approx(0.21, abs=0.005)


# --- detrending -------------------------------------------------------------

class TestDetrend:
    def test_exact_line(self):
        t = bin_centres(50)
        fit, resid = linear_detrend(binned(t, 5 + 3 * t))
        assert fit.slope_deg_per_s == pytest.approx(3.0, rel=1e-12)
        assert fit.intercept_deg == pytest.approx(5.0, rel=1e-9)
        assert fit.residual_rms_deg == pytest.approx(0.0, abs=1e-9)

    def test_sinusoid_over_whole_periods(self):
        # a cosine starting at a period boundary is even about the window centre
        period, amp = 43_200.0, 1.7
        t = bin_centres(720)
        assert t[-1] + 300 == 10 * period
        fit, _ = linear_detrend(binned(t, amp * np.cos(2 * np.pi * t / period)))
        assert abs(fit.slope_deg_per_s) < 1e-9 * amp / period

    def test_refit_residual_slope(self):
        rng = np.random.default_rng(3)
        t = bin_centres(500)
        y = -2e-5 * t + np.sin(2 * np.pi * t / 44_714) + 0.1 * rng.normal(size=t.size)
        fit, resid = linear_detrend(binned(t, y))
        refit, _ = linear_detrend(resid)
        assert abs(refit.slope_deg_per_s) < 1e-3 * abs(fit.slope_deg_per_s)
        assert fit.residual_rms_deg >= 0

    @settings(max_examples=50)
    @given(st.floats(-1e-3, 1e-3), st.floats(-100, 100), st.integers(0, 2 ** 32 - 1))
    def test_retrend_round_trip(self, slope, intercept, seed):
        rng = np.random.default_rng(seed)
        t = bin_centres(200)
        y = intercept + slope * t + rng.normal(size=t.size)
        fit, resid = linear_detrend(binned(t, y))
        back = retrend(fit, resid)
        np.testing.assert_allclose(back.value, y, rtol=1e-12, atol=1e-12 * np.abs(y).max())

    def test_implied_strain_rate(self, probe):
        # -8e-14 /s over 10.4 Mm one way, doubled and scaled to degrees
        slope = -8e-14 * 10.4e6 * 2 / 10.0 * 360
        t = bin_centres(100)
        fit, _ = linear_detrend(binned(t, slope * t), probe, 10.4e6)
        assert fit.implied_strain_rate_per_s == pytest.approx(-8e-14, rel=1e-12)
        assert linear_detrend(binned(t, slope * t))[0].implied_strain_rate_per_s is None

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            linear_detrend(binned([1.0, 2.0], [0.0, 1.0]))

    def test_degenerate_time(self):
        s = binned(bin_centres(3), [1.0, 2.0, 3.0])
        s.t_s = np.full(3, 300.0)
        with pytest.raises(DegenerateTime):
            linear_detrend(s)


class TestPhaseToLength:
    def test_examples(self, probe):
        assert phase_to_length(3.24, probe) == pytest.approx(0.045, rel=1e-12)
        assert phase_to_length(0.0, probe) == 0.0
        assert phase_to_length(360.0, probe) == 5.0


# --- correlation --------------------------------------------------------------

class TestPearson:
    @pytest.fixture
    def series(self):
        rng = np.random.default_rng(4)
        t = bin_centres(300)
        return binned(t, np.sin(t / 7000.0) + 0.3 * rng.normal(size=t.size))

    def test_self(self, series):
        assert pearson_correlation(series, series) == 1.0

    def test_negation(self, series):
        neg = binned(series.t_s, -series.value)
        assert pearson_correlation(series, neg) == -1.0

    @settings(max_examples=50)
    @given(st.floats(-1e3, 1e3).filter(lambda a: abs(a) > 1e-3), st.floats(-1e3, 1e3))
    def test_affine_invariance(self, alpha, beta):
        rng = np.random.default_rng(5)
        t = bin_centres(100)
        a = binned(t, rng.normal(size=t.size))
        b = binned(t, rng.normal(size=t.size) + a.value)
        r = pearson_correlation(a, b)
        r2 = pearson_correlation(a, binned(t, alpha * b.value + beta))
        assert r2 == pytest.approx(math.copysign(r, alpha), abs=1e-9)

    def test_bounded(self, series):
        rng = np.random.default_rng(6)
        other = binned(series.t_s, rng.normal(size=len(series)))
        assert -1.0 <= pearson_correlation(series, other) <= 1.0

    def test_interpolates_finer_grid(self):
        t_fine = (np.arange(6000) + 0.5) * 10.0
        fine = DecimatedSeries.from_samples(t_fine, np.sin(t_fine / 5000.0), 10.0)
        coarse = binned(bin_centres(100), np.sin(bin_centres(100) / 5000.0))
        assert pearson_correlation(coarse, fine) == pytest.approx(1.0, abs=1e-9)

    def test_grid_mismatch(self, series):
        far = binned(series.t_s + 1e7, series.value)
        with pytest.raises(GridMismatch):
            pearson_correlation(series, far)

    def test_zero_variance(self, series):
        flat = binned(series.t_s, np.full(len(series), 0.3))
        with pytest.raises(ZeroVariance):
            pearson_correlation(series, flat)
        with pytest.raises(ZeroVariance):
            pearson_correlation(flat, series)


# --- periods ------------------------------------------------------------------

class TestDominantPeriods:
    def test_pure_m2(self):
        t = bin_centres(int(12 * DAY / 600))
        y = 1.3 * np.cos(2 * np.pi * t / M2_PERIOD_S + 0.4)
        (p, a), *_ = dominant_periods(binned(t, y))
        assert p == pytest.approx(12.4206 * 3600, rel=0.01)
        assert a == pytest.approx(1.3, rel=0.02)

    def test_constant(self):
        t = bin_centres(int(12 * DAY / 600))
        assert dominant_periods(binned(t, np.full(t.size, 4.0))) == []

    def test_span_too_short(self):
        t = bin_centres(int(2 * DAY / 600))
        with pytest.raises(SpanTooShort):
            dominant_periods(binned(t, np.sin(t / 1e4)), max_period_s=36 * 3600)

    def test_tolerates_missing_bins(self):
        rng = np.random.default_rng(8)
        t = bin_centres(int(12 * DAY / 600))
        keep = rng.random(t.size) > 0.3
        y = np.cos(2 * np.pi * t / M2_PERIOD_S)
        (p, a), *_ = dominant_periods(binned(t[keep], y[keep]))
        assert p == pytest.approx(M2_PERIOD_S, rel=0.01)
        assert a == pytest.approx(1.0, rel=0.02)

    def test_exclusion_window(self):
        t = bin_centres(int(12 * DAY / 600))
        y = np.cos(2 * np.pi * t / M2_PERIOD_S)
        pg_all = periodogram(binned(t, y))
        pg_ex = periodogram(binned(t, y), exclude=[(3 * DAY, 5 * DAY)])
        assert pg_all.periods_s.size == pg_ex.periods_s.size
        assert not np.allclose(pg_all.amplitude, pg_ex.amplitude)
        with pytest.raises(SpanTooShort):
            dominant_periods(binned(t, y), exclude=[(0, 11.5 * DAY)])

    def test_sorted_and_limited(self):
        t = bin_centres(int(12 * DAY / 600))
        y = np.cos(2 * np.pi * t / M2_PERIOD_S) + 0.5 * np.cos(2 * np.pi * t / (24 * 3600))
        peaks = dominant_periods(binned(t, y), max_peaks=3)
        assert len(peaks) <= 3
        amps = [a for _, a in peaks]
        assert amps == sorted(amps, reverse=True)
        assert peaks[1][0] == pytest.approx(DAY, rel=0.01)

    def test_grid_resolution(self):
        pg = periodogram(binned(bin_centres(2000), np.sin(bin_centres(2000) / 1e4)))
        ratio = pg.periods_s[1:] / pg.periods_s[:-1]
        assert np.all(ratio <= 1.001 + 1e-12)

    def test_equilibrium_30_days(self, pacific_route):
        p = EquilibriumParams()
        at = predicted_at_series(pacific_route, p, p.epoch_utc_s, 30 * DAY, step_s=600.0)
        peaks = dominant_periods(at)
        (p1, _), (p2, _) = peaks[:2]
        assert p1 == pytest.approx(12.42 * 3600, rel=0.005)
        assert p2 == pytest.approx(12.00 * 3600, rel=0.005)


class TestEnvelope:
    def test_boxcar_attenuation(self):
        att = boxcar_attenuation(M2_PERIOD_S, 600.0)
        assert att < 1e-3
        assert att <= 0.05
        # small-argument expansion of 1 - sinc(x): (pi x)^2 / 6
        x = 600.0 / M2_PERIOD_S
        assert att == pytest.approx((math.pi * x) ** 2 / 6, rel=1e-3)
        assert boxcar_attenuation(12 * 3600.0, 600.0) < 1e-3

    def test_measured_attenuation(self):
        t = np.arange(int(4 * DAY)) * 1.0
        y = np.cos(2 * np.pi * t / M2_PERIOD_S)
        out = block_average(recording(t, y, 1.0), 600.0)
        amp = dominant_periods(out, max_period_s=36 * 3600)[0][1]
        assert 1 - amp == pytest.approx(boxcar_attenuation(M2_PERIOD_S, 600.0), abs=2e-4)

    def test_sliding_amplitude_constant(self):
        t = bin_centres(int(6 * DAY / 600))
        y = 0.8 * np.sin(2 * np.pi * t / M2_PERIOD_S + 1.0)
        centres, amps = sliding_amplitude(binned(t, y))
        assert centres.size > 10
        np.testing.assert_allclose(amps, 0.8, rtol=1e-3)
        assert np.all(centres - DAY / 2 >= t[0] - 1e-9)

    def test_sliding_amplitude_short(self):
        assert sliding_amplitude(binned(bin_centres(3), [1.0, 2.0, 3.0]))[0].size == 0

    def test_peak_envelope_constant(self):
        t = bin_centres(int(3 * DAY / 600))
        y = 0.8 * np.cos(2 * np.pi * t / M2_PERIOD_S + 0.3)
        tp, amps = peak_envelope(binned(t, y))
        # one peak of |y| per half cycle
        assert tp.size == pytest.approx(3 * DAY / (M2_PERIOD_S / 2), abs=1.5)
        np.testing.assert_allclose(amps, 0.8, rtol=1e-4)
        np.testing.assert_allclose(np.diff(tp), M2_PERIOD_S / 2, rtol=1e-3)

    def test_peak_envelope_recovers_modulation(self):
        t = bin_centres(int(30 * DAY / 600))
        beat = 14.7653 * DAY
        envelope = 1.0 + 0.5 * np.cos(2 * np.pi * (t - 5 * DAY) / beat)
        y = envelope * np.cos(2 * np.pi * t / M2_PERIOD_S)
        tp, amps = peak_envelope(binned(t, y))
        np.testing.assert_allclose(amps, 1.0 + 0.5 * np.cos(2 * np.pi * (tp - 5 * DAY) / beat),
                                   atol=2e-3)

    def test_peak_envelope_monotone_input(self):
        tp, amps = peak_envelope(binned(bin_centres(5), [1.0, 2.0, 3.0, 4.0, 5.0]))
        assert tp.size == 0 and amps.size == 0


# --- full pipeline ----------------------------------------------------------------

def _simulate(route, model, steel, pm, probe, am, days, seed=1):
    rc = RecordingConfig(duration_s=days * DAY, sample_rate_hz=1.0, rng_seed=seed)
    return synthesize_mpd_series(route, model, steel, pm, probe, rc, am)


class TestAnalyze:
    def test_noise_free_m2(self, pacific_route, steel, pm, probe):
        rc_start = RecordingConfig().start_utc_s
        model = UniformField(0.085, period_s=M2_PERIOD_S, epoch_utc_s=rc_start)
        rec = _simulate(pacific_route, model, steel, pm, probe, NOISE_FREE, 12)
        at = predicted_at_series(pacific_route, model, rc_start, 12 * DAY)
        report = analyze(rec, at, probe, pacific_route)
        assert report.pearson_r > 0.999
        assert report.dominant_periods_s[0][0] == pytest.approx(M2_PERIOD_S, rel=0.01)
        assert report.semidiurnal_amplitude_deg == pytest.approx(3.2287, rel=0.01)
        assert report.gain_deg_per_m_at == pytest.approx(3.2287 / 0.085, rel=0.01)
        assert report.n_bins == 12 * 144

    def test_zero_at_with_tilt(self, cancellation_setup, steel, pm, probe):
        route, grid, _ = cancellation_setup
        am = ArtifactModel(ecl_sigma_hz=0, synth_phase_sigma_deg=0, white_phase_sigma_deg=0)
        rec = _simulate(route, grid, steel, pm, probe, am, 4)
        at = predicted_at_series(route, grid, rec.config.start_utc_s, 4 * DAY)
        assert np.all(at.value == 0.0)
        report = analyze(rec, at, probe, route)
        assert report.pearson_r is None
        assert any("ZeroVariance" in n for n in report.notes)
        assert report.trend.implied_strain_rate_per_s == pytest.approx(-8e-14, rel=1e-6)

    def test_default_noise(self, pacific_route, steel, pm, probe):
        p = EquilibriumParams()
        am = ArtifactModel(temperature_series=StationTemperature())
        rec = _simulate(pacific_route, p, steel, pm, probe, am, 12, seed=42)
        at = predicted_at_series(pacific_route, p, rec.config.start_utc_s, 12 * DAY)
        report, products = analyze(rec, at, probe, pacific_route, return_products=True)
        assert report.pearson_r >= 0.9
        assert report.trend.implied_strain_rate_per_s == pytest.approx(-8e-14, rel=0.05)
        assert report.temperature_r is not None and abs(report.temperature_r) < 0.3
        assert report.averaging_attenuation < 1e-3
        assert len(products.binned) == len(products.detrended) == report.n_bins
        doc = json.loads(json.dumps(report.to_dict()))
        assert doc["dominant_periods"][0]["period_h"] > 0
        assert len(doc["envelope"]["t_s"]) == len(doc["envelope"]["amplitude_deg"])

    def test_without_prediction(self, pacific_route, steel, pm, probe):
        rec = _simulate(pacific_route, EquilibriumParams(), steel, pm, probe, ArtifactModel(), 4)
        report = analyze(rec, None, probe, pacific_route)
        assert report.pearson_r is None
        assert any("no predicted AT" in n for n in report.notes)
