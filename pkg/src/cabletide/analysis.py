"""
Reduction of phase-meter recordings.

The pipeline mirrors how a week-long MPD record is read against the tide:
average into 600 s bins, remove the linear tilt, correlate the residual with
the aggregated tide on the same bins, and look for the tidal periods with a
least-squares periodogram (which, unlike an FFT, tolerates dropped bins).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from cabletide.elastic import ProbeSpec
from cabletide.errors import (DegenerateTime, EmptySeries, GridMismatch, SpanTooShort,
                              TooFewPoints, WindowTooSmall, ZeroVariance)
from cabletide.georoute import CableRoute
from cabletide.instrument import RecordingSeries
from cabletide.tide import AggregatedTide, CONSTITUENT_SPEEDS, TideModel

M2_PERIOD_S = 360.0 / CONSTITUENT_SPEEDS["M2"] * 3600.0
DEFAULT_WINDOW_S = 600.0
DEFAULT_MIN_PERIOD_S = 4 * 3600.0
DEFAULT_MAX_PERIOD_S = 36 * 3600.0
SEMIDIURNAL_BAND_S = (11.0 * 3600.0, 13.5 * 3600.0)

# guards floor(t / window) against t landing a few ulps below a bin edge
_BIN_EPS = 1e-9


@dataclass
class DecimatedSeries:
    """Bin means on a uniform grid of width ``bin_width_s``; bins may be missing."""

    t_s: np.ndarray
    value: np.ndarray
    bin_width_s: float
    source_count_per_bin: np.ndarray

    def __post_init__(self):
        self.t_s = np.asarray(self.t_s, dtype=float)
        self.value = np.asarray(self.value, dtype=float)
        self.source_count_per_bin = np.asarray(self.source_count_per_bin, dtype=np.int64)
        if not (self.t_s.shape == self.value.shape == self.source_count_per_bin.shape):
            raise ValueError("t_s, value and source_count_per_bin must have equal length")
        if self.t_s.size > 1 and not np.all(np.diff(self.t_s) > 0):
            raise ValueError("bin times must be strictly increasing")
        if np.any(self.source_count_per_bin < 1):
            raise ValueError("every bin needs at least one source sample")

    def __len__(self):
        return self.t_s.size

    @classmethod
    def from_samples(cls, t_s, value, bin_width_s):
        t_s = np.asarray(t_s, dtype=float)
        return cls(t_s, value, bin_width_s, np.ones(t_s.shape, dtype=np.int64))

    def select(self, mask) -> DecimatedSeries:
        return DecimatedSeries(self.t_s[mask], self.value[mask], self.bin_width_s,
                               self.source_count_per_bin[mask])


class BlockAccumulator:
    """
    Running per-bin sums for non-overlapping averaging windows anchored at t=0.

    Feed samples in any number of calls, then ``finalize``. A bin is kept
    only if it received at least half of ``nominal_inputs`` samples.
    """

    def __init__(self, window_s: float, nominal_inputs: float):
        self.window_s = float(window_s)
        self.nominal_inputs = float(nominal_inputs)
        self._sum = np.zeros(0)
        self._weight = np.zeros(0, dtype=np.int64)
        self._inputs = np.zeros(0, dtype=np.int64)
        self._last = np.zeros(0)

    def _grow(self, size):
        if size <= self._sum.size:
            return
        size = max(size, 2 * self._sum.size)
        pad = size - self._sum.size
        self._sum = np.concatenate([self._sum, np.zeros(pad)])
        self._weight = np.concatenate([self._weight, np.zeros(pad, dtype=np.int64)])
        self._inputs = np.concatenate([self._inputs, np.zeros(pad, dtype=np.int64)])
        self._last = np.concatenate([self._last, np.zeros(pad)])

    def add(self, t_s, values, weights=None):
        t_s = np.asarray(t_s, dtype=float)
        values = np.asarray(values, dtype=float)
        if t_s.size == 0:
            return
        if weights is None:
            weights = np.ones(t_s.shape, dtype=np.int64)
        if t_s.min() < 0:
            raise ValueError("sample times must be >= 0 (seconds since start)")
        k = np.floor(t_s / self.window_s + _BIN_EPS).astype(np.int64)
        self._grow(int(k.max()) + 1)
        n = self._sum.size
        self._sum += np.bincount(k, weights=values * weights, minlength=n)
        self._weight += np.bincount(k, weights=weights, minlength=n).astype(np.int64)
        self._inputs += np.bincount(k, minlength=n)
        self._last[k] = values

    def finalize(self) -> DecimatedSeries:
        keep = (self._inputs > 0) & (self._inputs >= 0.5 * self.nominal_inputs)
        k = np.flatnonzero(keep)
        # a lone input keeps its value bit-for-bit (idempotent re-averaging)
        mean = np.where(self._inputs[k] == 1, self._last[k],
                        self._sum[k] / np.maximum(self._weight[k], 1))
        return DecimatedSeries((k + 0.5) * self.window_s, mean, self.window_s, self._weight[k])


def block_average(series, window_s: float) -> DecimatedSeries:
    """
    Non-overlapping boxcar averages of a recording or an already binned series.

    Bins are ``[k w, (k+1) w)`` in seconds since the start of the recording.
    A bin holding fewer than half of its nominal samples (typically the
    trailing partial bin) is dropped. Binned inputs are combined weighted by
    their source counts.

    Raises
    ------
    EmptySeries
    WindowTooSmall
        window not longer than two samples (recordings) or shorter than the
        input bin width (binned series)
    """
    if len(series) == 0:
        raise EmptySeries("cannot average an empty series")
    if isinstance(series, RecordingSeries):
        spacing = 1.0 / series.sample_rate_hz
        if not window_s > 2.0 * spacing:
            raise WindowTooSmall(f"window {window_s} s must exceed two samples ({2 * spacing} s)")
        acc = BlockAccumulator(window_s, window_s / spacing)
        acc.add(series.t_s, series.mpd_deg)
        return acc.finalize()
    if isinstance(series, DecimatedSeries):
        spacing = series.bin_width_s
        if window_s < spacing * (1 - 1e-12):
            raise WindowTooSmall(f"window {window_s} s is shorter than the bin width {spacing} s")
        acc = BlockAccumulator(window_s, window_s / spacing)
        acc.add(series.t_s, series.value, series.source_count_per_bin)
        return acc.finalize()
    raise TypeError(f"cannot average {type(series).__name__}")


@dataclass
class TrendFit:
    slope_deg_per_s: float
    intercept_deg: float
    residual_rms_deg: float
    implied_strain_rate_per_s: float | None = None

    def evaluate(self, t_s):
        return self.intercept_deg + self.slope_deg_per_s * np.asarray(t_s, dtype=float)


def _ols(t, y):
    tm = t.mean()
    dt = t - tm
    sxx = float(np.dot(dt, dt))
    if sxx == 0.0:
        raise DegenerateTime("all sample times are equal")
    slope = float(np.dot(dt, y - y.mean())) / sxx
    return slope, float(y.mean() - slope * tm)


def linear_detrend(series: DecimatedSeries, probe: ProbeSpec | None = None,
                   length_m: float | None = None):
    """
    Ordinary least-squares line through the series and the residual series.

    With ``probe`` and the one-way cable ``length_m`` the slope is also
    expressed as a strain rate (1/s).

    Returns
    -------
    TrendFit, DecimatedSeries
    """
    if len(series) < 3:
        raise TooFewPoints(f"need at least 3 points, got {len(series)}")
    t, y = series.t_s, series.value
    slope, intercept = _ols(t, y)
    resid = y - (intercept + slope * t)
    strain = None
    if probe is not None and length_m:
        strain = phase_to_length(slope, probe) / length_m
    fit = TrendFit(slope, intercept, float(np.sqrt(np.mean(resid ** 2))), strain)
    return fit, DecimatedSeries(t.copy(), resid, series.bin_width_s,
                                series.source_count_per_bin.copy())


def retrend(fit: TrendFit, residual: DecimatedSeries) -> DecimatedSeries:
    return DecimatedSeries(residual.t_s, residual.value + fit.evaluate(residual.t_s),
                           residual.bin_width_s, residual.source_count_per_bin)


def phase_to_length(phase_deg, probe: ProbeSpec = ProbeSpec()):
    """One-way cable length change (m) for a round-trip probe phase change (deg)."""
    return phase_deg / probe.deg_per_one_way_m


def _same_grid(a: DecimatedSeries, b: DecimatedSeries) -> bool:
    return a.t_s.shape == b.t_s.shape and np.allclose(a.t_s, b.t_s, rtol=0, atol=1e-6)


def pearson_correlation(a: DecimatedSeries, b: DecimatedSeries) -> float:
    """
    Pearson r between two binned series.

    ``b`` is linearly interpolated onto the bins of ``a`` that fall inside
    ``b``'s time span when the grids differ.

    Raises
    ------
    GridMismatch
        fewer than 3 overlapping bins
    ZeroVariance
        either series is constant over the overlap
    """
    if _same_grid(a, b):
        x, y = a.value, b.value
    else:
        if len(a) == 0 or len(b) == 0:
            raise GridMismatch("empty series")
        inside = (a.t_s >= b.t_s[0] - 1e-9) & (a.t_s <= b.t_s[-1] + 1e-9)
        x = a.value[inside]
        y = np.interp(a.t_s[inside], b.t_s, b.value)
    if x.size < 3:
        raise GridMismatch(f"only {x.size} overlapping bins")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(np.dot(dx, dx)), float(np.dot(dy, dy))
    scale_x = max(1.0, float(np.abs(x).max())) ** 2 * x.size
    scale_y = max(1.0, float(np.abs(y).max())) ** 2 * y.size
    if sxx <= 1e-28 * scale_x or syy <= 1e-28 * scale_y:
        raise ZeroVariance("one of the series has zero variance")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def period_grid(min_period_s: float, max_period_s: float, rel_step: float = 1e-3) -> np.ndarray:
    """Log-spaced trial periods with a fixed relative spacing."""
    if not 0 < min_period_s < max_period_s:
        raise ValueError("require 0 < min_period_s < max_period_s")
    n = int(math.ceil(math.log(max_period_s / min_period_s) / math.log1p(rel_step))) + 1
    return np.geomspace(min_period_s, max_period_s, n)


def ls_amplitudes(t_s, values, periods_s, block: int = 256) -> np.ndarray:
    """
    Least-squares sinusoid amplitude at each trial period.

    Fits ``c + a cos(w t) + b sin(w t)`` independently per period and
    returns ``hypot(a, b)``.
    """
    t = np.asarray(t_s, dtype=float)
    t = t - t.mean()
    y = np.asarray(values, dtype=float)
    y = y - y.mean()
    n = t.size
    periods_s = np.asarray(periods_s, dtype=float)
    out = np.empty(periods_s.size)
    for lo in range(0, periods_s.size, block):
        w = 2.0 * np.pi / periods_s[lo:lo + block]
        arg = np.outer(w, t)
        c, s = np.cos(arg), np.sin(arg)
        sc, ss = c.sum(1), s.sum(1)
        # normal equations of [1, cos, sin] with the constant eliminated
        cc = (c * c).sum(1) - sc * sc / n
        sn = (s * s).sum(1) - ss * ss / n
        cs = (c * s).sum(1) - sc * ss / n
        yc, ys = c @ y, s @ y
        det = cc * sn - cs * cs
        det = np.where(det > 0, det, np.inf)
        a = (yc * sn - ys * cs) / det
        b = (ys * cc - yc * cs) / det
        out[lo:lo + block] = np.hypot(a, b)
    return out


def local_maxima(values) -> np.ndarray:
    """Indices of interior local maxima (plateaus report their first sample)."""
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return np.zeros(0, dtype=int)
    mid = v[1:-1]
    return np.flatnonzero((mid > v[:-2]) & (mid >= v[2:])) + 1


@dataclass
class Periodogram:
    periods_s: np.ndarray
    amplitude: np.ndarray


def _exclude(series: DecimatedSeries, exclude) -> DecimatedSeries:
    if not exclude:
        return series
    keep = np.ones(len(series), dtype=bool)
    for lo, hi in exclude:
        keep &= ~((series.t_s >= lo) & (series.t_s <= hi))
    return series.select(keep)


def periodogram(series: DecimatedSeries, min_period_s: float = DEFAULT_MIN_PERIOD_S,
                max_period_s: float = DEFAULT_MAX_PERIOD_S, exclude=None,
                rel_step: float = 1e-3) -> Periodogram:
    series = _exclude(series, exclude)
    if len(series) < 4:
        raise SpanTooShort("fewer than 4 bins left for the periodogram")
    span = float(series.t_s[-1] - series.t_s[0])
    if span < 2.0 * max_period_s:
        raise SpanTooShort(
            f"series spans {span / 86400:.3f} d; periods up to {max_period_s / 86400:.3f} d "
            f"need at least {2 * max_period_s / 86400:.3f} d")
    periods = period_grid(min_period_s, max_period_s, rel_step)
    return Periodogram(periods, ls_amplitudes(series.t_s, series.value, periods))


def dominant_periods(series: DecimatedSeries, min_period_s: float = DEFAULT_MIN_PERIOD_S,
                     max_period_s: float = DEFAULT_MAX_PERIOD_S, exclude=None,
                     max_peaks: int = 10, rel_step: float = 1e-3):
    """
    Strongest periodicities from a least-squares periodogram.

    Trial periods are log-spaced with relative spacing ``rel_step`` (0.1% by
    default), which bounds the period resolution. Bins inside any
    ``(t_start, t_end)`` of ``exclude`` are ignored.

    Returns
    -------
    list of (period_s, amplitude)
        local maxima sorted by decreasing amplitude; empty for a constant series

    Raises
    ------
    SpanTooShort
        the remaining series spans less than ``2 * max_period_s``
    """
    pg = periodogram(series, min_period_s, max_period_s, exclude, rel_step)
    kept = _exclude(series, exclude).value
    spread = float(np.ptp(kept))
    if spread == 0.0:
        return []
    idx = local_maxima(pg.amplitude)
    idx = idx[pg.amplitude[idx] > 1e-9 * spread]
    idx = idx[np.argsort(pg.amplitude[idx])[::-1]][:max_peaks]
    return [(float(pg.periods_s[i]), float(pg.amplitude[i])) for i in idx]


def sliding_amplitude(series: DecimatedSeries, period_s: float = M2_PERIOD_S,
                      window_s: float = 86_400.0, step_s: float = 6 * 3600.0):
    """
    Amplitude of one sinusoid fitted in sliding windows (a tidal envelope).

    Only windows lying fully inside the series are evaluated.

    Returns
    -------
    t_center_s, amplitude: np.ndarray
    """
    t, y = series.t_s, series.value
    if len(series) < 4:
        return np.zeros(0), np.zeros(0)
    centers = np.arange(t[0] + window_s / 2, t[-1] - window_s / 2 + 1e-9, step_s)
    amps = np.full(centers.shape, np.nan)
    for k, c in enumerate(centers):
        m = (t >= c - window_s / 2) & (t <= c + window_s / 2)
        if m.sum() >= 4:
            amps[k] = ls_amplitudes(t[m], y[m], [period_s])[0]
    return centers, amps


def peak_envelope(series: DecimatedSeries):
    """
    Envelope of ``|value|`` sampled at its local maxima (one per tidal half cycle).

    Each peak is refined with a three-point parabola, so a smooth tidal
    series gives a ripple-free spring-neap envelope. Meant for model curves;
    on noisy data use ``sliding_amplitude``.

    Returns
    -------
    t_peak_s, amplitude: np.ndarray
    """
    a = np.abs(series.value)
    i = local_maxima(a)
    if i.size == 0:
        return np.zeros(0), np.zeros(0)
    y0, y1, y2 = a[i - 1], a[i], a[i + 1]
    curvature = y0 - 2.0 * y1 + y2
    safe = np.where(curvature < 0, curvature, -1.0)
    offset = np.where(curvature < 0, 0.5 * (y0 - y2) / safe, 0.0)
    # neighbouring bins bracket the true peak; interpolate time linearly between them
    t = series.t_s
    step = np.where(offset >= 0, t[i + 1] - t[i], t[i] - t[i - 1])
    return t[i] + offset * step, y1 - 0.25 * (y0 - y2) * offset


def boxcar_attenuation(period_s: float, window_s: float) -> float:
    """Relative amplitude loss of a sinusoid under a boxcar average of length ``window_s``."""
    return 1.0 - abs(float(np.sinc(window_s / period_s)))


def predicted_at_series(route: CableRoute, model: TideModel, start_utc_s: float,
                        duration_s: float, step_s: float = 10.0,
                        zero_fill: bool = False) -> DecimatedSeries:
    """AT sampled at the centers of ``step_s`` bins covering the recording."""
    n = int(math.floor(duration_s / step_s + 1e-9))
    t = (np.arange(n) + 0.5) * step_s
    at = AggregatedTide(route, model, zero_fill=zero_fill)(start_utc_s + t)
    return DecimatedSeries.from_samples(t, at, step_s)


@dataclass
class AnalysisReport:
    pearson_r: float | None
    trend: TrendFit
    dominant_periods_s: list
    semidiurnal_amplitude_deg: float | None
    window_s: float
    n_bins: int
    gain_deg_per_m_at: float | None = None
    mean_abs_detrended_deg: float | None = None
    mean_abs_at_m: float | None = None
    averaging_attenuation: float | None = None
    temperature_r: float | None = None
    envelope: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dominant_periods"] = [
            {"period_s": p, "period_h": p / 3600.0, "amplitude_deg": a}
            for p, a in self.dominant_periods_s]
        del d["dominant_periods_s"]
        return d


@dataclass
class AnalysisProducts:
    """Intermediate series kept for plotting."""

    binned: DecimatedSeries
    detrended: DecimatedSeries
    at: DecimatedSeries | None
    periodogram: Periodogram | None


def analyze(recording: RecordingSeries, predicted_at: DecimatedSeries | None,
            probe: ProbeSpec, route: CableRoute, window_s: float = DEFAULT_WINDOW_S,
            min_period_s: float = DEFAULT_MIN_PERIOD_S,
            max_period_s: float = DEFAULT_MAX_PERIOD_S, exclude=None,
            return_products: bool = False, binned: DecimatedSeries | None = None):
    """
    Run the full reduction of one recording against a predicted AT.

    Steps: block average, linear detrend (tilt in deg/s and strain/s),
    Pearson r between the detrended MPD and the AT averaged onto the same
    bins, least-squares periodogram of the detrended MPD, and a sliding
    semidiurnal envelope. A constant AT cannot be correlated; that case is
    recorded in ``notes`` and ``pearson_r`` is None. ``binned`` may carry a
    precomputed block average (streamed recordings).

    Returns
    -------
    AnalysisReport, or (AnalysisReport, AnalysisProducts) with ``return_products``
    """
    notes = []
    if binned is None:
        binned = block_average(recording, window_s)
    trend, detrended = linear_detrend(binned, probe, route.total_length_m)

    at_binned = None
    r = gain = mean_abs_at = None
    if predicted_at is not None:
        at_binned = predicted_at
        if predicted_at.bin_width_s < window_s * (1 - 1e-12):
            at_binned = block_average(predicted_at, window_s)
        mean_abs_at = float(np.mean(np.abs(at_binned.value)))
        try:
            r = pearson_correlation(detrended, at_binned)
            y = np.interp(detrended.t_s, at_binned.t_s, at_binned.value)
            gain = float(np.dot(y - y.mean(), detrended.value) / np.dot(y - y.mean(), y - y.mean()))
        except (ZeroVariance, GridMismatch) as exc:
            notes.append(f"correlation undefined: {type(exc).__name__}: {exc}")
    else:
        notes.append("no predicted AT supplied; correlation skipped")

    pg = periodogram(detrended, min_period_s, max_period_s, exclude)
    peaks = dominant_periods(detrended, min_period_s, max_period_s, exclude)
    semi = [(p, a) for p, a in peaks if SEMIDIURNAL_BAND_S[0] <= p <= SEMIDIURNAL_BAND_S[1]]
    semidiurnal = semi[0][1] if semi else None
    if not semi:
        notes.append("no semidiurnal peak between 11 h and 13.5 h")

    temperature_r = None
    if recording is not None and recording.temperature_c is not None:
        acc = BlockAccumulator(window_s, window_s * recording.sample_rate_hz)
        acc.add(recording.t_s, recording.temperature_c)
        try:
            temperature_r = pearson_correlation(detrended, acc.finalize())
            notes.append(f"temperature vs detrended MPD r = {temperature_r:.3f}")
        except (ZeroVariance, GridMismatch) as exc:
            notes.append(f"temperature correlation undefined: {exc}")

    centers, env = sliding_amplitude(detrended)
    report = AnalysisReport(
        pearson_r=r, trend=trend, dominant_periods_s=peaks,
        semidiurnal_amplitude_deg=semidiurnal, window_s=window_s, n_bins=len(binned),
        gain_deg_per_m_at=gain,
        mean_abs_detrended_deg=float(np.mean(np.abs(detrended.value))),
        mean_abs_at_m=mean_abs_at,
        averaging_attenuation=boxcar_attenuation(M2_PERIOD_S, window_s),
        temperature_r=temperature_r,
        envelope={"period_s": M2_PERIOD_S, "t_s": centers.tolist(),
                  "amplitude_deg": [None if np.isnan(a) else float(a) for a in env]},
        notes=notes)
    if return_products:
        return report, AnalysisProducts(binned, detrended, at_binned, pg)
    return report
