"""
Synthetic phase-meter recordings.

The simulated instrument measures the phase of a 20 MHz probe tone after a
round trip through the cable, relative to an ideal back-to-back reference.
The measured phase difference (MPD) is built from

* the tidal Poisson elongation of the cable,
* a slow linear shrinking (tilt) of the cable,
* the chromatic-dispersion delay caused by carrier wavelength drift, drawn
  once per hold interval (60 s) and held,
* transmitter-side synthesizer phase error and white per-sample phase noise.

Noise is drawn from fixed 65536-sample blocks keyed by (seed, stream, block),
so the output does not depend on how generation is chunked, and the noise
path never reads the physics path.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from cabletide.elastic import (SPEED_OF_LIGHT_M_PER_S, PressureModel, ProbeSpec,
                               RouteLengthChange, TubeSpec, phase_from_path_change)
from cabletide.errors import OverflowSamples, RecordingFormatError
from cabletide.georoute import CableRoute
from cabletide.tide import AggregatedTide, TideModel
from cabletide.timeutil import format_utc, parse_utc

RECORDING_START_2020 = parse_utc("2020-02-28T06:06:29Z")
MAX_SAMPLES = 2 ** 31
NOISE_BLOCK = 65_536
SCHEMA_VERSION = 1

# noise stream identifiers, part of the seed key
_STREAM_ECL, _STREAM_SYNTH, _STREAM_WHITE = 1, 2, 3


@dataclass(frozen=True)
class RecordingConfig:
    start_utc_s: float = RECORDING_START_2020
    duration_s: float = 12 * 86_400.0
    sample_rate_hz: float = 30.0
    rng_seed: int = 0

    def __post_init__(self):
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be > 0")
        if not self.duration_s > 0:
            raise ValueError("duration_s must be > 0")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise ValueError("rng_seed must be a non-negative 64-bit integer")
        if self.n_samples > MAX_SAMPLES:
            raise OverflowSamples(
                f"{self.n_samples} samples exceeds the limit of {MAX_SAMPLES}")

    @property
    def n_samples(self) -> int:
        # the relative nudge keeps e.g. 0.1 s * 30 Hz from flooring to 2
        return int(math.floor(self.duration_s * self.sample_rate_hz * (1 + 1e-12)))


@dataclass(frozen=True)
class StationTemperature:
    """Room temperature near the setup (deg C): A/C on-off cycling on top of a daily swing."""

    mean_c: float = 22.0
    cycle_amp_c: float = 0.3
    cycle_period_s: float = 1_800.0
    daily_amp_c: float = 0.5

    def __call__(self, t_s: np.ndarray) -> np.ndarray:
        t_s = np.asarray(t_s, dtype=float)
        square = np.sign(np.sin(2 * np.pi * t_s / self.cycle_period_s))
        daily = np.sin(2 * np.pi * t_s / 86_400.0)
        return self.mean_c + self.cycle_amp_c * square + self.daily_amp_c * daily


@dataclass(frozen=True)
class ArtifactModel:
    """Measurement artifacts injected on top of the tidal signal."""

    tilt_strain_per_s: float = -8e-14
    ecl_sigma_hz: float = 26e6
    ecl_hold_s: float = 60.0
    synth_phase_sigma_deg: float = 0.01
    # free parameter: raw per-sample noise is not known for the real meter
    white_phase_sigma_deg: float = 0.05
    # exogenous channel recorded alongside, never coupled into the MPD
    temperature_series: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        for name in ("ecl_sigma_hz", "synth_phase_sigma_deg", "white_phase_sigma_deg"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not self.ecl_hold_s > 0:
            raise ValueError("ecl_hold_s must be > 0")


NOISE_FREE = ArtifactModel(tilt_strain_per_s=0.0, ecl_sigma_hz=0.0,
                           synth_phase_sigma_deg=0.0, white_phase_sigma_deg=0.0)


@dataclass(frozen=True)
class PhaseRecord:
    t_s: float
    mpd_deg: float


@dataclass
class RecordingSeries:
    """
    A phase-meter recording held in memory.

    ``t_s`` is seconds since ``config.start_utc_s``. Ground truth arrays,
    when present, are the model one-way length change (tide plus tilt, m)
    and the aggregated tide (m) at each sample.
    """

    config: RecordingConfig
    t_s: np.ndarray
    mpd_deg: np.ndarray
    truth_dl_m: np.ndarray | None = None
    truth_at_m: np.ndarray | None = None
    temperature_c: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.t_s.shape != self.mpd_deg.shape:
            raise ValueError("t_s and mpd_deg differ in length")
        if self.t_s.size > 1 and not np.all(np.diff(self.t_s) > 0):
            raise ValueError("recording times must be strictly increasing")

    def __len__(self):
        return self.t_s.size

    def __iter__(self) -> Iterator[PhaseRecord]:
        for t, m in zip(self.t_s.tolist(), self.mpd_deg.tolist()):
            yield PhaseRecord(t, m)

    @property
    def records(self) -> list[PhaseRecord]:
        return list(self)

    @property
    def sample_rate_hz(self) -> float:
        return self.config.sample_rate_hz


@dataclass
class RecordingChunk:
    start_index: int
    t_s: np.ndarray
    mpd_deg: np.ndarray
    truth_dl_m: np.ndarray | None = None
    truth_at_m: np.ndarray | None = None
    temperature_c: np.ndarray | None = None


def cd_delay_from_wavelength_drift(d_nu_hz, probe: ProbeSpec, path_length_m: float):
    """
    Group-delay change (s) from a carrier frequency drift ``d_nu_hz``.

    ``path_length_m`` is the full optical path, i.e. twice the cable for a
    looped-back probe.
    """
    lam_m = probe.carrier_wavelength_nm * 1e-9
    d_lambda_nm = lam_m ** 2 * np.asarray(d_nu_hz, dtype=float) / SPEED_OF_LIGHT_M_PER_S * 1e9
    return probe.cd_ps_per_nm_km * 1e-12 * (path_length_m / 1e3) * d_lambda_nm


def _block_normals(seed: int, stream: int, i0: int, i1: int) -> np.ndarray:
    """Standard normals for sample indices [i0, i1) of one noise stream."""
    out = np.empty(i1 - i0)
    b0, b1 = i0 // NOISE_BLOCK, (i1 - 1) // NOISE_BLOCK
    pos = 0
    for b in range(b0, b1 + 1):
        block = np.random.default_rng([seed, stream, b]).standard_normal(NOISE_BLOCK)
        lo = max(i0, b * NOISE_BLOCK) - b * NOISE_BLOCK
        hi = min(i1, (b + 1) * NOISE_BLOCK) - b * NOISE_BLOCK
        out[pos:pos + hi - lo] = block[lo:hi]
        pos += hi - lo
    return out


class _NoiseSource:
    """Artifact phase (deg) as a pure function of sample index."""

    def __init__(self, rc: RecordingConfig, am: ArtifactModel, probe: ProbeSpec,
                 path_length_m: float):
        self.rc, self.am = rc, am
        n_holds = int(math.ceil(rc.duration_s / am.ecl_hold_s)) + 1
        draws = np.random.default_rng([rc.rng_seed, _STREAM_ECL]).standard_normal(n_holds)
        tau = cd_delay_from_wavelength_drift(am.ecl_sigma_hz * draws, probe, path_length_m)
        self.ecl_phase_deg = 360.0 * probe.rf_freq_hz * tau

    def __call__(self, i0: int, i1: int, t_s: np.ndarray) -> np.ndarray:
        am, seed = self.am, self.rc.rng_seed
        hold = np.floor(t_s / am.ecl_hold_s + 1e-9).astype(np.int64)
        noise = self.ecl_phase_deg[hold]
        if am.synth_phase_sigma_deg:
            noise = noise + am.synth_phase_sigma_deg * _block_normals(seed, _STREAM_SYNTH, i0, i1)
        if am.white_phase_sigma_deg:
            noise = noise + am.white_phase_sigma_deg * _block_normals(seed, _STREAM_WHITE, i0, i1)
        return noise


def iter_mpd_chunks(route: CableRoute, tide_model: TideModel, tube: TubeSpec,
                    pm: PressureModel, probe: ProbeSpec, rc: RecordingConfig,
                    am: ArtifactModel = ArtifactModel(), ground_truth: bool = False,
                    chunk_size: int = 16 * NOISE_BLOCK,
                    zero_fill: bool = False) -> Iterator[RecordingChunk]:
    """Generate a recording in consecutive chunks; memory use is bounded by ``chunk_size``."""
    n = rc.n_samples
    length = RouteLengthChange(route, tide_model, tube, pm, zero_fill=zero_fill)
    at_model: AggregatedTide = length.at
    L = float(route.lengths_m.sum())
    noise = _NoiseSource(rc, am, probe, 2.0 * L)
    for i0 in range(0, n, chunk_size):
        i1 = min(n, i0 + chunk_size)
        t = np.arange(i0, i1, dtype=float) / rc.sample_rate_hz
        t_utc = rc.start_utc_s + t
        dl = length(t_utc) + am.tilt_strain_per_s * t * L
        mpd = phase_from_path_change(dl, probe) + noise(i0, i1, t)
        chunk = RecordingChunk(i0, t, mpd)
        if ground_truth:
            chunk.truth_dl_m = dl
            chunk.truth_at_m = at_model(t_utc)
        if am.temperature_series is not None:
            chunk.temperature_c = np.asarray(am.temperature_series(t), dtype=float)
        yield chunk


def synthesize_mpd_series(route: CableRoute, tide_model: TideModel, tube: TubeSpec,
                          pm: PressureModel, probe: ProbeSpec, rc: RecordingConfig,
                          am: ArtifactModel = ArtifactModel(), ground_truth: bool = False,
                          zero_fill: bool = False) -> RecordingSeries:
    """
    Simulate a full phase-meter recording in memory.

    Parameters
    ----------
    route, tide_model, tube, pm, probe
        physical model of the cable and the probe
    rc: RecordingConfig
        timing and seed
    am: ArtifactModel
        tilt and noise inventory; ``NOISE_FREE`` gives the pure tidal signal
    ground_truth: bool
        also return the modelled length change and aggregated tide per sample

    Returns
    -------
    RecordingSeries
    """
    chunks = list(iter_mpd_chunks(route, tide_model, tube, pm, probe, rc, am,
                                  ground_truth=ground_truth, zero_fill=zero_fill))

    def cat(name):
        parts = [getattr(c, name) for c in chunks]
        if not parts or parts[0] is None:
            return None
        return np.concatenate(parts)

    return RecordingSeries(rc, cat("t_s"), cat("mpd_deg"), cat("truth_dl_m"),
                           cat("truth_at_m"), cat("temperature_c"),
                           metadata={"rf_freq_hz": probe.rf_freq_hz})


# --- recording files -------------------------------------------------------

def _header_lines(rc: RecordingConfig, probe: ProbeSpec, columns) -> str:
    meta = [("schema", SCHEMA_VERSION), ("start_utc", format_utc(rc.start_utc_s)),
            ("sample_rate_hz", repr(float(rc.sample_rate_hz))),
            ("rf_freq_hz", repr(float(probe.rf_freq_hz))), ("seed", rc.rng_seed),
            ("duration_s", repr(float(rc.duration_s)))]
    return "".join(f"# {k}={v}\n" for k, v in meta) + ",".join(columns) + "\n"


class RecordingWriter:
    """
    Stream chunks to a recording CSV.

    Every value is written with ``repr`` so that reading the file back yields
    bit-identical floats.
    """

    def __init__(self, stream: io.TextIOBase, rc: RecordingConfig, probe: ProbeSpec,
                 columns=("t_s", "mpd_deg")):
        self.stream = stream
        self.columns = tuple(columns)
        self.rows = 0
        stream.write(_header_lines(rc, probe, self.columns))

    _SOURCES = {"t_s": "t_s", "mpd_deg": "mpd_deg", "truth_dl_m": "truth_dl_m",
                "truth_at_m": "truth_at_m", "temp_c": "temperature_c"}

    def write(self, chunk: RecordingChunk) -> None:
        arrays = [getattr(chunk, self._SOURCES[c]) for c in self.columns]
        if any(a is None for a in arrays):
            missing = [c for c, a in zip(self.columns, arrays) if a is None]
            raise ValueError(f"chunk lacks columns {missing}")
        fmt = ",".join(["{!r}"] * len(arrays)) + "\n"
        self.stream.write("".join(fmt.format(*row) for row in zip(*(a.tolist() for a in arrays))))
        self.rows += arrays[0].size


def write_recording_csv(path, series: RecordingSeries, probe: ProbeSpec = ProbeSpec(),
                        columns=("t_s", "mpd_deg")) -> None:
    chunk = RecordingChunk(0, series.t_s, series.mpd_deg, series.truth_dl_m,
                           series.truth_at_m, series.temperature_c)
    with open(path, "w", encoding="ascii", newline="\n") as f:
        RecordingWriter(f, series.config, probe, columns).write(chunk)


_KNOWN_COLUMNS = ("t_s", "mpd_deg", "truth_dl_m", "truth_at_m", "temp_c")


def _scan_for_bad_line(lines, first_data_line, ncol):
    for offset, line in enumerate(lines):
        lineno = first_data_line + offset
        if not line.strip():
            raise RecordingFormatError("blank line inside data", lineno)
        fields = line.rstrip("\r\n").split(",")
        if len(fields) != ncol:
            raise RecordingFormatError(f"expected {ncol} fields, found {len(fields)}", lineno)
        for value in fields:
            try:
                x = float(value)
            except ValueError:
                raise RecordingFormatError(f"not a number: {value!r}", lineno) from None
            if not math.isfinite(x):
                raise RecordingFormatError(f"non-finite value {value!r}", lineno)
    return None


def read_recording_csv(path) -> RecordingSeries:
    """
    Parse a recording CSV written by ``RecordingWriter``.

    Raises
    ------
    RecordingFormatError
        with the offending 1-based line number where one can be identified
    """
    try:
        with open(path, "r", encoding="ascii") as f:
            text = f.read()
    except UnicodeDecodeError as exc:
        raise RecordingFormatError(f"not an ASCII text file: {exc}") from exc
    lines = text.splitlines(keepends=True)
    meta = {}
    k = 0
    while k < len(lines) and lines[k].startswith("#"):
        body = lines[k][1:].strip()
        if "=" not in body:
            raise RecordingFormatError(f"malformed header {body!r}", k + 1)
        key, value = body.split("=", 1)
        meta[key.strip()] = value.strip()
        k += 1
    if k >= len(lines):
        raise RecordingFormatError("missing column header", k + 1)
    columns = [c.strip() for c in lines[k].strip().split(",")]
    if columns[:2] != ["t_s", "mpd_deg"] or any(c not in _KNOWN_COLUMNS for c in columns):
        raise RecordingFormatError(f"unexpected columns {columns}", k + 1)
    header_line = k + 1
    try:
        start = parse_utc(meta["start_utc"])
        rate = float(meta["sample_rate_hz"])
        seed = int(meta.get("seed", 0))
    except (KeyError, ValueError) as exc:
        raise RecordingFormatError(f"incomplete header: {exc!r}") from exc
    if meta.get("schema", str(SCHEMA_VERSION)) != str(SCHEMA_VERSION):
        raise RecordingFormatError(f"unsupported schema {meta.get('schema')}")

    data_lines = lines[k + 1:]
    if not data_lines:
        raise RecordingFormatError("no data rows", header_line + 1)
    # loadtxt is fast; its messages are not line-accurate, so rescan on failure
    try:
        data = np.loadtxt(io.StringIO("".join(data_lines)), delimiter=",", ndmin=2,
                          dtype=float)
        if data.shape[1] != len(columns) or not np.all(np.isfinite(data)):
            raise ValueError
    except ValueError:
        _scan_for_bad_line(data_lines, header_line + 1, len(columns))
        raise RecordingFormatError("unparseable data rows") from None
    if not (data[-1:].size and text.endswith("\n")):
        # an unterminated final row is the usual signature of a truncated copy
        raise RecordingFormatError("file ends mid-row (truncated)", header_line + len(data_lines))

    cols = {name: data[:, j].copy() for j, name in enumerate(columns)}
    t = cols["t_s"]
    bad = np.flatnonzero(np.diff(t) <= 0)
    if bad.size:
        raise RecordingFormatError("t_s not strictly increasing", header_line + 2 + int(bad[0]))
    duration = float(meta.get("duration_s", t.size / rate))
    rc = RecordingConfig(start_utc_s=start, duration_s=duration, sample_rate_hz=rate,
                         rng_seed=seed)
    if t.size != rc.n_samples:
        raise RecordingFormatError(
            f"expected {rc.n_samples} rows for duration {duration} s, found {t.size} (truncated?)",
            header_line + t.size + 1)
    return RecordingSeries(rc, t, cols["mpd_deg"], cols.get("truth_dl_m"),
                           cols.get("truth_at_m"), cols.get("temp_c"),
                           metadata={"rf_freq_hz": float(meta.get("rf_freq_hz", "nan"))})
