"""
Sea-surface elevation models and the aggregated tide along a cable route.

Three interchangeable models are supported:

* ``EquilibriumParams``: two-bulge equilibrium tide from the Moon and the Sun
  on a water-covered sphere. Spring tides occur when the bulges line up.
* ``ConstituentGrid``: gridded harmonic constituents (amplitude and Greenwich
  phase per cell), evaluated by bilinear interpolation.
* ``UniformField``: the same elevation everywhere, constant or a single
  cosine in time. Used for tests and steady-state tables.

The aggregated tide (AT) is the length-weighted mean elevation over the route
segments. All three models are sums of sinusoids in time, so the AT over a
fixed route collapses to a short list of complex coefficients, which makes
long, densely sampled series cheap (see ``AggregatedTide``).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from cabletide.errors import (DimensionMismatch, MissingCell, NegativeAmplitude, OutOfGrid,
                              ParseError)
from cabletide.georoute import CableRoute, GeoPoint
from cabletide.timeutil import format_utc, parse_utc

# standard Doodson-derived speeds, degrees per mean solar hour
CONSTITUENT_SPEEDS = {
    "M2": 28.9841042,
    "S2": 30.0,
    "K1": 15.0410686,
    "O1": 13.9430356,
}

# new moon of 2020-02-23 15:32 UTC: lunar and solar bulges aligned (spring)
SPRING_EPOCH_2020_02 = 1582471920.0

# cell-index slack for points sitting on a grid edge
_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class EquilibriumParams:
    """
    Equilibrium (two-bulge) tide.

    Each body raises two bulges whose longitude advances uniformly, so the
    local elevation is semidiurnal with period ``*_semidiurnal_period_s``.
    The bulges are at ``*_phase0_rad`` east longitude at ``epoch_utc_s``.
    """

    lunar_amp_m: float = 0.24
    solar_amp_m: float = 0.11
    lunar_semidiurnal_period_s: float = 44_714.16
    solar_semidiurnal_period_s: float = 43_200.0
    lunar_phase0_rad: float = 0.0
    solar_phase0_rad: float = 0.0
    epoch_utc_s: float = SPRING_EPOCH_2020_02

    def __post_init__(self):
        if self.lunar_amp_m < 0 or self.solar_amp_m < 0:
            raise ValueError("equilibrium amplitudes must be >= 0")
        if self.lunar_semidiurnal_period_s <= 0 or self.solar_semidiurnal_period_s <= 0:
            raise ValueError("equilibrium periods must be > 0")

    @property
    def spring_neap_period_s(self) -> float:
        """Beat period between lunar and solar semidiurnal terms (spring to spring)."""
        return 1.0 / abs(1.0 / self.solar_semidiurnal_period_s
                         - 1.0 / self.lunar_semidiurnal_period_s)

    def _terms(self):
        return ((self.lunar_amp_m, self.lunar_semidiurnal_period_s, self.lunar_phase0_rad),
                (self.solar_amp_m, self.solar_semidiurnal_period_s, self.solar_phase0_rad))


@dataclass(frozen=True)
class UniformField:
    """Spatially uniform elevation ``elevation_m * cos(2 pi (t - epoch) / period_s + phase_rad)``.

    With ``period_s=None`` the field is the constant ``elevation_m``.
    """

    elevation_m: float = 0.0
    period_s: float | None = None
    phase_rad: float = 0.0
    epoch_utc_s: float = 0.0

    def __post_init__(self):
        if self.period_s is not None and self.period_s <= 0:
            raise ValueError("period_s must be > 0")


@dataclass(frozen=True)
class TideConstituent:
    name: str
    speed_deg_per_hour: float

    def __post_init__(self):
        if not self.speed_deg_per_hour > 0:
            raise ValueError(f"constituent {self.name}: speed must be > 0")

    @property
    def omega_rad_per_s(self) -> float:
        return math.radians(self.speed_deg_per_hour) / 3600.0

    @property
    def period_s(self) -> float:
        return 360.0 / self.speed_deg_per_hour * 3600.0


@dataclass(frozen=True)
class ConstituentGrid:
    """
    Harmonic constituents on a regular lat/lon grid.

    ``amplitude_m`` and ``phase_deg`` have shape ``(n_constituents, nlat, nlon)``;
    row ``i`` is latitude ``lat0_deg + i * dlat_deg`` and column ``j`` is
    longitude ``lon0_deg + j * dlon_deg`` (may run past 180). Land cells are NaN
    in both arrays. Elevation is ``sum A cos(omega (t - epoch) - g)``.
    """

    lat0_deg: float
    lon0_deg: float
    dlat_deg: float
    dlon_deg: float
    nlat: int
    nlon: int
    constituents: tuple[TideConstituent, ...]
    amplitude_m: np.ndarray = field(repr=False)
    phase_deg: np.ndarray = field(repr=False)
    epoch_utc_s: float = 0.0
    # in-phase / quadrature components A cos g, A sin g
    _inphase: np.ndarray = field(init=False, repr=False, compare=False)
    _quadrature: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        amp = np.array(self.amplitude_m, dtype=float)
        pha = np.array(self.phase_deg, dtype=float)
        shape = (len(self.constituents), self.nlat, self.nlon)
        if amp.shape != shape or pha.shape != shape:
            raise DimensionMismatch(
                f"expected arrays of shape {shape}, got {amp.shape} and {pha.shape}")
        if self.nlat < 2 or self.nlon < 2:
            raise DimensionMismatch("grid needs at least 2x2 cells")
        if not (self.dlat_deg > 0 and self.dlon_deg > 0):
            raise ValueError("grid cell size must be > 0")
        if not np.array_equal(np.isnan(amp), np.isnan(pha)):
            raise DimensionMismatch("amplitude and phase land masks differ")
        if np.any(amp < 0):
            raise NegativeAmplitude("constituent amplitudes must be >= 0")
        names = [c.name for c in self.constituents]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate constituent names in {names}")
        pha = np.mod(pha, 360.0)
        cos_g, sin_g = _cos_sin_deg(pha)
        for name, arr in (("amplitude_m", amp), ("phase_deg", pha),
                          ("_inphase", amp * cos_g), ("_quadrature", amp * sin_g)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def is_global(self) -> bool:
        return abs(self.nlon * self.dlon_deg - 360.0) < 1e-9

    def _cell_coordinates(self, lat_deg, lon_deg):
        """Fractional (row, col) positions and a validity mask."""
        y = (np.asarray(lat_deg, dtype=float) - self.lat0_deg) / self.dlat_deg
        x = np.mod(np.asarray(lon_deg, dtype=float) - self.lon0_deg, 360.0) / self.dlon_deg
        ncol = 360.0 / self.dlon_deg
        # a point a hair west of lon0 wraps to the far end of the circle
        x = np.where(ncol - x < _EDGE_TOL, 0.0, x)
        y = np.where((y < 0) & (y > -_EDGE_TOL), 0.0, y)
        y = np.where((y > self.nlat - 1) & (y < self.nlat - 1 + _EDGE_TOL), self.nlat - 1, y)
        xmax = self.nlon if self.is_global else self.nlon - 1 + _EDGE_TOL
        inside = (y >= 0) & (y <= self.nlat - 1) & (x >= 0) & (x <= xmax)
        return y, x, inside

    def interpolate_components(self, lat_deg, lon_deg):
        """
        Bilinearly interpolate ``A cos g`` and ``A sin g`` at the given points.

        Returns
        -------
        inphase, quadrature: np.ndarray
            shape ``(n_constituents, n_points)``; NaN where unavailable
        status: np.ndarray
            0 valid, 1 outside the grid, 2 touches a land cell
        """
        lat = np.atleast_1d(np.asarray(lat_deg, dtype=float))
        lon = np.atleast_1d(np.asarray(lon_deg, dtype=float))
        y, x, inside = self._cell_coordinates(lat, lon)
        y = np.where(inside, y, 0.0)
        x = np.where(inside, x, 0.0)
        i0 = np.minimum(np.floor(y).astype(int), self.nlat - 2)
        fy = y - i0
        if self.is_global:
            j0 = np.minimum(np.floor(x).astype(int), self.nlon - 1)
            j1 = (j0 + 1) % self.nlon
        else:
            j0 = np.minimum(np.floor(x).astype(int), self.nlon - 2)
            j1 = j0 + 1
        fx = x - j0

        def bilinear(arr):
            # difference form: exact wherever the four corners are equal
            a00, a01 = arr[:, i0, j0], arr[:, i0, j1]
            a10, a11 = arr[:, i0 + 1, j0], arr[:, i0 + 1, j1]
            return (a00 + fx * (a01 - a00) + fy * (a10 - a00)
                    + fx * fy * (a11 - a10 - a01 + a00))

        p = bilinear(self._inphase)
        q = bilinear(self._quadrature)
        land = np.isnan(p).any(axis=0) | np.isnan(q).any(axis=0)
        status = np.where(~inside, 1, np.where(land, 2, 0))
        bad = status != 0
        p[:, bad] = np.nan
        q[:, bad] = np.nan
        return p, q, status


TideModel = Union[EquilibriumParams, ConstituentGrid, UniformField]


def _cos_sin_deg(deg):
    """cos and sin of angles in degrees, exact at multiples of 90."""
    deg = np.asarray(deg, dtype=float)
    rad = np.radians(deg)
    c, s = np.cos(rad), np.sin(rad)
    quarter = np.mod(deg, 360.0) / 90.0
    exact = quarter == np.round(quarter)
    k = np.where(exact, np.round(quarter), 0).astype(int) % 4
    c = np.where(exact, np.array([1.0, 0.0, -1.0, 0.0])[k], c)
    s = np.where(exact, np.array([0.0, 1.0, 0.0, -1.0])[k], s)
    return c, s


def _weighted_sum(values, weights) -> float:
    # fsum keeps mirrored +h/-h contributions cancelling to exactly zero
    return math.fsum((np.asarray(values) * np.asarray(weights)).tolist())


def equilibrium_elevation(p: EquilibriumParams, at: GeoPoint, t: float) -> float:
    """Elevation (m) of the equilibrium tide at a point and UTC time."""
    return float(_equilibrium_points(p, np.array([at.lat_deg]), np.array([at.lon_deg]), t)[0])


def _equilibrium_points(p, lat_deg, lon_deg, t):
    lam = np.radians(lon_deg)
    total = np.zeros_like(lam)
    for amp, period, phase0 in p._terms():
        bulge = phase0 + 2.0 * math.pi * (t - p.epoch_utc_s) / (2.0 * period)
        total = total + amp * np.cos(2.0 * (lam - bulge))
    return np.cos(np.radians(lat_deg)) ** 2 * total


def harmonic_elevation(g: ConstituentGrid, at: GeoPoint, t: float) -> float:
    """
    Harmonic synthesis of a gridded constituent model at one point.

    Parameters
    ----------
    g: ConstituentGrid
    at: GeoPoint
        must lie inside the grid with four ocean corner cells
    t: float
        UTC seconds

    Returns
    -------
    float
        elevation above mean sea level in meters

    Raises
    ------
    OutOfGrid, MissingCell
    """
    p, q, status = g.interpolate_components([at.lat_deg], [at.lon_deg])
    _raise_for_status(status, [at.lat_deg], [at.lon_deg])
    phase = _constituent_omegas(g) * (t - g.epoch_utc_s)
    return float(np.sum(p[:, 0] * np.cos(phase) + q[:, 0] * np.sin(phase)))


def _constituent_omegas(g: ConstituentGrid) -> np.ndarray:
    return np.array([c.omega_rad_per_s for c in g.constituents])


def _raise_for_status(status, lat, lon):
    bad = np.flatnonzero(status)
    if bad.size == 0:
        return
    k = bad[0]
    where = f"({lat[k]:.4f}, {lon[k]:.4f})"
    if status[k] == 1:
        raise OutOfGrid(f"point {where} lies outside the constituent grid")
    raise MissingCell(f"point {where} touches a land (missing) grid cell")


def elevation(model: TideModel, at: GeoPoint, t: float) -> float:
    """Elevation (m) under any tide model."""
    return float(elevations(model, [at.lat_deg], [at.lon_deg], t)[0])


def elevations(model: TideModel, lat_deg, lon_deg, t: float, zero_fill: bool = False) -> np.ndarray:
    """Vectorised elevation at many points for one time."""
    lat = np.atleast_1d(np.asarray(lat_deg, dtype=float))
    lon = np.atleast_1d(np.asarray(lon_deg, dtype=float))
    if isinstance(model, EquilibriumParams):
        return _equilibrium_points(model, lat, lon, t)
    if isinstance(model, UniformField):
        return np.full(lat.shape, _uniform_value(model, t))
    if isinstance(model, ConstituentGrid):
        p, q, status = model.interpolate_components(lat, lon)
        if not zero_fill:
            _raise_for_status(status, lat, lon)
        phase = _constituent_omegas(model) * (t - model.epoch_utc_s)
        eta = np.cos(phase) @ p + np.sin(phase) @ q
        return np.where(status == 0, eta, 0.0)
    raise TypeError(f"unsupported tide model {type(model).__name__}")


def _uniform_value(model: UniformField, t):
    if model.period_s is None:
        return model.elevation_m + 0.0 * np.asarray(t, dtype=float)
    arg = 2.0 * math.pi * (np.asarray(t, dtype=float) - model.epoch_utc_s) / model.period_s
    return model.elevation_m * np.cos(arg + model.phase_rad)


def aggregated_tide(route: CableRoute, model: TideModel, t: float,
                    zero_fill: bool = False) -> float:
    """
    Length-normalised integral of elevation along the route at time ``t``.

    Evaluates the model at every segment midpoint. With ``zero_fill`` a
    midpoint on land or off the grid contributes 0 m instead of raising.
    """
    eta = elevations(model, route.mid_lat_deg, route.mid_lon_deg, t, zero_fill=zero_fill)
    lengths = route.lengths_m
    return _weighted_sum(eta, lengths) / math.fsum(lengths.tolist())


class AggregatedTide:
    """
    AT of a fixed route and model as a closed-form sum of sinusoids.

    The route weights are folded into one complex coefficient per frequency
    so that ``AT(t) = Re sum_j c_j exp(i omega_j (t - epoch))``. Calling the
    object evaluates that sum for an array of UTC times.
    """

    def __init__(self, route: CableRoute, model: TideModel, zero_fill: bool = False):
        self.route = route
        self.model = model
        w = route.lengths_m / math.fsum(route.lengths_m.tolist())
        lat, lon = route.mid_lat_deg, route.mid_lon_deg
        if isinstance(model, EquilibriumParams):
            self.epoch_utc_s = model.epoch_utc_s
            geometry = np.cos(np.radians(lat)) ** 2 * w
            omegas, coefs = [], []
            for amp, period, phase0 in model._terms():
                rot = np.exp(-2j * (np.radians(lon) - phase0))
                omegas.append(2.0 * math.pi / period)
                coefs.append(amp * complex(_weighted_sum(rot.real, geometry),
                                           _weighted_sum(rot.imag, geometry)))
        elif isinstance(model, UniformField):
            self.epoch_utc_s = model.epoch_utc_s
            if model.period_s is None:
                omegas, coefs = [0.0], [model.elevation_m + 0j]
            else:
                omegas = [2.0 * math.pi / model.period_s]
                coefs = [model.elevation_m * np.exp(1j * model.phase_rad)]
        elif isinstance(model, ConstituentGrid):
            self.epoch_utc_s = model.epoch_utc_s
            p, q, status = model.interpolate_components(lat, lon)
            if not zero_fill:
                _raise_for_status(status, lat, lon)
            valid = status == 0
            p = np.where(valid, p, 0.0)
            q = np.where(valid, q, 0.0)
            omegas = list(_constituent_omegas(model))
            coefs = [complex(_weighted_sum(p[k], w), -_weighted_sum(q[k], w))
                     for k in range(p.shape[0])]
        else:
            raise TypeError(f"unsupported tide model {type(model).__name__}")
        self.omegas = np.array(omegas, dtype=float)
        self.coefficients = np.array(coefs, dtype=complex)

    def __call__(self, t) -> np.ndarray:
        dt = np.asarray(t, dtype=float) - self.epoch_utc_s
        out = np.zeros(np.shape(dt))
        for omega, c in zip(self.omegas, self.coefficients):
            arg = omega * dt
            out += c.real * np.cos(arg) - c.imag * np.sin(arg)
        return out

    @property
    def amplitude_bound_m(self) -> float:
        return float(np.abs(self.coefficients).sum())


def aggregated_tide_series(route: CableRoute, model: TideModel, times,
                           zero_fill: bool = False) -> np.ndarray:
    """AT at each UTC time in ``times``; same values as ``aggregated_tide`` per time."""
    return AggregatedTide(route, model, zero_fill=zero_fill)(times)


def spring_neap_times(p: EquilibriumParams, t_start: float, t_end: float):
    """
    UTC times of springs (bulges aligned) and neaps (in quadrature) in a window.

    Returns
    -------
    springs, neaps: np.ndarray
    """
    beat = p.spring_neap_period_s
    # relative bulge angle 2 (phi_s - phi_m) advances by 2 pi per beat period
    offset = 2.0 * (p.solar_phase0_rad - p.lunar_phase0_rad)
    rate_sign = 1.0 if p.lunar_semidiurnal_period_s > p.solar_semidiurnal_period_s else -1.0
    t_aligned = p.epoch_utc_s - rate_sign * offset / (2.0 * math.pi) * beat

    def occurrences(t_ref):
        k0 = math.ceil((t_start - t_ref) / beat)
        k1 = math.floor((t_end - t_ref) / beat)
        return t_ref + beat * np.arange(k0, k1 + 1)

    return occurrences(t_aligned), occurrences(t_aligned + beat / 2.0)


def _require(doc, key, kind):
    if key not in doc:
        raise ParseError(f"missing key {key!r}")
    value = doc[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"{key!r} must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"{key!r} must be an integer")
        return value
    if not isinstance(value, kind):
        raise ParseError(f"{key!r} has the wrong type")
    return value


def _matrix(rows, nlat, nlon, label):
    if not isinstance(rows, list) or len(rows) != nlat or any(
            not isinstance(r, list) or len(r) != nlon for r in rows):
        shape = (len(rows), len(rows[0]) if rows and isinstance(rows[0], list) else 0) \
            if isinstance(rows, list) else "non-list"
        raise DimensionMismatch(f"{label}: expected {nlat}x{nlon}, got {shape}")
    try:
        return np.array([[np.nan if v is None else float(v) for v in r] for r in rows])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{label}: non-numeric entry ({exc})") from exc


def load_constituent_grid(data) -> ConstituentGrid:
    """
    Parse and validate a constituent grid JSON document.

    ``data`` may be bytes or str. Land cells are ``null`` in both the amplitude
    and the phase arrays.

    Raises
    ------
    ParseError, DimensionMismatch, NegativeAmplitude
    """
    try:
        doc = json.loads(data)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("grid document must be a JSON object")
    nlat = _require(doc, "nlat", int)
    nlon = _require(doc, "nlon", int)
    if nlat < 2 or nlon < 2:
        raise DimensionMismatch(f"grid must be at least 2x2, got {nlat}x{nlon}")
    lat0, lon0 = _require(doc, "lat0_deg", float), _require(doc, "lon0_deg", float)
    dlat, dlon = _require(doc, "dlat_deg", float), _require(doc, "dlon_deg", float)
    if dlat <= 0 or dlon <= 0:
        raise ParseError("dlat_deg and dlon_deg must be > 0")
    try:
        epoch = parse_utc(_require(doc, "epoch_utc", str))
    except ValueError as exc:
        raise ParseError(f"bad epoch_utc: {exc}") from exc
    entries = _require(doc, "constituents", list)
    if not entries:
        raise ParseError("grid has no constituents")

    constituents, amps, phases = [], [], []
    for entry in entries:
        if not isinstance(entry, dict):
            raise ParseError("constituent entries must be objects")
        name = _require(entry, "name", str)
        speed = _require(entry, "speed_deg_per_hour", float)
        if speed <= 0:
            raise ParseError(f"{name}: speed_deg_per_hour must be > 0")
        amp = _matrix(_require(entry, "amplitude_m", list), nlat, nlon, f"{name} amplitude_m")
        pha = _matrix(_require(entry, "phase_deg", list), nlat, nlon, f"{name} phase_deg")
        if not np.array_equal(np.isnan(amp), np.isnan(pha)):
            raise DimensionMismatch(f"{name}: land cells differ between amplitude and phase")
        if np.any(amp < 0):
            raise NegativeAmplitude(f"{name}: negative amplitude")
        constituents.append(TideConstituent(name, speed))
        amps.append(amp)
        phases.append(pha)
    if len({c.name for c in constituents}) != len(constituents):
        raise ParseError("constituent names must be unique")
    return ConstituentGrid(lat0, lon0, dlat, dlon, nlat, nlon, tuple(constituents),
                           np.array(amps), np.array(phases), epoch)


def load_constituent_grid_file(path) -> ConstituentGrid:
    with open(path, "rb") as f:
        return load_constituent_grid(f.read())


def grid_to_json(g: ConstituentGrid) -> str:
    def rows(arr):
        return [[None if np.isnan(v) else float(v) for v in r] for r in arr]

    doc = {
        "lat0_deg": g.lat0_deg, "lon0_deg": g.lon0_deg,
        "dlat_deg": g.dlat_deg, "dlon_deg": g.dlon_deg,
        "nlat": g.nlat, "nlon": g.nlon,
        "epoch_utc": format_utc(g.epoch_utc_s),
        "constituents": [
            {"name": c.name, "speed_deg_per_hour": c.speed_deg_per_hour,
             "amplitude_m": rows(g.amplitude_m[k]), "phase_deg": rows(g.phase_deg[k])}
            for k, c in enumerate(g.constituents)
        ],
    }
    return json.dumps(doc)
