"""
Great-circle cable routes on a spherical Earth.

A route is an ordered list of waypoints joined by minor great-circle arcs.
Each leg is cut into equal segments whose midpoints and lengths form the
quadrature used when integrating tide elevation along the cable.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cabletide.errors import AntipodalPoints, InvalidStep, ScalingOutOfRange

EARTH_RADIUS_M = 6_371_000.0
DEFAULT_STEP_M = 50_000.0
MAX_DECLARED_SCALE = 1.5

# sin(angle) below this means the arc between two points has no unique plane
_ANTIPODAL_TOL = 1e-9


def _normalize_lon(lon_deg: float) -> float:
    lon = math.fmod(lon_deg + 180.0, 360.0)
    if lon < 0.0:
        lon += 360.0
    lon -= 180.0
    # fmod can round 179.99999999999997 + 180 up to exactly 360
    return -180.0 if lon >= 180.0 else lon


@dataclass(frozen=True)
class GeoPoint:
    """Point on the sphere; longitude is wrapped to [-180, 180)."""

    lat_deg: float
    lon_deg: float

    def __post_init__(self):
        lat = float(self.lat_deg)
        if not -90.0 <= lat <= 90.0:
            raise ValueError(f"latitude {lat} outside [-90, 90]")
        lon = float(self.lon_deg)
        if not math.isfinite(lon):
            raise ValueError(f"longitude {lon} is not finite")
        object.__setattr__(self, "lat_deg", lat)
        object.__setattr__(self, "lon_deg", _normalize_lon(lon))

    def to_vector(self) -> np.ndarray:
        return _to_vector(self.lat_deg, self.lon_deg)

    @classmethod
    def from_vector(cls, v) -> GeoPoint:
        x, y, z = v / np.linalg.norm(v)
        return cls(math.degrees(math.asin(max(-1.0, min(1.0, z)))),
                   math.degrees(math.atan2(y, x)))


def _to_vector(lat_deg, lon_deg):
    lat = np.radians(lat_deg)
    lon = np.radians(lon_deg)
    return np.stack([np.cos(lat) * np.cos(lon),
                     np.cos(lat) * np.sin(lon),
                     np.sin(lat)], axis=-1)


def _central_angle(u: np.ndarray, v: np.ndarray) -> float:
    # atan2 form is well conditioned for both tiny and near-antipodal arcs
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))


@dataclass(frozen=True)
class RouteSegment:
    midpoint: GeoPoint
    length_m: float
    cumulative_start_m: float


@dataclass(frozen=True)
class CableRoute:
    """
    Sampled cable route.

    ``total_length_m`` equals ``declared_length_m`` when one was given (the
    deployed length used as L0), otherwise the geodesic length.
    """

    waypoints: tuple[GeoPoint, ...]
    segments: tuple[RouteSegment, ...]
    total_length_m: float
    geodesic_length_m: float
    declared_length_m: float | None = None
    name: str = ""
    # vectorised views of the segments, filled in __post_init__
    mid_lat_deg: np.ndarray = field(init=False, repr=False, compare=False)
    mid_lon_deg: np.ndarray = field(init=False, repr=False, compare=False)
    lengths_m: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name, values in (
            ("mid_lat_deg", [s.midpoint.lat_deg for s in self.segments]),
            ("mid_lon_deg", [s.midpoint.lon_deg for s in self.segments]),
            ("lengths_m", [s.length_m for s in self.segments]),
        ):
            arr = np.array(values, dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def scale_factor(self) -> float:
        return self.total_length_m / self.geodesic_length_m

    def __len__(self):
        return len(self.segments)


def great_circle_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Arc length in meters between two points on a sphere of radius 6371 km."""
    return EARTH_RADIUS_M * _central_angle(a.to_vector(), b.to_vector())


def _slerp(u, v, omega, f):
    """Spherical interpolation between unit vectors; ``f`` may be an array."""
    f = np.asarray(f, dtype=float)[..., None]
    if omega == 0.0:
        return np.broadcast_to(u, f.shape[:-1] + (3,)).copy()
    s = math.sin(omega)
    return (np.sin((1.0 - f) * omega) * u + np.sin(f * omega) * v) / s


def _check_not_antipodal(u, v, omega):
    if omega > math.pi / 2 and math.sin(omega) < _ANTIPODAL_TOL:
        raise AntipodalPoints("great-circle direction undefined between antipodal points")


def interpolate_great_circle(a: GeoPoint, b: GeoPoint, f: float) -> GeoPoint:
    """
    Point a fraction ``f`` of the way from ``a`` to ``b`` along the minor arc.

    Raises
    ------
    AntipodalPoints
        if ``a`` and ``b`` are antipodal, so the arc is not unique
    """
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fraction {f} outside [0, 1]")
    u, v = a.to_vector(), b.to_vector()
    omega = _central_angle(u, v)
    _check_not_antipodal(u, v, omega)
    if f == 0.0:
        return a
    if f == 1.0:
        return b
    return GeoPoint.from_vector(_slerp(u, v, omega, f))


def sample_route(waypoints, step_m: float = DEFAULT_STEP_M,
                 declared_length_m: float | None = None, name: str = "") -> CableRoute:
    """
    Split each leg of a waypoint path into ``ceil(leg / step_m)`` equal segments.

    Parameters
    ----------
    waypoints: sequence of GeoPoint
        at least two points; consecutive points must not be antipodal
    step_m: float
        maximum segment length along the geodesic
    declared_length_m: float, optional
        deployed cable length; every segment is stretched by
        ``declared / geodesic``, which must lie in [1, 1.5]

    Returns
    -------
    CableRoute
    """
    waypoints = tuple(waypoints)
    if len(waypoints) < 2:
        raise ValueError("a route needs at least two waypoints")
    if not step_m > 0:
        raise InvalidStep(f"step_m must be positive, got {step_m}")

    legs = []
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        u, v = a.to_vector(), b.to_vector()
        omega = _central_angle(u, v)
        _check_not_antipodal(u, v, omega)
        legs.append((u, v, omega, EARTH_RADIUS_M * omega))
    geodesic = sum(leg[3] for leg in legs)
    if geodesic <= 0.0:
        raise ValueError("route has zero length")

    scale = 1.0
    if declared_length_m is not None:
        scale = declared_length_m / geodesic
        # tolerate round-off when the declared length is the geodesic itself
        if not (1.0 - 1e-12 <= scale <= MAX_DECLARED_SCALE):
            raise ScalingOutOfRange(
                f"declared length {declared_length_m:.6g} m is {scale:.4f}x the "
                f"geodesic length {geodesic:.6g} m; allowed range is [1, {MAX_DECLARED_SCALE}]")

    segments = []
    cumulative = 0.0
    for u, v, omega, leg_len in legs:
        if leg_len == 0.0:
            continue
        n = max(1, math.ceil(leg_len / step_m))
        seg_len = leg_len * scale / n
        mids = _slerp(u, v, omega, (np.arange(n) + 0.5) / n)
        for m in mids:
            segments.append(RouteSegment(GeoPoint.from_vector(m), seg_len, cumulative))
            cumulative += seg_len

    total = geodesic * scale if declared_length_m is None else float(declared_length_m)
    return CableRoute(waypoints=waypoints, segments=tuple(segments), total_length_m=total,
                      geodesic_length_m=geodesic, declared_length_m=declared_length_m,
                      name=name)


def route_from_dict(doc: dict, step_m: float = DEFAULT_STEP_M) -> CableRoute:
    try:
        points = [GeoPoint(float(w["lat_deg"]), float(w["lon_deg"])) for w in doc["waypoints"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed route document: {exc!r}") from exc
    declared = doc.get("declared_length_m")
    return sample_route(points, step_m=step_m,
                        declared_length_m=None if declared is None else float(declared),
                        name=str(doc.get("name", "")))


def load_route(path, step_m: float = DEFAULT_STEP_M) -> CableRoute:
    """Read a route JSON file (``name``, ``waypoints``, optional ``declared_length_m``)."""
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    return route_from_dict(doc, step_m=step_m)


def default_route_path() -> Path:
    return Path(__file__).with_name("data") / "pacific_route.json"


def default_route(step_m: float = DEFAULT_STEP_M) -> CableRoute:
    """Illustrative Japan to US route with the 10.4 Mm one-way deployed length."""
    return load_route(default_route_path(), step_m=step_m)
