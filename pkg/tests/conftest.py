import json

import numpy as np
import pytest

from cabletide.elastic import MATERIALS, PressureModel, ProbeSpec
from cabletide.georoute import GeoPoint, default_route, sample_route
from cabletide.tide import ConstituentGrid, TideConstituent

_ACCEPTANCE = []


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        number, title = marker.args
        status = "PASS" if call.excinfo is None else "FAIL"
        _ACCEPTANCE.append((number, title, status, item.name))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, name in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}  [{name}]")


@pytest.fixture(scope="session")
def pacific_route():
    return default_route()


@pytest.fixture
def steel():
    return MATERIALS["steel"]


@pytest.fixture
def probe():
    return ProbeSpec()


@pytest.fixture
def pm():
    return PressureModel()


def make_grid(amplitude, phase, speeds=(("M2", 28.9841042),), lat0=-10.0, lon0=-10.0,
              d=10.0, epoch=0.0):
    """Grid from per-constituent 2-D arrays (or one array for a single constituent)."""
    amp = np.asarray(amplitude, dtype=float)
    pha = np.asarray(phase, dtype=float)
    if amp.ndim == 2:
        amp, pha = amp[None], pha[None]
    return ConstituentGrid(lat0, lon0, d, d, amp.shape[1], amp.shape[2],
                           tuple(TideConstituent(n, s) for n, s in speeds), amp, pha, epoch)


def grid_document(amplitude, phase, name="M2", speed=28.9841042, nlat=None, nlon=None):
    amplitude = [[None if v is None else v for v in row] for row in amplitude]
    return json.dumps({
        "lat0_deg": 0.0, "lon0_deg": 0.0, "dlat_deg": 1.0, "dlon_deg": 1.0,
        "nlat": nlat if nlat is not None else len(amplitude),
        "nlon": nlon if nlon is not None else len(amplitude[0]),
        "epoch_utc": "2020-01-01T00:00:00Z",
        "constituents": [{"name": name, "speed_deg_per_hour": speed,
                          "amplitude_m": amplitude, "phase_deg": phase}],
    })


@pytest.fixture
def cancellation_setup():
    """Equatorial route whose western half sees +h and eastern half -h at every instant."""
    h = 0.5
    # grid columns at -4.5 .. 4.5; the phase jump falls between -0.5 and 0.5,
    # a cell no segment midpoint uses
    lon = np.arange(-4.5, 5.0)
    amp = np.full((3, lon.size), h)
    pha = np.where(lon < 0, 0.0, 180.0)[None, :].repeat(3, axis=0)
    grid = make_grid(amp, pha, lat0=-1.0, lon0=-4.5, d=1.0)
    # 4 equal segments with midpoints near -2.25, -0.75 ... mirrored about lon 0
    route = sample_route([GeoPoint(0.0, -3.0), GeoPoint(0.0, 3.0)], step_m=170_000.0)
    return route, grid, h
