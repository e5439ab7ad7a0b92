"""Write the bundled North Pacific example constituent grid (synthetic, smooth)."""
import sys
from pathlib import Path

import numpy as np

from cabletide.tide import CONSTITUENT_SPEEDS, ConstituentGrid, TideConstituent, grid_to_json
from cabletide.timeutil import parse_utc

LAT0, LON0, D = 20.0, 128.0, 2.0
NLAT, NLON = 21, 62          # 20-60 N, 128-250 E

# (peak amplitude m, amphidrome lat, amphidrome lon, phase rotation sign)
PATTERNS = {
    "M2": (0.45, 30.0, 200.0, 1.0),
    "S2": (0.18, 32.0, 205.0, 1.0),
    "K1": (0.30, 52.0, 185.0, -1.0),
    "O1": (0.22, 50.0, 180.0, -1.0),
}


def build():
    lat = LAT0 + D * np.arange(NLAT)[:, None]
    lon = LON0 + D * np.arange(NLON)[None, :]
    amps, phases = [], []
    for name, (peak, alat, alon, sign) in PATTERNS.items():
        dy, dx = lat - alat, (lon - alon) * np.cos(np.radians(lat))
        dist = np.hypot(dx, dy)
        amps.append(peak * (1.0 - np.exp(-dist / 15.0)))
        phases.append(np.mod(sign * np.degrees(np.arctan2(dy, dx)), 360.0))
    amp, pha = np.array(amps), np.array(phases)
    # land: Japanese coast west of 131 E above 33 N, North America east of 246 E
    land = ((lon <= 130.0) & (lat >= 33.0)) | (lon >= 246.0)
    land = np.broadcast_to(land, amp.shape)
    amp[land] = np.nan
    pha[land] = np.nan
    constituents = tuple(TideConstituent(n, CONSTITUENT_SPEEDS[n]) for n in PATTERNS)
    return ConstituentGrid(LAT0, LON0, D, D, NLAT, NLON, constituents,
                           np.round(amp, 4), np.round(pha, 2),
                           parse_utc("2020-01-01T00:00:00Z"))


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "cabletide" / "data" / "example_grid.json")
    out.write_text(grid_to_json(build()) + "\n")
    print(f"wrote {out}")
