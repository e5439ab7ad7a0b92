"""
Pressure-induced cable elongation and the resulting probe phase.

A thick-walled tube under an external pressure increase dP contracts
radially and extends axially (Poisson effect). The axial strain of an
open-ended tube with Young modulus E, Poisson ratio nu and radii r_o > r_i is

    strain = 2 nu / E * r_o**2 / (r_o**2 - r_i**2) * dP

and the length change of a cable of length L0 is ``strain * L0``. The probe
travels the cable twice (looped back at the far end), so the optical path
changes by twice the one-way length change.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from cabletide.errors import NonPositiveLength
from cabletide.georoute import CableRoute
from cabletide.tide import AggregatedTide, TideModel, elevations

SPEED_OF_LIGHT_M_PER_S = 299_792_458.0


@dataclass(frozen=True)
class TubeSpec:
    """Effective elastic cylinder. ``coupling`` is the jacket-to-fiber strain transfer."""

    young_modulus_pa: float
    poisson_ratio: float
    r_outer_m: float
    r_inner_m: float
    coupling: float = 1.0

    def __post_init__(self):
        if not self.young_modulus_pa > 0:
            raise ValueError("young_modulus_pa must be > 0")
        if not 0 < self.poisson_ratio <= 0.5:
            raise ValueError("poisson_ratio must be in (0, 0.5]")
        if not self.r_outer_m > 0:
            raise ValueError("r_outer_m must be > 0")
        if not 0 <= self.r_inner_m < self.r_outer_m:
            raise ValueError("require 0 <= r_inner_m < r_outer_m")
        if not 0 <= self.coupling <= 1:
            raise ValueError("coupling must be in [0, 1]")

    @property
    def geometric_factor(self) -> float:
        ro2 = self.r_outer_m ** 2
        return ro2 / (ro2 - self.r_inner_m ** 2)

    @property
    def strain_per_pa(self) -> float:
        return (2.0 * self.poisson_ratio / self.young_modulus_pa
                * self.geometric_factor * self.coupling)


# bounding materials for a subsea cable cross-section: all steel wires or all HDPE jacket
MATERIALS = {
    "steel": TubeSpec(young_modulus_pa=200e9, poisson_ratio=0.3,
                      r_outer_m=4.0e-3, r_inner_m=2.6e-3),
    "hdpe": TubeSpec(young_modulus_pa=0.8e9, poisson_ratio=0.45,
                     r_outer_m=8.5e-3, r_inner_m=4.6e-3),
}


@dataclass(frozen=True)
class PressureModel:
    # 9765 Pa/m maps 8.5 cm of head to 830 Pa
    rho_g_pa_per_m: float = 9_765.0

    def __post_init__(self):
        if not self.rho_g_pa_per_m > 0:
            raise ValueError("rho_g_pa_per_m must be > 0")


@dataclass(frozen=True)
class ProbeSpec:
    """
    RF probe tone carried on the optical signal.

    ``strain_optic_factor`` optionally reduces the optical length change per
    unit mechanical elongation; 0 treats the group velocity as unaffected by
    strain.
    """

    rf_freq_hz: float = 20e6
    group_velocity_m_per_s: float = 2.0e8
    cd_ps_per_nm_km: float = 21.0
    carrier_wavelength_nm: float = 1550.0
    strain_optic_factor: float = 0.0

    def __post_init__(self):
        if not self.rf_freq_hz > 0:
            raise ValueError("rf_freq_hz must be > 0")
        if not self.group_velocity_m_per_s > 0:
            raise ValueError("group_velocity_m_per_s must be > 0")
        if not 0 <= self.strain_optic_factor < 1:
            raise ValueError("strain_optic_factor must be in [0, 1)")

    @property
    def rf_wavelength_m(self) -> float:
        return self.group_velocity_m_per_s / self.rf_freq_hz

    @property
    def deg_per_one_way_m(self) -> float:
        return 360.0 * 2.0 * (1.0 - self.strain_optic_factor) / self.rf_wavelength_m


def hydrostatic_pressure_delta(elevation_m, pm: PressureModel = PressureModel()):
    """Bottom-pressure change (Pa) from a sea-surface elevation change (m)."""
    return pm.rho_g_pa_per_m * elevation_m


def poisson_unit_strain(tube: TubeSpec, dP):
    """Axial strain of the tube under an external pressure increase ``dP`` (Pa)."""
    return tube.strain_per_pa * dP


def poisson_length_change(tube: TubeSpec, dP, L0_m: float):
    """
    One-way length change (m) of a cable of length ``L0_m`` under ``dP``.

    Raises
    ------
    NonPositiveLength
        if ``L0_m <= 0``
    """
    if not L0_m > 0:
        raise NonPositiveLength(f"cable length must be > 0, got {L0_m}")
    return poisson_unit_strain(tube, dP) * L0_m


def route_length_change(route: CableRoute, model: TideModel, tube: TubeSpec,
                        pm: PressureModel, t: float, zero_fill: bool = False) -> float:
    """Sum of per-segment Poisson elongations at time ``t`` (m, one way)."""
    eta = elevations(model, route.mid_lat_deg, route.mid_lon_deg, t, zero_fill=zero_fill)
    strain = poisson_unit_strain(tube, hydrostatic_pressure_delta(eta, pm))
    return math.fsum((strain * route.lengths_m).tolist())


class RouteLengthChange:
    """Closed-form length change series: strain per Pa times rho_g times AT times L."""

    def __init__(self, route: CableRoute, model: TideModel, tube: TubeSpec,
                 pm: PressureModel = PressureModel(), zero_fill: bool = False):
        self.at = AggregatedTide(route, model, zero_fill=zero_fill)
        self.meters_per_meter_of_tide = (tube.strain_per_pa * pm.rho_g_pa_per_m
                                         * math.fsum(route.lengths_m.tolist()))

    def __call__(self, t) -> np.ndarray:
        return self.meters_per_meter_of_tide * self.at(t)


def phase_from_path_change(dl_one_way_m, probe: ProbeSpec = ProbeSpec()):
    """Probe phase change (deg) for a one-way cable length change; the probe path is doubled."""
    return probe.deg_per_one_way_m * dl_one_way_m
