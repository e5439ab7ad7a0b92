import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cabletide.analysis import phase_to_length
from cabletide.elastic import (MATERIALS, PressureModel, ProbeSpec, RouteLengthChange, TubeSpec,
                               hydrostatic_pressure_delta, phase_from_path_change,
                               poisson_length_change, poisson_unit_strain, route_length_change)
from cabletide.errors import NonPositiveLength
from cabletide.tide import AggregatedTide, EquilibriumParams, UniformField, aggregated_tide

# hand arithmetic: 2 * 0.3 / 200e9 * 16 / (16 - 6.76) * 830
STEEL_STRAIN_830 = 4.311688311688312e-09
STEEL_DL_830 = 0.04484155844155844
# 2 * 0.45 / 0.8e9 * 72.25 / (72.25 - 21.16) * 830 * 10.4e6
HDPE_DL_830 = 13.73301526717557

tubes = st.builds(
    TubeSpec,
    young_modulus_pa=st.floats(1e8, 1e12),
    poisson_ratio=st.floats(0.01, 0.5),
    r_outer_m=st.floats(1e-3, 2e-2),
    r_inner_m=st.just(0.0) | st.floats(1e-5, 0.9e-3),
    coupling=st.floats(0.1, 1.0),
)


class TestHydrostatic:
    def test_examples(self, pm):
        assert hydrostatic_pressure_delta(0.0, pm) == 0.0
        assert hydrostatic_pressure_delta(0.085, pm) == pytest.approx(830.0, abs=0.5)
        assert hydrostatic_pressure_delta(0.085, pm) == pytest.approx(830.025, abs=1e-9)
        assert hydrostatic_pressure_delta(-0.085, pm) == -hydrostatic_pressure_delta(0.085, pm)

    def test_rejects_non_positive_rho_g(self):
        with pytest.raises(ValueError):
            PressureModel(0.0)


class TestTubeSpec:
    @pytest.mark.parametrize("kw", [
        dict(young_modulus_pa=0),
        dict(poisson_ratio=0),
        dict(poisson_ratio=0.51),
        dict(r_inner_m=4e-3),
        dict(r_inner_m=-1e-3),
        dict(r_outer_m=0, r_inner_m=0),
        dict(coupling=1.1),
    ])
    def test_invariants(self, kw):
        base = dict(young_modulus_pa=200e9, poisson_ratio=0.3, r_outer_m=4e-3, r_inner_m=2.6e-3)
        base.update(kw)
        with pytest.raises(ValueError):
            TubeSpec(**base)

    def test_presets(self):
        s, h = MATERIALS["steel"], MATERIALS["hdpe"]
        assert (s.young_modulus_pa, s.poisson_ratio, s.r_outer_m, s.r_inner_m) == (
            200e9, 0.3, 4e-3, 2.6e-3)
        assert (h.young_modulus_pa, h.poisson_ratio, h.r_outer_m, h.r_inner_m) == (
            0.8e9, 0.45, 8.5e-3, 4.6e-3)
        assert s.coupling == h.coupling == 1.0


class TestStrain:
    def test_steel(self, steel):
        eps = poisson_unit_strain(steel, 830.0)
        assert eps == pytest.approx(4.312e-9, abs=1e-12)
        assert eps == pytest.approx(STEEL_STRAIN_830, rel=1e-14)
        assert 1e-9 <= eps <= 1e-8

    def test_solid_cylinder(self):
        t = TubeSpec(200e9, 0.3, 4e-3, 0.0)
        assert t.geometric_factor == 1.0
        assert poisson_unit_strain(t, 830.0) == 2 * 0.3 / 200e9 * 830.0

    def test_zero(self, steel):
        assert poisson_unit_strain(steel, 0.0) == 0.0

    def test_coupling_scales(self, steel):
        half = TubeSpec(200e9, 0.3, 4e-3, 2.6e-3, coupling=0.5)
        assert poisson_unit_strain(half, 830.0) == pytest.approx(STEEL_STRAIN_830 / 2, rel=1e-14)
        zero = TubeSpec(200e9, 0.3, 4e-3, 2.6e-3, coupling=0.0)
        assert poisson_unit_strain(zero, 830.0) == 0.0

    @given(tubes, st.floats(-1e4, 1e4), st.floats(-10, 10))
    def test_linear_in_pressure(self, tube, dP, alpha):
        assert poisson_unit_strain(tube, alpha * dP) == pytest.approx(
            alpha * poisson_unit_strain(tube, dP), rel=1e-12, abs=1e-300)

    @given(tubes)
    def test_geometric_factor(self, tube):
        if tube.r_inner_m > 0:
            assert tube.geometric_factor > 1.0
        else:
            assert tube.geometric_factor == 1.0

    @given(tubes, st.floats(1, 1e4))
    def test_monotonic(self, tube, dP):
        base = poisson_length_change(tube, dP, 1e6)
        kw = dict(young_modulus_pa=tube.young_modulus_pa, poisson_ratio=tube.poisson_ratio,
                  r_outer_m=tube.r_outer_m, r_inner_m=tube.r_inner_m, coupling=tube.coupling)
        stiffer = TubeSpec(**{**kw, "young_modulus_pa": tube.young_modulus_pa * 1.5})
        assert poisson_length_change(stiffer, dP, 1e6) < base
        if tube.poisson_ratio < 0.49:
            softer_nu = TubeSpec(**{**kw, "poisson_ratio": tube.poisson_ratio + 0.01})
            assert poisson_length_change(softer_nu, dP, 1e6) > base
        assert poisson_length_change(tube, dP * 1.01, 1e6) > base


class TestLengthChange:
    def test_steel_row(self, steel):
        dl = poisson_length_change(steel, 830.0, 10.4e6)
        assert dl == pytest.approx(STEEL_DL_830, rel=1e-14)
        assert dl == pytest.approx(0.045, abs=0.001)

    def test_hdpe_row(self):
        dl = poisson_length_change(MATERIALS["hdpe"], 830.0, 10.4e6)
        assert dl == pytest.approx(HDPE_DL_830, rel=1e-14)
        assert dl == pytest.approx(13.73, abs=0.005)

    def test_doubling_length(self, steel):
        assert poisson_length_change(steel, 830.0, 20.8e6) == 2 * poisson_length_change(
            steel, 830.0, 10.4e6)

    @pytest.mark.parametrize("L0", [0.0, -1.0])
    def test_non_positive_length(self, steel, L0):
        with pytest.raises(NonPositiveLength):
            poisson_length_change(steel, 830.0, L0)


class TestRoute:
    def test_uniform(self, pacific_route, steel, pm):
        dl = route_length_change(pacific_route, UniformField(0.085), steel, pm, 0.0)
        # 0.085 m * 9765 = 830.025 Pa, not exactly 830
        expected = STEEL_DL_830 * 830.025 / 830.0
        assert dl == pytest.approx(expected, rel=1e-12)
        assert dl == pytest.approx(0.0449, abs=1e-4)

    def test_zero_field(self, pacific_route, steel, pm):
        assert route_length_change(pacific_route, UniformField(0.0), steel, pm, 0.0) == 0.0

    def test_cancellation(self, cancellation_setup, steel, pm):
        route, grid, _ = cancellation_setup
        for t in np.linspace(0, 2e5, 11):
            assert route_length_change(route, grid, steel, pm, t) == 0.0
            assert RouteLengthChange(route, grid, steel, pm)(t) == 0.0

    def test_matches_closed_form(self, pacific_route, steel, pm):
        p = EquilibriumParams()
        rng = np.random.default_rng(5)
        fast = RouteLengthChange(pacific_route, p, steel, pm)
        for t in rng.uniform(p.epoch_utc_s, p.epoch_utc_s + 30 * 86400, 20):
            at = aggregated_tide(pacific_route, p, t)
            closed = poisson_length_change(steel, hydrostatic_pressure_delta(at, pm),
                                           pacific_route.total_length_m)
            assert route_length_change(pacific_route, p, steel, pm, t) == pytest.approx(
                closed, rel=1e-12)
            assert float(fast(t)) == pytest.approx(closed, rel=1e-12, abs=1e-18)

    def test_series_shape(self, pacific_route, steel, pm):
        f = RouteLengthChange(pacific_route, EquilibriumParams(), steel, pm)
        assert isinstance(f.at, AggregatedTide)
        assert f(np.zeros(7)).shape == (7,)


class TestPhase:
    def test_wavelength(self, probe):
        assert probe.rf_wavelength_m == 10.0

    def test_examples(self, probe):
        assert phase_from_path_change(0.045, probe) == pytest.approx(3.24, abs=1e-12)
        assert phase_from_path_change(0.0, probe) == 0.0
        assert phase_from_path_change(5.0, probe) == 360.0
        assert phase_from_path_change(-0.045, probe) == -phase_from_path_change(0.045, probe)

    def test_chain_from_uniform_tide(self, pacific_route, steel, pm, probe):
        dl = route_length_change(pacific_route, UniformField(0.085), steel, pm, 0.0)
        assert phase_from_path_change(dl, probe) == pytest.approx(3.2286894545, abs=1e-9)

    def test_strain_optic_factor(self):
        p = ProbeSpec(strain_optic_factor=0.2)
        assert phase_from_path_change(5.0, p) == pytest.approx(288.0, rel=1e-14)
        with pytest.raises(ValueError):
            ProbeSpec(strain_optic_factor=1.0)

    @given(st.floats(-100, 100), st.floats(1e6, 1e9))
    def test_round_trip(self, dl, f):
        probe = ProbeSpec(rf_freq_hz=f)
        assert phase_to_length(phase_from_path_change(dl, probe), probe) == pytest.approx(
            dl, rel=1e-12, abs=1e-300)

    def test_probe_validation(self):
        with pytest.raises(ValueError):
            ProbeSpec(rf_freq_hz=0)
        with pytest.raises(ValueError):
            ProbeSpec(group_velocity_m_per_s=-1)
