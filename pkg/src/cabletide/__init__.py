"""Tide-induced length and latency variations of subsea cables."""

from cabletide.analysis import (AnalysisReport, DecimatedSeries, TrendFit, analyze,
                                block_average, dominant_periods, linear_detrend,
                                pearson_correlation, phase_to_length)
from cabletide.elastic import (MATERIALS, PressureModel, ProbeSpec, TubeSpec,
                               hydrostatic_pressure_delta, phase_from_path_change,
                               poisson_length_change, poisson_unit_strain, route_length_change)
from cabletide.georoute import (CableRoute, GeoPoint, RouteSegment, great_circle_distance,
                                interpolate_great_circle, sample_route)
from cabletide.instrument import (ArtifactModel, PhaseRecord, RecordingConfig, RecordingSeries,
                                  cd_delay_from_wavelength_drift, synthesize_mpd_series)
from cabletide.tide import (ConstituentGrid, EquilibriumParams, TideConstituent, UniformField,
                            aggregated_tide, equilibrium_elevation, harmonic_elevation,
                            load_constituent_grid)

__version__ = "0.1.0"
