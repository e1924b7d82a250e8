"""climesh: greenhouse climate-sensing mesh network simulator and analyzer.

A deterministic discrete-event model of a grid of three-height
measurement stations in a plastic greenhouse, the lossy 2.4 GHz mesh
that collects their samples, and the daily record store. On top of the
stored data sit the thermal computations (mean radiant temperature,
vapour pressure, UV index) and the ISO 7726 homogeneity classification
of the environment.
"""

from .climate import (BasicParameters, GlobeSpec, RawReadings, UvSpectrum,
                      classify_uvi, erythemal_weighting,
                      forced_convection_coefficient, forced_radiant_temperature,
                      mean_radiant_temperature, natural_convection_coefficient,
                      natural_radiant_temperature, partial_vapour_pressure,
                      saturation_vapour_pressure, uvi_from_spectrum)
from .heterogeneity import (HeightLevel, HomogeneityVerdict, ParameterKind,
                            Snapshot, assess_horizontal, assess_vertical,
                            heterogeneity_intervals, homogeneity_limit,
                            weighted_vertical_mean)
from .field import (ClimateField, DayProfile, GreenhouseGeometry, GroundTruth,
                    StationSite, default_profiles, sample_field)
from .station import (ClimateSample, SensorSpec, Station, WindCalibration,
                      default_sensor_suite, read_sensor)
from .radio import (COLLECTOR_ID, DeliveryMap, LinkModel, Packet, PlantGrowth,
                    RadioEnvironment, RadioParams, RoutingTree,
                    compute_routing_tree, deliver, link_quality, route)
from .collector import Collector, PollSchedule
from .scenario import Scenario, load_scenario, scenario_from_dict
from .engine import RunSummary, SimulationEngine, run_scenario
from .analysis import AnalysisReport, analyze, radiant_envelope

__version__ = "0.1.0"
