"""Link-budget and reflection-probability analysis for triangular-wave
roadside mmWave relay chains."""

from .antenna import DEFAULT_PATTERN, AntennaPattern, offset_between
from .calibration import (CalibratedSystem, CalibrationTargets, calibrate,
                          delta_to_interference_dbm)
from .geometry import (MitigationGeometry, Node, Topology, build_topology,
                       check_interference_free, clearance_deg,
                       min_interference_free_theta, mitigation_tilt)
from .link_budget import (LinkReport, RadioParams, db_to_linear,
                          evaluate_link, linear_to_db, link_rate_bps,
                          noise_power_dbm, path_db, power_sum_dbm,
                          received_power_dbm, sinr_db)
from .refl_prob import (ReflectionRegionParams, ReflectionStats, VehicleStats,
                        density_from_vehicle_count, height_window_fraction,
                        monte_carlo_reflection, reflection_probability,
                        region_area_mean, within_truncation_band)
from .secondary_fx import (MATERIAL_REFLECTION_DB, BuildingConfig, EffectKind,
                           EffectScenario, baseline_snr_db,
                           building_delta_db, building_interference_dbm,
                           building_unfolded_path, combined_delta_db,
                           interference_dbm, interference_offsets,
                           interferer_distance, material_reflection_db,
                           reconfigured_worst_case, scenario_delta_db,
                           sinr_delta_db)

__version__ = "0.1.0"

__all__ = [
    "AntennaPattern", "DEFAULT_PATTERN", "offset_between",
    "CalibratedSystem", "CalibrationTargets", "calibrate",
    "delta_to_interference_dbm",
    "MitigationGeometry", "Node", "Topology", "build_topology",
    "check_interference_free", "clearance_deg",
    "min_interference_free_theta", "mitigation_tilt",
    "LinkReport", "RadioParams", "db_to_linear", "evaluate_link",
    "linear_to_db", "link_rate_bps", "noise_power_dbm", "path_db",
    "power_sum_dbm", "received_power_dbm", "sinr_db",
    "ReflectionRegionParams", "ReflectionStats", "VehicleStats",
    "density_from_vehicle_count", "height_window_fraction",
    "monte_carlo_reflection", "reflection_probability", "region_area_mean",
    "within_truncation_band",
    "MATERIAL_REFLECTION_DB", "BuildingConfig", "EffectKind",
    "EffectScenario", "baseline_snr_db", "building_delta_db",
    "building_interference_dbm", "building_unfolded_path",
    "combined_delta_db", "interference_dbm", "interference_offsets",
    "interferer_distance", "material_reflection_db",
    "reconfigured_worst_case", "scenario_delta_db", "sinr_delta_db",
    "__version__",
]
