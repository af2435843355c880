"""INI deployment descriptions: strict parsing into model objects.

A config file describes one deployment in up to six sections --
``[topology]``, ``[antenna]``, ``[radio]``, ``[traffic]``, ``[building]``,
``[experiment]``.  Parsing is strict: unknown sections or keys are errors,
and *all* problems found are reported together (path-style, e.g.
``radio.bandwidth_mhz: not a number``) instead of failing one at a time.

Two presets ship with the package: ``paper_baseline`` (the reference
deployment most of the documentation discusses) and ``building_worstcase``
(a narrow road lined with close reflective facades).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .antenna import DEFAULT_PATTERN, AntennaPattern
from .calibration import CalibratedSystem, CalibrationTargets, calibrate
from .geometry import Topology, build_topology
from .link_budget import RadioParams
from .refl_prob import (ReflectionRegionParams, VehicleStats,
                        density_from_vehicle_count)
from .secondary_fx import BuildingConfig, material_reflection_db


class ConfigError(ValueError):
    """All problems found in one config file, newline-joined."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}

_SECTION_KEYS = {
    "topology": {"node_count", "spacing_d0", "theta_deg", "road_width",
                 "height_a", "height_b"},
    "antenna": {"beamwidth_deg", "main_gain_dbi", "side_gain_dbi"},
    "radio": {"tx_power_dbm", "carrier_ghz", "bandwidth_mhz",
              "path_loss_exponent", "attenuation_per_m", "noise_figure_db",
              "snr_cap_db", "utility_ratio", "calibrate", "target_snr_db",
              "target_near_delta_db", "target_vehicle_delta_db",
              "roof_echo_loss_db"},
    "traffic": {"density_per_m2", "vehicle_count", "road_length_m",
                "lateral_span_m", "width_mean", "width_std", "length_mean",
                "length_std", "height_mean", "height_std", "gamma_deg"},
    "building": {"setback_d1", "reflection_db", "material", "bounces"},
    "experiment": {"axis", "start", "stop", "steps", "trials", "seed",
                   "workers", "engine"},
}

_SWEEP_AXES = ("building_d1", "building_gamma", "density", "relay_height")


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep/simulation settings from the [experiment] section."""

    axis: str | None = None
    start: float | None = None
    stop: float | None = None
    steps: int = 11
    trials: int = 200_000
    seed: int = 1
    workers: int = 1
    engine: str | None = None


@dataclass(frozen=True)
class Scenario:
    """Everything one deployment needs, parsed and validated."""

    topology: Topology
    pattern: AntennaPattern
    radio: RadioParams
    calibrate: bool
    targets: CalibrationTargets
    roof_echo_loss_db: float | None   # manual value when not calibrating
    vehicles: VehicleStats
    gamma_deg: float
    building: BuildingConfig | None
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)

    def system(self) -> tuple[AntennaPattern, RadioParams, float, CalibratedSystem | None]:
        """Resolve the working pattern/radio and roof-echo loss.

        With ``calibrate`` on, the three free scalars are solved from the
        targets; otherwise the configured values are used as-is (roof echo
        loss defaults to 0 dB, i.e. echoes as strong as their source).
        """
        if self.calibrate:
            cal = calibrate(self.topology, self.pattern, self.radio, self.targets)
            return cal.pattern, cal.radio, cal.roof_echo_loss_db, cal
        loss = self.roof_echo_loss_db if self.roof_echo_loss_db is not None else 0.0
        return self.pattern, self.radio, loss, None

    def region(self) -> ReflectionRegionParams:
        """Roof-mirror patch geometry implied by topology + antenna + traffic."""
        return ReflectionRegionParams(
            spacing_d=self.topology.spacing_d0,
            theta_deg=self.topology.theta_deg,
            gamma_deg=self.gamma_deg,
            beamwidth_deg=self.pattern.beamwidth_deg,
            relay_height=self.topology.height_a,
        )


class _Collector:
    """Typed key access over a parsed INI section, accumulating errors."""

    def __init__(self, parser: configparser.ConfigParser, errors: list[str]):
        self._parser = parser
        self.errors = errors

    def has(self, section: str, key: str) -> bool:
        return self._parser.has_option(section, key)

    def _raw(self, section: str, key: str) -> str | None:
        if not self._parser.has_option(section, key):
            return None
        return self._parser.get(section, key).strip()

    def get_float(self, section: str, key: str, default=None):
        raw = self._raw(section, key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            self.errors.append(f"{section}.{key}: not a number: {raw!r}")
            return default

    def get_int(self, section: str, key: str, default=None):
        raw = self._raw(section, key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            self.errors.append(f"{section}.{key}: not an integer: {raw!r}")
            return default

    def get_bool(self, section: str, key: str, default=None):
        raw = self._raw(section, key)
        if raw is None:
            return default
        word = raw.lower()
        if word not in _BOOL_WORDS:
            self.errors.append(f"{section}.{key}: not a boolean: {raw!r}")
            return default
        return _BOOL_WORDS[word]

    def get_str(self, section: str, key: str, default=None):
        raw = self._raw(section, key)
        return default if raw is None else raw


def parse_config(text: str, origin: str = "<string>") -> Scenario:
    """Parse INI text into a Scenario, reporting every problem at once."""
    parser = configparser.ConfigParser(interpolation=None)
    errors: list[str] = []
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError([f"{origin}: {exc}"]) from exc

    if not parser.sections():
        raise ConfigError([f"{origin}: no sections found (empty config?)"])

    for section in parser.sections():
        if section not in _SECTION_KEYS:
            errors.append(f"unknown section {section!r}")
            continue
        for key in parser.options(section):
            if key not in _SECTION_KEYS[section]:
                errors.append(f"{section}.{key}: unknown key")
    for required in ("topology",):
        if not parser.has_section(required):
            errors.append(f"missing required section [{required}]")
    if errors:
        raise ConfigError(errors)

    col = _Collector(parser, errors)

    # --- topology -----------------------------------------------------
    node_count = col.get_int("topology", "node_count")
    spacing = col.get_float("topology", "spacing_d0")
    theta = col.get_float("topology", "theta_deg")
    width = col.get_float("topology", "road_width")
    height_a = col.get_float("topology", "height_a", 3.5)
    height_b = col.get_float("topology", "height_b", 3.5)
    if node_count is None:
        errors.append("topology.node_count: required key missing")
    if spacing is None:
        errors.append("topology.spacing_d0: required key missing")
    topology = None
    if not errors:
        try:
            topology = build_topology(node_count, spacing, theta_deg=theta,
                                      road_width=width, height_a=height_a,
                                      height_b=height_b)
        except ValueError as exc:
            errors.append(f"topology: {exc}")

    # --- antenna --------------------------------------------------------
    pattern = None
    try:
        pattern = AntennaPattern(
            beamwidth_deg=col.get_float("antenna", "beamwidth_deg",
                                        DEFAULT_PATTERN.beamwidth_deg),
            main_gain_dbi=col.get_float("antenna", "main_gain_dbi",
                                        DEFAULT_PATTERN.main_gain_dbi),
            side_gain_dbi=col.get_float("antenna", "side_gain_dbi",
                                        DEFAULT_PATTERN.side_gain_dbi),
        )
    except ValueError as exc:
        errors.append(f"antenna: {exc}")

    # --- radio ----------------------------------------------------------
    radio = None
    defaults = RadioParams()
    try:
        radio = RadioParams(
            tx_power_dbm=col.get_float("radio", "tx_power_dbm",
                                       defaults.tx_power_dbm),
            carrier_ghz=col.get_float("radio", "carrier_ghz",
                                      defaults.carrier_ghz),
            bandwidth_mhz=col.get_float("radio", "bandwidth_mhz",
                                        defaults.bandwidth_mhz),
            path_loss_exponent=col.get_float("radio", "path_loss_exponent",
                                             defaults.path_loss_exponent),
            attenuation_per_m=col.get_float("radio", "attenuation_per_m",
                                            defaults.attenuation_per_m),
            noise_figure_db=col.get_float("radio", "noise_figure_db",
                                          defaults.noise_figure_db),
            snr_cap_db=col.get_float("radio", "snr_cap_db",
                                     defaults.snr_cap_db),
            utility_ratio=col.get_float("radio", "utility_ratio",
                                        defaults.utility_ratio),
        )
    except ValueError as exc:
        errors.append(f"radio: {exc}")

    do_calibrate = col.get_bool("radio", "calibrate", False)
    targets = CalibrationTargets()
    try:
        targets = CalibrationTargets(
            baseline_snr_db=col.get_float("radio", "target_snr_db",
                                          targets.baseline_snr_db),
            near_side_lobe_delta_db=col.get_float(
                "radio", "target_near_delta_db",
                targets.near_side_lobe_delta_db),
            near_vehicle_echo_delta_db=col.get_float(
                "radio", "target_vehicle_delta_db",
                targets.near_vehicle_echo_delta_db),
        )
    except ValueError as exc:
        errors.append(f"radio: {exc}")
    roof_loss = col.get_float("radio", "roof_echo_loss_db")

    # --- traffic ----------------------------------------------------
    veh_defaults = VehicleStats()
    density = col.get_float("traffic", "density_per_m2")
    count = col.get_float("traffic", "vehicle_count")
    if density is not None and count is not None:
        errors.append("traffic: give density_per_m2 or vehicle_count, not both")
    elif count is not None:
        try:
            density = density_from_vehicle_count(
                count,
                col.get_float("traffic", "road_length_m", 1000.0),
                col.get_float("traffic", "lateral_span_m", 18.75))
        except ValueError as exc:
            errors.append(f"traffic: {exc}")
    elif density is None:
        density = veh_defaults.density_per_m2
    vehicles = veh_defaults
    try:
        vehicles = VehicleStats(
            width_mean=col.get_float("traffic", "width_mean",
                                     veh_defaults.width_mean),
            width_std=col.get_float("traffic", "width_std",
                                    veh_defaults.width_std),
            length_mean=col.get_float("traffic", "length_mean",
                                      veh_defaults.length_mean),
            length_std=col.get_float("traffic", "length_std",
                                     veh_defaults.length_std),
            height_mean=col.get_float("traffic", "height_mean",
                                      veh_defaults.height_mean),
            height_std=col.get_float("traffic", "height_std",
                                     veh_defaults.height_std),
            density_per_m2=density if density is not None else veh_defaults.density_per_m2,
        )
    except ValueError as exc:
        errors.append(f"traffic: {exc}")
    gamma_deg = col.get_float("traffic", "gamma_deg", 5.0)

    # --- building ------------------------------------------------------
    building = None
    if parser.has_section("building"):
        refl = col.get_float("building", "reflection_db")
        material = col.get_str("building", "material")
        if refl is not None and material is not None:
            errors.append("building: give reflection_db or material, not both")
        elif material is not None:
            try:
                refl = material_reflection_db(material)
            except ValueError as exc:
                errors.append(f"building.material: {exc}")
        elif refl is None:
            errors.append("building: needs reflection_db or material")
        setback = col.get_float("building", "setback_d1")
        if setback is None:
            errors.append("building.setback_d1: required key missing")
        if refl is not None and setback is not None:
            try:
                building = BuildingConfig(
                    setback_d1=setback, reflection_db=refl,
                    bounces=col.get_int("building", "bounces", 2))
            except ValueError as exc:
                errors.append(f"building: {exc}")

    # --- experiment ----------------------------------------------------
    experiment = ExperimentConfig()
    axis = col.get_str("experiment", "axis")
    if axis is not None and axis not in _SWEEP_AXES:
        errors.append(f"experiment.axis: unknown axis {axis!r}; "
                      f"choose from {', '.join(_SWEEP_AXES)}")
    engine = col.get_str("experiment", "engine")
    if engine is not None and engine not in ("auto", "numba", "numpy"):
        errors.append(f"experiment.engine: must be auto/numba/numpy, got {engine!r}")
    steps = col.get_int("experiment", "steps", 11)
    trials = col.get_int("experiment", "trials", 200_000)
    workers = col.get_int("experiment", "workers", 1)
    if steps is not None and steps < 2 and axis is not None:
        errors.append(f"experiment.steps: need at least 2, got {steps}")
    if trials is not None and trials <= 0:
        errors.append(f"experiment.trials: must be positive, got {trials}")
    if workers is not None and workers < 1:
        errors.append(f"experiment.workers: must be >= 1, got {workers}")
    if not errors:
        experiment = ExperimentConfig(
            axis=axis,
            start=col.get_float("experiment", "start"),
            stop=col.get_float("experiment", "stop"),
            steps=steps,
            trials=trials,
            seed=col.get_int("experiment", "seed", 1),
            workers=workers,
            engine=engine,
        )

    if errors:
        raise ConfigError(errors)
    assert topology is not None and pattern is not None and radio is not None
    return Scenario(
        topology=topology, pattern=pattern, radio=radio,
        calibrate=bool(do_calibrate), targets=targets,
        roof_echo_loss_db=roof_loss, vehicles=vehicles, gamma_deg=gamma_deg,
        building=building, experiment=experiment,
    )


def load_config(path: str | Path) -> Scenario:
    path = Path(path)
    if not path.is_file():
        raise ConfigError([f"config file not found: {path}"])
    return parse_config(path.read_text(encoding="utf-8"), origin=str(path))


def list_presets() -> list[str]:
    package = resources.files("triwave.presets")
    return sorted(p.name[:-4] for p in package.iterdir()
                  if p.name.endswith(".cfg"))


def load_preset(name: str) -> Scenario:
    package = resources.files("triwave.presets")
    candidate = package.joinpath(f"{name}.cfg")
    if not candidate.is_file():
        raise ConfigError(
            [f"unknown preset {name!r}; available: {', '.join(list_presets())}"])
    return parse_config(candidate.read_text(encoding="utf-8"),
                        origin=f"preset:{name}")
