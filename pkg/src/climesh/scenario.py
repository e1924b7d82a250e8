"""Scenario configuration: load, validate and resolve run descriptions.

A scenario is a JSON document naming the day sequence, the seed, the
poll schedule, the radio and crop-growth parameters, and optional
profile or geometry overrides. A few scenarios ship with the package
and can be referenced by bare name (``paper-week``, ``single-sunny``,
``single-cloudy``, ``plant-growth``, ``throughput-074``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Optional

from .collector import PollSchedule
from .errors import ConfigError
from .field import (CLOUDY, SUNNY, DayProfile, GreenhouseGeometry, StationSite,
                    default_profiles, profile_from_dict)
from .radio import DeliveryMap, PlantGrowth, RadioParams
from .station import WindCalibration

BUNDLED = ("paper-week", "single-sunny", "single-cloudy", "plant-growth",
           "throughput-074")


@dataclass(frozen=True)
class ReconfigPolicy:
    """When to recompute the routing tree from observed link rates."""

    window: int = 100
    min_samples: int = 20
    threshold: float = 0.5

    def __post_init__(self):
        if not 0 < self.threshold < 1 or self.window < self.min_samples:
            raise ConfigError("invalid reconfiguration policy")


@dataclass(frozen=True)
class Scenario:
    """Fully resolved run description."""

    name: str
    start_date: str
    seed: int
    day_kinds: tuple[str, ...]
    profiles: dict[str, DayProfile]
    geometry: GreenhouseGeometry
    schedule: PollSchedule
    radio: RadioParams
    growth: PlantGrowth
    wind: WindCalibration
    reconfig: ReconfigPolicy = field(default_factory=ReconfigPolicy)
    relocated_antennas: tuple[int, ...] = ()

    @property
    def epoch(self) -> int:
        dt = datetime.strptime(self.start_date, "%Y-%m-%d").replace(tzinfo=timezone.utc)
        return int(dt.timestamp())

    @property
    def n_days(self) -> int:
        return len(self.day_kinds)

    @property
    def rounds_per_day(self) -> int:
        return int(86400 // self.schedule.trigger_period_s)

    def day_profile(self, day_index: int) -> DayProfile:
        return self.profiles[self.day_kinds[day_index]]


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def scenario_from_dict(doc: dict) -> Scenario:
    """Build and validate a scenario from a parsed JSON document."""
    _require(isinstance(doc, dict), "scenario document must be an object")
    unknown = set(doc) - {"name", "start_date", "seed", "days", "profiles",
                          "geometry", "schedule", "radio", "growth",
                          "wind_calibration", "reconfig"}
    _require(not unknown, f"unknown scenario keys: {sorted(unknown)}")

    name = doc.get("name", "unnamed")
    _require("seed" in doc and isinstance(doc["seed"], int) and doc["seed"] >= 0,
             "scenario needs a non-negative integer seed")
    _require("days" in doc and isinstance(doc["days"], list) and len(doc["days"]) >= 1,
             "scenario needs at least one day")

    start_date = doc.get("start_date", "2017-01-22")
    try:
        datetime.strptime(start_date, "%Y-%m-%d")
    except ValueError as exc:
        raise ConfigError(f"bad start_date {start_date!r}: {exc}") from None

    sunny, cloudy = default_profiles()
    profiles = {SUNNY: sunny, CLOUDY: cloudy}
    for key, overrides in doc.get("profiles", {}).items():
        _require(key in profiles, f"profile overrides allowed for {sorted(profiles)}, got {key!r}")
        profiles[key] = profile_from_dict(profiles[key], overrides)
    _require(profiles[CLOUDY].vertical_gradient_c < profiles[SUNNY].vertical_gradient_c,
             "cloudy vertical gradient must stay below the sunny one")

    day_kinds = tuple(doc["days"])
    for kind in day_kinds:
        _require(kind in profiles, f"unknown day kind {kind!r}")

    geometry = _geometry_from_dict(doc.get("geometry", {}))

    schedule_doc = dict(doc.get("schedule", {}))
    try:
        schedule = PollSchedule(**schedule_doc)
    except TypeError as exc:
        raise ConfigError(f"bad schedule: {exc}") from None
    _require(86400 % schedule.trigger_period_s == 0,
             "trigger period must divide the 86400 s day evenly")

    radio_doc = dict(doc.get("radio", {}))
    relocated = tuple(radio_doc.pop("relocated_antennas", ()))
    map_doc = radio_doc.pop("delivery_map", {})
    try:
        radio = RadioParams(delivery_map=DeliveryMap(**map_doc), **radio_doc)
    except TypeError as exc:
        raise ConfigError(f"bad radio parameters: {exc}") from None
    if radio.fixed_link_probability is not None:
        _require(0.0 <= radio.fixed_link_probability <= 1.0,
                 "fixed link probability must lie in [0, 1]")

    growth_doc = dict(doc.get("growth", {}))
    _require("season_start_s" not in growth_doc,
             "growth.season_start_s is derived from start_date, not configured")
    try:
        growth = PlantGrowth(**growth_doc)
    except TypeError as exc:
        raise ConfigError(f"bad growth curve: {exc}") from None
    _require(growth.full_height_m >= growth.start_height_m >= 0,
             "plant height must be non-negative and non-decreasing")

    wind_doc = doc.get("wind_calibration", {})
    wind = WindCalibration(points=tuple(tuple(p) for p in wind_doc.get("points",
                                                                       ((0.0, 0.0), (5.0, 20.0)))),
                           calibrated=bool(wind_doc.get("calibrated", False)))

    try:
        reconfig = ReconfigPolicy(**doc.get("reconfig", {}))
    except TypeError as exc:
        raise ConfigError(f"bad reconfig policy: {exc}") from None

    return Scenario(name=name, start_date=start_date, seed=doc["seed"],
                    day_kinds=day_kinds, profiles=profiles, geometry=geometry,
                    schedule=schedule, radio=radio, growth=growth, wind=wind,
                    reconfig=reconfig, relocated_antennas=relocated)


def _geometry_from_dict(doc: dict) -> GreenhouseGeometry:
    if not doc:
        return GreenhouseGeometry()
    kwargs = {}
    for key in ("width_m", "depth_m", "eave_height_m", "ridge_height_m",
                "outdoor_radius_m"):
        if key in doc:
            kwargs[key] = float(doc[key])
    if "collector_xy" in doc:
        kwargs["collector_xy"] = tuple(doc["collector_xy"])
    if "sites" in doc:
        kwargs["sites"] = tuple(
            StationSite(int(s["id"]), float(s["x"]), float(s["y"]),
                        bool(s.get("indoor", True)))
            for s in doc["sites"])
    unknown = set(doc) - {"width_m", "depth_m", "eave_height_m", "ridge_height_m",
                          "outdoor_radius_m", "collector_xy", "sites"}
    if unknown:
        raise ConfigError(f"unknown geometry keys: {sorted(unknown)}")
    return GreenhouseGeometry(**kwargs)


def load_scenario(ref: str | Path, seed_override: Optional[int] = None) -> Scenario:
    """Load a scenario by bundled name or file path."""
    ref_str = str(ref)
    if ref_str in BUNDLED:
        text = (resources.files("climesh") / "scenarios"
                / (ref_str.replace("-", "_") + ".json")).read_text()
    else:
        path = Path(ref)
        if not path.exists():
            raise FileNotFoundError(f"scenario file {path} not found")
        text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario is not valid JSON: {exc}") from None
    scenario = scenario_from_dict(doc)
    if seed_override is not None:
        scenario = replace(scenario, seed=seed_override)
    return scenario
