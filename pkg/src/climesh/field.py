"""Synthetic spatio-temporal climate field over the greenhouse volume.

Ground truth for driving the simulated sensors. The field is a sum of
separable smooth terms: a diurnal curve, a vertical gradient scaled by
a solar-elevation proxy, fixed horizontal anomalies (a cold spot near
station MS-11 and a warm spot near MS-6) that follow the sun with a
configurable lag, plus seeded low-amplitude harmonic noise. It is not a
physical greenhouse model; it exists so the network and the
heterogeneity classifier can be exercised against known patterns:
sunny days develop a midday vertical spread of about 8 C (2 C on
cloudy days) and a horizontal spread of about 6 C (2 C cloudy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigError, DomainError
from .rng import DOMAIN_FIELD, substream

SUNNY = "sunny"
CLOUDY = "cloudy"

#: Sensor-bar heights, m (ankle, abdomen, head).
BAR_HEIGHTS = (0.23, 0.93, 1.56)
_BAR_MID = (BAR_HEIGHTS[0] + BAR_HEIGHTS[2]) / 2.0
_BAR_SPAN = BAR_HEIGHTS[2] - BAR_HEIGHTS[0]


@dataclass(frozen=True)
class StationSite:
    """One measurement station location on the greenhouse plan."""

    station_id: int
    x: float
    y: float
    indoor: bool = True

    @property
    def label(self) -> str:
        return f"MS-{self.station_id}"


# Plan coordinates of the 13 stations: a 3 x 4 indoor grid plus one
# outdoor reference mast north of the greenhouse.
DEFAULT_SITES = (
    StationSite(1, 7, 28), StationSite(2, 17, 28), StationSite(3, 27, 28),
    StationSite(4, 7, 20), StationSite(5, 17, 20), StationSite(6, 27, 20),
    StationSite(7, 7, 12), StationSite(8, 17, 12), StationSite(9, 27, 12),
    StationSite(10, 7, 4), StationSite(11, 17, 4), StationSite(12, 27, 4),
    StationSite(13, 7, 37, indoor=False),
)


@dataclass(frozen=True)
class GreenhouseGeometry:
    """Footprint, roof heights and station layout of the monitored house."""

    width_m: float = 32.0
    depth_m: float = 32.0
    eave_height_m: float = 3.40
    ridge_height_m: float = 4.10
    sites: tuple[StationSite, ...] = DEFAULT_SITES
    collector_xy: tuple[float, float] = (16.0, 16.0)
    outdoor_radius_m: float = 3.0

    def __post_init__(self):
        for site in self.sites:
            inside = 0 <= site.x <= self.width_m and 0 <= site.y <= self.depth_m
            if site.indoor and not inside:
                raise ConfigError(f"{site.label} marked indoor but outside the footprint")
            if not site.indoor and inside:
                raise ConfigError(f"{site.label} marked outdoor but inside the footprint")
        ids = [s.station_id for s in self.sites]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate station ids in geometry")

    def site(self, station_id: int) -> StationSite:
        for s in self.sites:
            if s.station_id == station_id:
                return s
        raise ConfigError(f"no station {station_id} in geometry")

    @property
    def indoor_ids(self) -> tuple[int, ...]:
        return tuple(s.station_id for s in self.sites if s.indoor)


@dataclass(frozen=True)
class HotSpot:
    """Gaussian horizontal temperature anomaly, C at its centre."""

    x: float
    y: float
    amplitude_c: float
    sigma_m: float = 4.0

    def at(self, x: float, y: float) -> float:
        r2 = (x - self.x) ** 2 + (y - self.y) ** 2
        return self.amplitude_c * math.exp(-r2 / (2.0 * self.sigma_m ** 2))


@dataclass(frozen=True)
class DayProfile:
    """Parameters shaping one simulated day."""

    kind: str
    peak_hour_utc: float = 11.5
    daylight_halfwidth_h: float = 5.0
    sharpness: float = 3.0
    night_temp_c: float = 7.0
    diurnal_amplitude_c: float = 18.0
    vertical_gradient_c: float = 8.0       # head-to-ankle spread at full sun
    horizontal_lag_h: float = 1.5
    spots: tuple[HotSpot, ...] = ()
    globe_excess_c: float = 10.0           # t_g - t_a at full sun
    rh_drop_percent: float = 40.0
    wind_base_ms: float = 0.05
    wind_amp_ms: float = 0.35
    uv_peak: float = 4.0
    uv_outdoor_factor: float = 1.6
    uv_flicker_depth: float = 0.25
    outdoor_offset_c: float = -2.0
    outdoor_amplitude_factor: float = 0.6
    outdoor_gradient_c: float = 0.5
    noise_c: float = 0.05

    def __post_init__(self):
        if self.vertical_gradient_c < 0:
            raise ConfigError("vertical gradient amplitude must be >= 0")
        if self.daylight_halfwidth_h <= 0 or self.sharpness <= 0:
            raise ConfigError("daylight halfwidth and sharpness must be positive")

    def solar(self, hour_utc: float) -> float:
        """Solar forcing proxy in [0, 1]: a sharpened half-sine over daylight."""
        rise = self.peak_hour_utc - self.daylight_halfwidth_h
        fall = self.peak_hour_utc + self.daylight_halfwidth_h
        if hour_utc <= rise or hour_utc >= fall:
            return 0.0
        s = math.sin(math.pi * (hour_utc - rise) / (fall - rise))
        return s ** self.sharpness


def default_profiles() -> tuple[DayProfile, DayProfile]:
    """The stock (sunny, cloudy) day shapes.

    Sunny: indoor peaks above 25 C, an 8 C head-to-ankle spread and a
    6 C horizontal spread around midday. Cloudy: peaks near 15 C with
    roughly 2 C spreads, staying inside the homogeneity bands.
    """
    sunny = DayProfile(
        kind=SUNNY,
        spots=(HotSpot(17, 4, -4.0), HotSpot(27, 20, 2.0)),
    )
    cloudy = DayProfile(
        kind=CLOUDY,
        diurnal_amplitude_c=8.0,
        vertical_gradient_c=2.0,
        spots=(HotSpot(17, 4, -4.0 / 3), HotSpot(27, 20, 2.0 / 3)),
        globe_excess_c=3.0,
        rh_drop_percent=25.0,
        wind_amp_ms=0.2,
        uv_peak=1.5,
        uv_flicker_depth=0.5,
    )
    if not cloudy.vertical_gradient_c < sunny.vertical_gradient_c:
        raise ConfigError("cloudy gradient must stay below the sunny gradient")
    return sunny, cloudy


def profile_from_dict(base: DayProfile, overrides: dict) -> DayProfile:
    """Apply config-file overrides onto a stock profile."""
    known = {f for f in DayProfile.__dataclass_fields__}
    bad = set(overrides) - known
    if bad:
        raise ConfigError(f"unknown profile fields: {sorted(bad)}")
    fields = dict(overrides)
    if "spots" in fields:
        fields["spots"] = tuple(HotSpot(*spot) for spot in fields["spots"])
    return replace(base, **fields)


@dataclass(frozen=True)
class GroundTruth:
    """True field values at one query point and time."""

    air_temp: float
    globe_temp: float
    air_velocity: float
    relative_humidity: float
    uv_scale: float  # erythemal UV index equivalent at the top bar


class ClimateField:
    """Deterministic field sampler for one (geometry, profile, seed) triple."""

    _HARMONICS = 3

    def __init__(self, geometry: GreenhouseGeometry, profile: DayProfile, seed: int):
        self.geometry = geometry
        self.profile = profile
        self.seed = seed
        rng = substream(seed, DOMAIN_FIELD)
        # Low spatial frequencies (wavelengths >= ~4 m) keep the noise
        # smooth: adjacent-centimetre samples stay within hundredths of
        # a degree of each other. Plain tuples: this is the innermost
        # loop of the simulator and numpy scalar access is too slow.
        n = self._HARMONICS
        wavevec = rng.uniform(-2 * math.pi / 6.0, 2 * math.pi / 6.0, size=(n, 3))
        omega = 2 * math.pi / rng.uniform(1200.0, 4800.0, size=n)
        phase = rng.uniform(0.0, 2 * math.pi, size=n)
        self._harmonics = tuple(
            (float(wavevec[k, 0]), float(wavevec[k, 1]), float(wavevec[k, 2]),
             float(omega[k]), float(phase[k]))
            for k in range(n))
        self._flicker_phase = float(rng.uniform(0.0, 2 * math.pi))
        self._cache_t = None
        self._cache = None

    # -- helpers ------------------------------------------------------------

    def _in_outdoor_zone(self, x: float, y: float) -> bool:
        for site in self.geometry.sites:
            if not site.indoor:
                if math.hypot(x - site.x, y - site.y) <= self.geometry.outdoor_radius_m:
                    return True
        return False

    def _check_point(self, x: float, y: float, z: float) -> bool:
        """Return True for indoor points; False for the outdoor zone."""
        if not 0.0 <= z <= self.geometry.ridge_height_m:
            raise DomainError(f"z={z} m outside the modelled 0..{self.geometry.ridge_height_m} m")
        if 0 <= x <= self.geometry.width_m and 0 <= y <= self.geometry.depth_m:
            return True
        if self._in_outdoor_zone(x, y):
            return False
        raise DomainError(f"point ({x}, {y}) outside the greenhouse and the outdoor mast zone")

    def _noise(self, x: float, y: float, z: float, t: float) -> float:
        total = 0.0
        for a, b, c, omega, phase in self._harmonics:
            total += math.sin(a * x + b * y + c * z + omega * t + phase)
        return total / self._HARMONICS

    def _time_terms(self, t: float) -> tuple[float, float, float]:
        """(solar now, lagged solar, flicker) cached per timestamp."""
        if t == self._cache_t:
            return self._cache
        p = self.profile
        hour = (t % 86400.0) / 3600.0
        f_now = p.solar(hour)
        f_lag = p.solar(hour - p.horizontal_lag_h)
        # occasional cloud passages: a narrow periodic dip, seeded phase
        dip = max(0.0, math.sin(2 * math.pi * t / 5400.0 + self._flicker_phase)) ** 8
        flicker = 1.0 - p.uv_flicker_depth * dip
        self._cache_t, self._cache = t, (f_now, f_lag, flicker)
        return self._cache

    # -- sampling -----------------------------------------------------------

    def sample(self, x: float, y: float, z: float, t: float) -> GroundTruth:
        """Ground truth at plan position (x, y) m, height z m, UTC time t s."""
        indoor = self._check_point(x, y, z)
        p = self.profile
        f_now, f_lag, flicker = self._time_terms(t)
        eta = self._noise(x, y, z, t)

        if indoor:
            base = p.night_temp_c + p.diurnal_amplitude_c * f_now
            gradient = p.vertical_gradient_c * ((z - _BAR_MID) / _BAR_SPAN) * f_now
            anomaly = sum(spot.at(x, y) for spot in p.spots) * f_lag
            excess = p.globe_excess_c
            uv = p.uv_peak * f_now * flicker
            wind = p.wind_base_ms + p.wind_amp_ms * f_now * (1.0 + 0.3 * eta)
        else:
            base = (p.night_temp_c + p.outdoor_offset_c
                    + p.diurnal_amplitude_c * p.outdoor_amplitude_factor * f_now)
            gradient = p.outdoor_gradient_c * ((z - _BAR_MID) / _BAR_SPAN) * f_now
            anomaly = 0.0
            excess = p.globe_excess_c
            uv = p.uv_peak * p.uv_outdoor_factor * f_now * flicker
            wind = 2.0 * p.wind_base_ms + 2.0 * p.wind_amp_ms * f_now * (1.0 + 0.3 * eta)

        air = base + gradient + anomaly + p.noise_c * eta
        # The globe only departs from air temperature under solar load,
        # so the two coincide exactly at night.
        globe = air + excess * f_now * (1.0 + 0.05 * eta)
        rh = min(100.0, max(0.0, 100.0 - p.rh_drop_percent * f_now * (1.0 + 0.1 * eta)))
        return GroundTruth(
            air_temp=air,
            globe_temp=globe,
            air_velocity=max(0.0, wind),
            relative_humidity=rh,
            uv_scale=max(0.0, uv),
        )


def sample_field(geometry: GreenhouseGeometry, profile: DayProfile,
                 x: float, y: float, z: float, t: float, seed: int) -> GroundTruth:
    """One-shot field query; prefer a ClimateField instance for bulk sampling."""
    return ClimateField(geometry, profile, seed).sample(x, y, z, t)
