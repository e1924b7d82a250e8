"""Measurement-station model: sensors plus the sample/poll state machine.

Each station carries 13 channels: air temperature, globe temperature,
hot-wire wind voltage and relative humidity at three bar heights, plus
one UV index sensor on the upper bar. A broadcast trigger makes the
station sample every channel at the trigger timestamp and buffer
exactly one sample; a poll returns the buffered payload unchanged, so
retries are idempotent. A missed poll loses that round's sample when
the next trigger overwrites the buffer.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from random import Random
from typing import Optional

from . import records
from .errors import ConfigError, DomainError
from .field import BAR_HEIGHTS, ClimateField, StationSite


@dataclass(frozen=True)
class SensorSpec:
    """Range, accuracy and error model of one probe, in its native units."""

    kind: str
    range_min: float
    range_max: float
    accuracy: float
    step: float = 0.0        # quantization step; 0 disables quantization
    noise_std: float = 0.0   # gaussian noise sigma

    def __post_init__(self):
        if self.range_min >= self.range_max:
            raise ConfigError(f"{self.kind}: empty measuring range")
        if self.accuracy < 0 or self.noise_std < 0 or self.step < 0:
            raise ConfigError(f"{self.kind}: negative error parameters")


def default_sensor_suite() -> dict[str, SensorSpec]:
    """Stock probe set: Pt100 pair, hot-wire bridge, RH and UVI chips.

    Noise sigma defaults to half the stated accuracy of each probe.
    """
    return {
        "air_temp": SensorSpec("air_temp", -15.0, 250.0, accuracy=0.06,
                               step=0.01, noise_std=0.03),
        "globe_temp": SensorSpec("globe_temp", -15.0, 250.0, accuracy=0.06,
                                 step=0.01, noise_std=0.03),
        # The wind channel is acquired and stored as bridge volts; the
        # 5 cm/s accuracy floor maps to 12.5 mV on the placeholder curve.
        "wind_volts": SensorSpec("wind_volts", 0.0, 5.0, accuracy=0.0125,
                                 step=0.001, noise_std=0.00625),
        "relative_humidity": SensorSpec("relative_humidity", 0.0, 100.0, accuracy=3.0,
                                        step=0.1, noise_std=1.5),
        "uv_index": SensorSpec("uv_index", 0.0, 15.0, accuracy=1.0,
                               step=0.01, noise_std=0.5),
    }


def read_sensor(spec: SensorSpec, truth: float, rng: Optional[Random]) -> float:
    """One measurement: add noise, clamp to the range, quantize.

    With noise disabled and step zero the value passes through
    unchanged; quantization error never exceeds step/2.
    """
    value = truth
    if rng is not None and spec.noise_std > 0:
        value += rng.gauss(0.0, spec.noise_std)
    value = min(spec.range_max, max(spec.range_min, value))
    if spec.step > 0:
        value = round(value / spec.step) * spec.step
    return value


class WindCalibration:
    """Piecewise-linear volts-to-speed transfer of the hot-wire probe.

    The stock curve is a full-scale placeholder (0 V -> 0 m/s,
    5 V -> 20 m/s) and is flagged uncalibrated; readings converted with
    it are rough shapes, not speeds. A real curve can be loaded from a
    scenario once the probe has been characterised.
    """

    def __init__(self, points=((0.0, 0.0), (5.0, 20.0)), calibrated: bool = False):
        if len(points) < 2:
            raise ConfigError("calibration curve needs at least two points")
        volts = [float(p[0]) for p in points]
        speeds = [float(p[1]) for p in points]
        if any(b <= a for a, b in zip(volts, volts[1:])):
            raise ConfigError("calibration curve volts must be strictly ascending")
        if any(b < a for a, b in zip(speeds, speeds[1:])):
            raise ConfigError("calibration curve must be monotone")
        self.points = tuple(zip(volts, speeds))
        self.calibrated = bool(calibrated)
        self._volts = volts
        self._speeds = speeds

    @staticmethod
    def _interp(x: float, xs: list[float], ys: list[float]) -> float:
        if x <= xs[0]:
            return ys[0]
        if x >= xs[-1]:
            return ys[-1]
        i = bisect.bisect_right(xs, x)
        x0, x1 = xs[i - 1], xs[i]
        y0, y1 = ys[i - 1], ys[i]
        if x1 == x0:
            return y0
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def volts_to_speed(self, volts: float) -> tuple[float, bool]:
        """Interpolated speed and a flag set when the input was clamped."""
        if not math.isfinite(volts):
            raise DomainError("calibration input must be finite")
        clamped = volts < self._volts[0] or volts > self._volts[-1]
        return self._interp(volts, self._volts, self._speeds), clamped

    def speed_to_volts(self, speed: float) -> float:
        """Inverse transfer, used to synthesise the raw voltage channel.

        Flat curve segments invert to their left edge; good enough for
        the placeholder curve, which is strictly increasing anyway.
        """
        return self._interp(speed, self._speeds, self._volts)


@dataclass
class ClimateSample:
    """One buffered station sample: 12 bar readings plus the top-bar UVI."""

    station_id: int
    sequence: int
    timestamp: int
    readings: tuple[float, ...]          # ankle/abdomen/head x (t_a, t_g, volts, RH)
    uvi: float
    rssi_db: Optional[float] = None      # filled in by the collector on delivery

    def payload(self) -> bytes:
        return records.encode_sample(self.sequence, self.timestamp, self.station_id,
                                     self.readings, self.uvi)


@dataclass
class TriggerPacket:
    sequence: int
    timestamp: int


@dataclass
class PollPacket:
    sequence: int
    station_id: int


@dataclass
class PollResponse:
    station_id: int
    kind: str                   # "data" | "no-data"
    payload: bytes = b""
    sequence: Optional[int] = None


class Station:
    """Sequential per-station state machine driven by the event scheduler."""

    def __init__(self, site: StationSite, sensors: Optional[dict[str, SensorSpec]] = None,
                 wind: Optional[WindCalibration] = None):
        self.site = site
        self.sensors = sensors or default_sensor_suite()
        self.wind = wind or WindCalibration()
        self.last_sequence = 0
        self.buffered: Optional[ClimateSample] = None
        self._buffered_payload: Optional[bytes] = None

    def sample_channels(self, field: ClimateField, timestamp: int,
                        rng: Optional[Random]) -> tuple[tuple[float, ...], float]:
        """Measure all 13 channels at this site for one trigger instant.

        The UV sensor sits on the upper bar, so its truth comes from
        the head-height field sample.
        """
        readings = []
        top = None
        for z in BAR_HEIGHTS:
            truth = field.sample(self.site.x, self.site.y, z, timestamp)
            top = truth
            volts = self.wind.speed_to_volts(truth.air_velocity)
            readings.append(read_sensor(self.sensors["air_temp"], truth.air_temp, rng))
            readings.append(read_sensor(self.sensors["globe_temp"], truth.globe_temp, rng))
            readings.append(read_sensor(self.sensors["wind_volts"], volts, rng))
            readings.append(read_sensor(self.sensors["relative_humidity"],
                                        truth.relative_humidity, rng))
        uvi = read_sensor(self.sensors["uv_index"], top.uv_scale, rng)
        return tuple(readings), uvi

    def on_trigger(self, trigger: TriggerPacket, field: ClimateField,
                   rng: Optional[Random]) -> bool:
        """Sample and buffer on a fresh trigger; ignore stale duplicates."""
        if trigger.sequence <= self.last_sequence:
            return False
        readings, uvi = self.sample_channels(field, trigger.timestamp, rng)
        self.buffered = ClimateSample(self.site.station_id, trigger.sequence,
                                      trigger.timestamp, readings, uvi)
        self._buffered_payload = self.buffered.payload()
        self.last_sequence = trigger.sequence
        return True

    def on_poll(self, poll: PollPacket) -> PollResponse:
        """Answer a poll with the buffered payload; byte-identical on retry."""
        if self.buffered is None:
            return PollResponse(self.site.station_id, "no-data")
        return PollResponse(self.site.station_id, "data",
                            payload=self._buffered_payload,
                            sequence=self.buffered.sequence)
