"""Basic climatic quantities for thermal-environment assessment.

ISO 7726 works with four basic parameters at a measurement point: air
temperature t_a, mean radiant temperature, air velocity v_a, and the
partial vapour pressure of water in air P_a. Mean radiant temperature is
derived from the black globe temperature t_g, choosing between the
natural-convection and forced-convection globe equations by comparing
the two convection coefficients. The module also evaluates the
erythemally weighted UV index (CIE action spectrum).

All temperatures are in degrees Celsius, velocities in m/s, pressures in
kPa. The globe equations use the +273 Kelvin offset of the printed
standard forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FormatError

#: Regime tags returned by mean_radiant_temperature.
NATURAL = "natural"
FORCED = "forced"

#: Kelvin offset used by the globe-thermometer equations.
_KELVIN = 273.0

#: Erythemal conversion constant, m^2/W.
UVI_CONSTANT = 40.0

#: UV risk threshold: values strictly above this call for protection.
UVI_RISK_THRESHOLD = 2.0


@dataclass(frozen=True)
class GlobeSpec:
    """Black globe geometry. The standard globe is 15 cm in diameter."""

    diameter: float = 0.15
    emissivity_note: str = "matte black globe, standard emissivity assumed"

    def __post_init__(self):
        if not (self.diameter > 0) or not math.isfinite(self.diameter):
            raise DomainError(f"globe diameter must be positive, got {self.diameter}")


@dataclass(frozen=True, slots=True)
class BasicParameters:
    """The four ISO 7726 basic parameters at one point."""

    air_temp: float
    mean_radiant_temp: float
    air_velocity: float
    vapour_pressure: float

    def __post_init__(self):
        if not (math.isfinite(self.air_temp) and math.isfinite(self.mean_radiant_temp)):
            raise DomainError("temperatures must be finite")
        if self.air_velocity < 0:
            raise DomainError(f"air velocity must be >= 0, got {self.air_velocity}")
        if self.vapour_pressure < 0:
            raise DomainError(f"vapour pressure must be >= 0, got {self.vapour_pressure}")


@dataclass(frozen=True)
class RawReadings:
    """What one sensor bar actually measures, before any derivation."""

    air_temp: float
    globe_temp: float
    air_velocity: float
    relative_humidity: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in
                   (self.air_temp, self.globe_temp, self.air_velocity, self.relative_humidity)):
            raise DomainError("raw readings must be finite")
        if self.air_velocity < 0:
            raise DomainError(f"air velocity must be >= 0, got {self.air_velocity}")
        if not 0 <= self.relative_humidity <= 100:
            raise DomainError(f"relative humidity out of range: {self.relative_humidity}")


def natural_convection_coefficient(globe_temp: float, air_temp: float,
                                   globe: GlobeSpec = GlobeSpec()) -> float:
    """Globe heat-transfer coefficient for natural convection, W/(m^2*K).

    h = 1.4 * (|t_g - t_a| / D)^(1/4)

    Zero when globe and air temperature coincide.
    """
    if not (math.isfinite(globe_temp) and math.isfinite(air_temp)):
        raise DomainError("temperatures must be finite")
    return 1.4 * (abs(globe_temp - air_temp) / globe.diameter) ** 0.25


def forced_convection_coefficient(air_velocity: float,
                                  globe: GlobeSpec = GlobeSpec()) -> float:
    """Globe heat-transfer coefficient for forced convection, W/(m^2*K).

    h = 6.3 * v^0.6 / D^0.4
    """
    if not math.isfinite(air_velocity):
        raise DomainError("air velocity must be finite")
    if air_velocity < 0:
        raise DomainError(f"air velocity must be >= 0, got {air_velocity}")
    return 6.3 * air_velocity ** 0.6 / globe.diameter ** 0.4


def _radiant_root(t_g: float, t_a: float, v: float, radiant: float, regime: str) -> float:
    bracket = (t_g + _KELVIN) ** 4 + radiant
    if bracket < 0:
        raise DomainError(
            f"globe equation bracket negative (t_g={t_g} C, t_a={t_a} C, "
            f"v={v} m/s, regime={regime}); inputs outside physical range"
        )
    return bracket ** 0.25 - _KELVIN


def natural_radiant_temperature(globe_temp: float, air_temp: float) -> float:
    """Globe equation under natural convection (standard 15 cm globe).

    [(t_g+273)^4 + 0.4e8 * |t_g-t_a|^(1/4) * (t_g-t_a)]^(1/4) - 273

    The radiant term keeps the sign of (t_g - t_a); a negative bracket
    (physically extreme t_a >> t_g) raises DomainError instead of
    producing a complex root.
    """
    delta = globe_temp - air_temp
    radiant = 0.4e8 * abs(delta) ** 0.25 * delta
    return _radiant_root(globe_temp, air_temp, 0.0, radiant, NATURAL)


def forced_radiant_temperature(globe_temp: float, air_temp: float,
                               air_velocity: float) -> float:
    """Globe equation under forced convection at a given air velocity.

    [(t_g+273)^4 + 2.5e8 * v^0.6 * (t_g-t_a)]^(1/4) - 273
    """
    if air_velocity < 0:
        raise DomainError(f"air velocity must be >= 0, got {air_velocity}")
    delta = globe_temp - air_temp
    radiant = 2.5e8 * air_velocity ** 0.6 * delta
    return _radiant_root(globe_temp, air_temp, air_velocity, radiant, FORCED)


def mean_radiant_temperature(readings: RawReadings,
                             globe: GlobeSpec = GlobeSpec()) -> tuple[float, str]:
    """Mean radiant temperature from a black globe reading.

    Both convection coefficients are evaluated; the larger one selects
    the globe equation. Ties resolve to natural convection so the
    returned regime tag is deterministic. Returns (value in C, regime).
    """
    h_nat = natural_convection_coefficient(readings.globe_temp, readings.air_temp, globe)
    h_for = forced_convection_coefficient(readings.air_velocity, globe)
    if h_nat >= h_for:
        return natural_radiant_temperature(readings.globe_temp, readings.air_temp), NATURAL
    return forced_radiant_temperature(readings.globe_temp, readings.air_temp,
                                      readings.air_velocity), FORCED


def saturation_vapour_pressure(air_temp: float) -> float:
    """Saturation vapour pressure in kPa, Magnus form.

    P_sat = 0.61094 * exp(17.625 * t / (t + 243.04))
    """
    if not math.isfinite(air_temp):
        raise DomainError("air temperature must be finite")
    if air_temp <= -243.04:
        raise DomainError(f"air temperature {air_temp} C below Magnus validity pole")
    return 0.61094 * math.exp(17.625 * air_temp / (air_temp + 243.04))


def partial_vapour_pressure(air_temp: float, relative_humidity: float) -> float:
    """Partial vapour pressure in kPa from temperature and RH percent."""
    if not 0 <= relative_humidity <= 100:
        raise DomainError(f"relative humidity out of range: {relative_humidity}")
    return (relative_humidity / 100.0) * saturation_vapour_pressure(air_temp)


# --- erythemal UV -----------------------------------------------------------

#: Integration window of the UV index, nm.
UV_WINDOW = (250.0, 400.0)


def erythemal_weighting(wavelength_nm: float) -> float:
    """CIE reference action spectrum for UV-induced erythema.

    Piecewise: 1 up to 298 nm, then two exponential tails:
        10^(0.094*(298-w)) for 298 < w <= 328
        10^(0.015*(140-w)) for 328 < w <= 400
    """
    w = wavelength_nm
    if w <= 298.0:
        return 1.0
    if w <= 328.0:
        return 10.0 ** (0.094 * (298.0 - w))
    return 10.0 ** (0.015 * (140.0 - w))


def _erythemal_table() -> tuple[np.ndarray, np.ndarray]:
    grid = np.arange(250.0, 401.0, 1.0)
    return grid, np.array([erythemal_weighting(w) for w in grid])


#: Action spectrum tabulated at 1 nm over the integration window.
ERYTHEMAL_GRID, ERYTHEMAL_TABLE = _erythemal_table()


@dataclass(frozen=True)
class UvSpectrum:
    """Spectral irradiance E(w) in W/(m^2*nm) on an ascending wavelength grid."""

    wavelengths_nm: np.ndarray
    irradiance: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "wavelengths_nm", np.asarray(self.wavelengths_nm, dtype=float))
        object.__setattr__(self, "irradiance", np.asarray(self.irradiance, dtype=float))
        w, e = self.wavelengths_nm, self.irradiance
        if w.ndim != 1 or w.shape != e.shape or w.size < 2:
            raise FormatError("spectrum needs matching 1-d wavelength and irradiance arrays")
        if not np.all(np.diff(w) > 0):
            raise FormatError("wavelength grid must be strictly ascending")
        if np.any(e < 0) or not np.all(np.isfinite(e)):
            raise DomainError("irradiance must be finite and non-negative")


def uvi_from_spectrum(spectrum: UvSpectrum) -> float:
    """Erythemally weighted UV index.

    40 m^2/W times the trapezoidal integral of E(w) * S_er(w) over
    250..400 nm, with the action spectrum interpolated onto the
    supplied grid. The grid must cover the whole window.
    """
    w = spectrum.wavelengths_nm
    lo, hi = UV_WINDOW
    if w[0] > lo or w[-1] < hi:
        raise FormatError(f"spectrum grid must cover {lo}-{hi} nm, got {w[0]}-{w[-1]}")

    # Clip to the window, interpolating exact boundary points.
    inside = (w > lo) & (w < hi)
    grid = np.concatenate(([lo], w[inside], [hi]))
    irr = np.interp(grid, w, spectrum.irradiance)
    weight = np.interp(grid, ERYTHEMAL_GRID, ERYTHEMAL_TABLE)
    return UVI_CONSTANT * float(np.trapezoid(irr * weight, grid))


def classify_uvi(uvi: float) -> str:
    """Risk band for a UV index value: 'risk' strictly above 2, else 'no-risk'."""
    if uvi < 0 or not math.isfinite(uvi):
        raise DomainError(f"UVI must be finite and >= 0, got {uvi}")
    return "risk" if uvi > UVI_RISK_THRESHOLD else "no-risk"
