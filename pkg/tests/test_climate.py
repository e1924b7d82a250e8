"""Core thermal formula tests against independent arithmetic oracles."""

import math

import numpy as np
import pytest

from climesh import climate
from climesh.climate import (GlobeSpec, RawReadings, UvSpectrum, classify_uvi,
                             erythemal_weighting, forced_convection_coefficient,
                             forced_radiant_temperature, mean_radiant_temperature,
                             natural_convection_coefficient,
                             natural_radiant_temperature, partial_vapour_pressure,
                             uvi_from_spectrum)
from climesh.errors import DomainError, FormatError


class TestConvectionCoefficients:
    def test_natural_matches_direct_arithmetic(self):
        assert natural_convection_coefficient(30, 20) == pytest.approx(
            1.4 * (10 / 0.15) ** 0.25, abs=1e-12)
        # quoted reference value
        assert natural_convection_coefficient(30, 20) == pytest.approx(4.0007, abs=1e-3)

    def test_natural_zero_at_equal_temperatures(self):
        assert natural_convection_coefficient(25, 25) == 0.0

    def test_natural_diameter_scaling(self):
        big = natural_convection_coefficient(30, 20, GlobeSpec(0.30))
        assert big == pytest.approx(1.4 * (10 / 0.30) ** 0.25, abs=1e-12)
        assert big == pytest.approx(3.3646, abs=1e-3)
        # doubling D scales by (1/2)^0.25
        assert big == pytest.approx(natural_convection_coefficient(30, 20) * 0.5 ** 0.25,
                                    rel=1e-12)

    def test_natural_uses_magnitude_of_difference(self):
        assert natural_convection_coefficient(20, 30) == \
            natural_convection_coefficient(30, 20)

    def test_forced_matches_direct_arithmetic(self):
        assert forced_convection_coefficient(0.3) == pytest.approx(
            6.3 * 0.3 ** 0.6 / 0.15 ** 0.4, abs=1e-12)
        assert forced_convection_coefficient(0.3) == pytest.approx(6.534, abs=1e-3)
        assert forced_convection_coefficient(1.0) == pytest.approx(13.456, abs=1e-3)

    def test_forced_zero_velocity(self):
        assert forced_convection_coefficient(0.0) == 0.0

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            natural_convection_coefficient(float("nan"), 20)
        with pytest.raises(DomainError):
            forced_convection_coefficient(-0.1)
        with pytest.raises(DomainError):
            GlobeSpec(diameter=0.0)


class TestMeanRadiantTemperature:
    def test_identity_when_globe_equals_air(self):
        for v in (0.0, 0.3, 2.0):
            value, _ = mean_radiant_temperature(RawReadings(25, 25, v, 50))
            assert value == pytest.approx(25.0, abs=1e-9)

    def test_forced_spot_value(self):
        oracle = (303.0 ** 4 + 2.5e8 * 0.5 ** 0.6 * 10.0) ** 0.25 - 273.0
        value, regime = mean_radiant_temperature(RawReadings(20, 30, 0.5, 50))
        assert regime == climate.FORCED
        assert value == pytest.approx(oracle, abs=1e-9)
        assert value == pytest.approx(43.85, abs=0.01)

    def test_low_velocity_selects_natural(self):
        _, regime = mean_radiant_temperature(RawReadings(20, 30, 0.10, 50))
        assert regime == climate.NATURAL

    def test_regime_always_tracks_larger_coefficient(self):
        rng = np.random.default_rng(42)
        for _ in range(300):
            t_a = float(rng.uniform(-5, 45))
            t_g = t_a + float(rng.uniform(-5, 25))  # keep the bracket physical
            v = float(rng.uniform(0, 3))
            h_nat = natural_convection_coefficient(t_g, t_a)
            h_for = forced_convection_coefficient(v)
            _, regime = mean_radiant_temperature(RawReadings(t_a, t_g, v, 50))
            assert regime == (climate.NATURAL if h_nat >= h_for else climate.FORCED)

    def test_tie_resolves_to_natural(self):
        # v = 0 makes the forced coefficient 0, tying when t_g == t_a
        _, regime = mean_radiant_temperature(RawReadings(25, 25, 0.0, 50))
        assert regime == climate.NATURAL

    def test_forced_monotone_in_velocity(self):
        grid = [0.1 * k for k in range(1, 11)]
        warmer = [forced_radiant_temperature(30, 20, v) for v in grid]
        assert all(b > a for a, b in zip(warmer, warmer[1:]))
        cooler = [forced_radiant_temperature(20, 30, v) for v in grid]
        assert all(b < a for a, b in zip(cooler, cooler[1:]))

    def test_both_equations_exact_at_zero_difference(self):
        assert natural_radiant_temperature(25, 25) == pytest.approx(25.0, abs=1e-12)
        assert forced_radiant_temperature(25, 25, 1.0) == pytest.approx(25.0, abs=1e-12)

    def test_crossover_velocity(self):
        # hcg_natural(dT=10) == hcg_forced(v*) solved in closed form
        target = natural_convection_coefficient(30, 20)
        v_star = ((target * 0.15 ** 0.4) / 6.3) ** (1 / 0.6)
        assert v_star == pytest.approx(0.132, abs=1e-3)
        _, below = mean_radiant_temperature(RawReadings(20, 30, v_star - 0.002, 50))
        _, above = mean_radiant_temperature(RawReadings(20, 30, v_star + 0.002, 50))
        assert (below, above) == (climate.NATURAL, climate.FORCED)

    def test_negative_bracket_raises_with_inputs(self):
        with pytest.raises(DomainError) as err:
            mean_radiant_temperature(RawReadings(200.0, 0.0, 5.0, 50))
        assert "t_g=0.0" in str(err.value) and "t_a=200.0" in str(err.value)

    def test_raw_readings_validation(self):
        with pytest.raises(DomainError):
            RawReadings(20, 25, -0.1, 50)
        with pytest.raises(DomainError):
            RawReadings(20, 25, 0.1, 101)


class TestVapourPressure:
    def test_saturation_at_20c(self):
        oracle = 0.61094 * math.exp(17.625 * 20 / (20 + 243.04))
        assert partial_vapour_pressure(20, 100) == pytest.approx(oracle, abs=1e-12)
        assert partial_vapour_pressure(20, 100) == pytest.approx(2.333, abs=1e-3)

    def test_zero_humidity(self):
        for t in (-10, 0, 20, 45):
            assert partial_vapour_pressure(t, 0) == 0.0

    def test_half_humidity_halves_pressure(self):
        assert partial_vapour_pressure(20, 50) == pytest.approx(
            0.5 * partial_vapour_pressure(20, 100), rel=1e-12)
        assert partial_vapour_pressure(20, 50) == pytest.approx(1.167, abs=1e-3)

    def test_monotone_in_temperature_and_humidity(self):
        temps = [partial_vapour_pressure(t, 60) for t in range(-10, 50, 2)]
        assert all(b > a for a, b in zip(temps, temps[1:]))
        hums = [partial_vapour_pressure(20, rh) for rh in range(0, 101, 5)]
        assert all(b > a for a, b in zip(hums, hums[1:]))

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            partial_vapour_pressure(-250, 50)
        with pytest.raises(DomainError):
            partial_vapour_pressure(20, 120)


def _band_spectrum(level=0.05, lo=297.0, hi=298.0):
    eps = 1e-6
    w = np.array([250.0, lo - eps, lo, hi, hi + eps, 400.0])
    e = np.array([0.0, 0.0, level, level, 0.0, 0.0])
    return UvSpectrum(w, e)


class TestUvIndex:
    def test_zero_irradiance(self):
        w = np.arange(250.0, 401.0)
        assert uvi_from_spectrum(UvSpectrum(w, np.zeros_like(w))) == 0.0

    def test_unit_band_in_flat_weighting_region(self):
        # S_er == 1 below 298 nm: a 1 nm band at 0.05 W/m^2/nm gives 40 * 0.05
        assert uvi_from_spectrum(_band_spectrum()) == pytest.approx(2.00, abs=0.01)

    def test_flat_spectrum_against_fine_oracle(self):
        w = np.arange(250.0, 401.0)
        value = uvi_from_spectrum(UvSpectrum(w, np.full_like(w, 0.001)))
        wf = np.arange(250.0, 400.0001, 0.1)
        oracle = 40.0 * np.trapezoid(0.001 * np.array([erythemal_weighting(x) for x in wf]), wf)
        assert value == pytest.approx(oracle, rel=5e-3)
        assert value == pytest.approx(2.106, abs=0.01)

    def test_linearity(self):
        rng = np.random.default_rng(3)
        w = np.arange(250.0, 401.0)
        e = rng.uniform(0, 0.02, size=w.size)
        one = uvi_from_spectrum(UvSpectrum(w, e))
        two = uvi_from_spectrum(UvSpectrum(w, 2 * e))
        assert two == pytest.approx(2 * one, rel=1e-12)

    def test_weighting_piecewise_joints(self):
        assert erythemal_weighting(250) == 1.0
        assert erythemal_weighting(298) == 1.0
        # both exponential pieces agree at 328 nm
        assert 10 ** (0.094 * (298 - 328)) == pytest.approx(10 ** (0.015 * (140 - 328)), rel=1e-12)
        assert erythemal_weighting(328) == pytest.approx(10 ** -2.82, rel=1e-12)
        assert erythemal_weighting(400) == pytest.approx(10 ** (0.015 * -260), rel=1e-12)

    def test_grid_validation(self):
        with pytest.raises(FormatError):
            UvSpectrum(np.array([250.0, 300.0, 300.0, 400.0]), np.zeros(4))
        with pytest.raises(DomainError):
            UvSpectrum(np.array([250.0, 300.0, 400.0]), np.array([0.0, -0.1, 0.0]))
        with pytest.raises(FormatError):
            uvi_from_spectrum(UvSpectrum(np.array([260.0, 400.0]), np.zeros(2)))

    def test_classification_threshold_is_strict(self):
        assert classify_uvi(0.0) == "no-risk"
        assert classify_uvi(2.0) == "no-risk"
        assert classify_uvi(2.1) == "risk"
        with pytest.raises(DomainError):
            classify_uvi(-0.5)
