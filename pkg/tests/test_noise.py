import math

import numpy as np
import pytest
from scipy import integrate

from flickerdyn.noise import (
    PowerLawFit,
    SpectrumSeries,
    classical_ensemble_spectrum,
    classical_rtn_spectrum,
    correction_term,
    fit_power_law,
    s_exact,
    s_low_freq,
    spectrum_series,
    validity_map,
)
from flickerdyn.spectral import (
    ReservoirModel,
    j_omega,
    occupation,
    self_energy_shift,
)

THETA_REF = 0.654


def weak_model(x=0.5, eta=1e-3):
    return ReservoirModel.from_x(eta=eta, x=x, omega_c=1.0, theta=THETA_REF)


# localized-mode constants for eta=0.7, s=0.5 (root of w - Delta(w) on the
# negative axis, pinned in test_spectral)
MODE_OMEGA_B = -1.3745469451250e-2
MODE_RESIDUE = 0.12132226096337263


class TestExactSpectrum:
    def test_s2_matches_pointwise_formula(self):
        m = ReservoirModel(eta=1e-2, s=0.5, omega_c=1.0, theta=THETA_REF)
        w = 0.037
        s1, s2, weight = s_exact(m, w)
        j = j_omega(m, w)
        nbar = occupation(m.theta, w, m.omega0)
        delta = self_energy_shift(m, w)
        expected = j * nbar / ((w - m.omega0 - delta) ** 2 + (0.5 * j) ** 2)
        assert s2 == pytest.approx(expected, rel=1e-6)
        assert s1 == 0.0
        assert weight == 0.0

    def test_localized_tail_and_delta_weight(self):
        m = ReservoirModel(eta=0.7, s=0.5, omega_c=1.0, theta=THETA_REF)
        w = 0.4
        s1, s2, weight = s_exact(m, w, n0=1.5)
        jn = j_omega(m, w) * occupation(m.theta, w, m.omega0)
        expected_s1 = MODE_RESIDUE ** 2 * jn / (w - MODE_OMEGA_B) ** 2
        assert s1 == pytest.approx(expected_s1, rel=1e-9)
        assert s2 > 0
        assert weight == pytest.approx(MODE_RESIDUE ** 2 * 1.5, rel=1e-9)

    def test_series_additivity_and_delta_fields(self):
        m = ReservoirModel(eta=0.7, s=0.5, omega_c=1.0, theta=THETA_REF)
        ws = np.geomspace(1e-3, 2.0, 40)
        ser = spectrum_series(m, ws, n0=2.0)
        assert np.array_equal(ser.values, ser.s1_values + ser.s2_values)
        assert np.all(ser.values > 0)
        assert ser.initial_occupation == 2.0
        assert ser.delta_weight == pytest.approx(2.0 * MODE_RESIDUE ** 2, rel=1e-9)
        assert ser.delta_location == pytest.approx(MODE_OMEGA_B, rel=1e-8)

    def test_no_mode_means_no_delta(self):
        ser = spectrum_series(weak_model(), np.geomspace(1e-4, 1.0, 20), n0=3.0)
        assert ser.delta_weight == 0.0
        assert ser.delta_location == 0.0
        assert np.all(ser.s1_values == 0.0)

    def test_zero_temperature_spectrum_is_pure_delta(self):
        m = ReservoirModel(eta=0.7, s=0.5, omega_c=1.0, theta=0.0)
        s1, s2, weight = s_exact(m, 0.5, n0=2.0)
        assert s1 == 0.0 and s2 == 0.0
        assert weight == pytest.approx(2.0 * MODE_RESIDUE ** 2, rel=1e-9)

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(ValueError):
            s_exact(weak_model(), 0.0)
        with pytest.raises(ValueError):
            s_exact(weak_model(), np.array([0.1, -0.2]))

    def test_scalar_in_scalar_out(self):
        s1, s2, _ = s_exact(weak_model(), 1e-3)
        assert isinstance(s1, float) and isinstance(s2, float)


class TestLowFrequencyAsymptote:
    @pytest.mark.parametrize("x", [0.25, 0.5, 0.75, 0.9999])
    def test_power_law_slope(self, x):
        """Fitted log-log slope reproduces -x well inside the wedge."""
        m = weak_model(x=x)
        ws = np.geomspace(1e-4, 1e-2, 48)
        fit = fit_power_law(spectrum_series(m, ws), (1e-4, 1e-2))
        assert fit.exponent == pytest.approx(x, abs=0.05)
        assert fit.r_squared > 0.999

    def test_closed_form_value(self):
        m = weak_model(x=0.75)
        w = 2e-4
        expected = (2.0 * math.pi * m.eta * m.omega_c ** (1.0 - m.s)
                    * m.theta / (m.omega0 * w ** m.x))
        assert s_low_freq(m, w) == pytest.approx(expected, rel=1e-12)

    def test_relative_error_bounded_by_correction(self):
        # |S/S_low - 1| <= |2 xi zeta| + 0.01 across the weak-coupling block
        ws = np.geomspace(1e-4, 0.3, 24)
        for eta in (1e-4, 1e-3, 1e-2):
            m = weak_model(eta=eta)
            ser = spectrum_series(m, ws)
            rel = np.abs(ser.values / s_low_freq(m, ws) - 1.0)
            assert np.all(rel <= np.abs(correction_term(m, ws)) + 0.01)

    def test_temperature_linearity(self):
        w = 1e-4
        cold = ReservoirModel.from_x(eta=1e-3, x=0.5, omega_c=1.0,
                                     theta=THETA_REF)
        hot = ReservoirModel.from_x(eta=1e-3, x=0.5, omega_c=1.0,
                                    theta=2 * THETA_REF)
        _, s2c, _ = s_exact(cold, w)
        _, s2h, _ = s_exact(hot, w)
        assert s2h / s2c == pytest.approx(2.0, abs=0.01)

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(ValueError):
            s_low_freq(weak_model(), 0.0)


class TestCorrectionTerm:
    def test_matches_components(self):
        m = weak_model()
        w = 0.01
        gam = 0.5 * j_omega(m, w)
        delta = self_energy_shift(m, w)
        root = math.sqrt(m.omega0 ** 2 + gam ** 2)
        expected = 2.0 * (m.omega0 / root) * ((w - delta) / root)
        val = correction_term(m, w)
        assert val == pytest.approx(expected, rel=1e-6)
        # order w/w0 in the wedge
        assert 0.01 < val < 0.04

    def test_zero_frequency(self):
        assert correction_term(weak_model(), 0.0) == 0.0

    def test_rejects_negative_frequency(self):
        with pytest.raises(ValueError):
            correction_term(weak_model(), -0.1)

    def test_validity_map_wedge(self):
        etas = np.geomspace(1e-5, 1.0, 21)
        ws = np.geomspace(1e-5, 1.0, 21)
        vm = validity_map(etas, ws, x=0.5)
        assert vm.shape == (21, 21)
        corner = vm[np.ix_(etas <= 1e-3, ws <= 1e-2)]
        assert corner.max() <= 0.05
        outside = vm[np.ix_(etas >= 0.3, ws >= 0.3)]
        assert outside.min() > 0.5

    def test_monotone_growth_weak_coupling(self):
        """|2 xi zeta| grows with frequency on every weak-coupling slice."""
        etas = np.geomspace(1e-5, 1e-3, 7)
        ws = np.geomspace(1e-5, 1.0, 31)
        vm = validity_map(etas, ws, x=0.5)
        assert np.all(np.diff(vm, axis=1) > 0)


class TestPowerLawFit:
    def test_recovers_exact_law(self):
        ws = np.geomspace(1e-4, 1e-1, 30)
        vals = 3.7 * ws ** -0.5
        ser = SpectrumSeries(omegas=ws, values=vals, s1_values=np.zeros_like(ws),
                             s2_values=vals, initial_occupation=0.0)
        fit = fit_power_law(ser, (1e-4, 1e-1))
        assert fit.exponent == pytest.approx(0.5, abs=1e-12)
        assert fit.prefactor == pytest.approx(3.7, rel=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.fit_range == (1e-4, 1e-1)

    def test_fit_quality_collapses_at_resonance(self):
        # the quasiparticle peak near w0 is no power law
        m = weak_model()
        ser = spectrum_series(m, np.geomspace(1e-4, 1.2, 400))
        low = fit_power_law(ser, (1e-4, 1e-2))
        wide = fit_power_law(ser, (1e-4, 1.2))
        assert low.r_squared > 0.9999
        assert wide.r_squared < 0.8

    def test_too_few_samples(self):
        ws = np.geomspace(1e-3, 1e-2, 20)
        ser = SpectrumSeries(omegas=ws, values=ws, s1_values=ws,
                             s2_values=ws, initial_occupation=0.0)
        with pytest.raises(ValueError):
            fit_power_law(ser, (1e-3, 1.5e-3))

    def test_rejects_nonpositive_values(self):
        ws = np.geomspace(1e-3, 1e-2, 20)
        vals = np.ones_like(ws)
        vals[3] = 0.0
        ser = SpectrumSeries(omegas=ws, values=vals, s1_values=vals,
                             s2_values=vals, initial_occupation=0.0)
        with pytest.raises(ValueError):
            fit_power_law(ser, (1e-3, 1e-2))

    def test_r_squared_validation(self):
        with pytest.raises(ValueError):
            PowerLawFit(exponent=1.0, prefactor=1.0, r_squared=1.5,
                        fit_range=(0.0, 1.0))


class TestClassicalSpectra:
    def test_rtn_peak_and_half_width(self):
        nu = 0.3
        assert classical_rtn_spectrum(nu, 0.0) == pytest.approx(
            1.0 / (math.pi * nu), rel=1e-12)
        assert classical_rtn_spectrum(nu, nu) == pytest.approx(
            0.5 / (math.pi * nu), rel=1e-12)

    def test_rtn_normalization(self):
        val, _ = integrate.quad(lambda w: classical_rtn_spectrum(0.7, w),
                                -np.inf, np.inf)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_rtn_rejects_bad_rate(self):
        with pytest.raises(ValueError):
            classical_rtn_spectrum(0.0, 1.0)

    def test_degenerate_ensemble_is_single_fluctuator(self):
        ws = np.geomspace(1e-2, 10.0, 9)
        assert np.allclose(classical_ensemble_spectrum(1.3, 0.5, 0.5, ws),
                           classical_rtn_spectrum(0.5, ws), rtol=1e-14)

    def test_alpha_one_closed_form(self):
        """p(nu) ~ 1/nu integrates to an arctan difference."""
        nu1, nu2 = 1e-4, 1e2
        norm = math.log(nu2 / nu1)
        for w in (1e-3, 0.1, 1.0, 50.0):
            expected = (math.atan(nu2 / w) - math.atan(nu1 / w)) / (
                w * math.pi * norm)
            assert classical_ensemble_spectrum(1.0, nu1, nu2, w) == (
                pytest.approx(expected, rel=1e-8))

    def test_alpha_one_unit_slope(self):
        ws = np.geomspace(1e-2, 1.0, 25)
        vals = classical_ensemble_spectrum(1.0, 1e-4, 1e2, ws)
        slope = np.polyfit(np.log(ws), np.log(vals), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.02)

    def test_alpha_three_halves_slope(self):
        ws = np.geomspace(1e-2, 1.0, 25)
        vals = classical_ensemble_spectrum(1.5, 1e-4, 1e2, ws)
        slope = np.polyfit(np.log(ws), np.log(vals), 1)[0]
        assert slope == pytest.approx(-1.5, abs=0.1)

    def test_monotone_decreasing(self):
        ws = np.geomspace(1e-3, 10.0, 40)
        vals = classical_ensemble_spectrum(1.2, 1e-3, 10.0, ws)
        assert np.all(np.diff(vals) < 0)

    def test_ensemble_validation(self):
        with pytest.raises(ValueError):
            classical_ensemble_spectrum(0.0, 0.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            classical_ensemble_spectrum(1.0, 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            classical_ensemble_spectrum(1.0, 1.0, 0.5, 1.0)
