"""Exact noise spectrum of the damped mode and classical comparison spectra.

S(w) = S1(w) + S2(w): S1 carries the localized-mode (system) correlations,
S2 the reservoir thermal part. The low-frequency limit is a 1/f^x power law;
fit_power_law reads slopes the way one reads a log-log plot. Classical
random-telegraph-noise spectra (single Lorentzian and 1/nu^alpha ensembles)
are included for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .spectral import (
    LocalizedMode,
    ReservoirModel,
    find_localized_mode,
    j_omega,
    occupation,
    self_energy_profile,
)


@dataclass
class SpectrumSeries:
    """Sampled S(w) with its component breakdown.

    The localized-mode delta peak (weight Z^2 n0 at w = omega_b) is never
    sampled; it is reported through delta_weight and delta_location.
    """

    omegas: np.ndarray
    values: np.ndarray
    s1_values: np.ndarray
    s2_values: np.ndarray
    initial_occupation: float
    delta_weight: float = 0.0
    delta_location: float = 0.0


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    r_squared: float
    fit_range: tuple

    def __post_init__(self):
        if not 0.0 <= self.r_squared <= 1.0 + 1e-12:
            raise ValueError("r_squared outside [0, 1]")


def s_exact(model: ReservoirModel, omega, n0: float = 0.0,
            mode: LocalizedMode | None = None):
    """Spectrum components (s1, s2, delta_weight) at omega > 0.

    s2 = J(w) nbar(w) / ((w - w0 - Delta(w))^2 + gamma(w)^2) with
    gamma(w) = J(w)/2; s1 adds the localized-mode tail
    Z^2 J(w) nbar(w) / (w - w_b)^2 when the mode exists. The delta peak
    Z^2 n0 at w_b is returned as a weight, not sampled.
    """
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.any(w <= 0):
        raise ValueError("spectrum sampled at omega > 0 only")
    if mode is None:
        mode = find_localized_mode(model)

    jn = j_omega(model, w) * occupation(model.theta, w, model.omega0)
    gam = 0.5 * j_omega(model, w)
    delta = self_energy_profile(model, w)
    s2 = jn / ((w - model.omega0 - delta) ** 2 + gam ** 2)
    if mode.exists:
        s1 = mode.residue_z ** 2 * jn / (w - mode.omega_b) ** 2
        weight = mode.residue_z ** 2 * n0
    else:
        s1 = np.zeros_like(w)
        weight = 0.0
    if np.isscalar(omega) or np.ndim(omega) == 0:
        return float(s1[0]), float(s2[0]), weight
    return s1, s2, weight


def spectrum_series(model: ReservoirModel, omegas, n0: float = 0.0) -> SpectrumSeries:
    """Sample the exact spectrum on a frequency grid."""
    omegas = np.asarray(omegas, dtype=float)
    mode = find_localized_mode(model)
    s1, s2, weight = s_exact(model, omegas, n0=n0, mode=mode)
    return SpectrumSeries(
        omegas=omegas, values=s1 + s2, s1_values=s1, s2_values=s2,
        initial_occupation=n0, delta_weight=weight,
        delta_location=mode.omega_b if mode.exists else 0.0)


def s_low_freq(model: ReservoirModel, omega):
    """Low-frequency asymptote 2 pi eta w_c^(1-s) theta / (w0 w^x).

    This is the w -> 0 limit of s_exact: J(w) nbar -> 2 pi eta w_c^(1-s)
    theta w0 / w^x and the denominator -> w0^2. The 2 pi follows from the
    spectral-density normalization; see the decisions ledger.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise ValueError("asymptote defined for omega > 0")
    out = (2.0 * math.pi * model.eta * model.omega_c ** (1.0 - model.s)
           * model.theta / (model.omega0 * np.power(w, model.x)))
    return out if out.ndim else float(out)


def correction_term(model: ReservoirModel, omega):
    """First-order relative error 2 xi zeta of the power-law asymptote.

    xi = w0 / sqrt(w0^2 + gamma(w)^2), zeta = (w - Delta(w)) / sqrt(...).
    Small only in a narrow wedge of weak coupling and low frequency.
    """
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.any(w < 0):
        raise ValueError("omega >= 0 required")
    gam = 0.5 * j_omega(model, w)
    delta = np.where(w > 0, self_energy_profile(model, np.maximum(w, 1e-300)),
                     0.0)
    root = np.sqrt(model.omega0 ** 2 + gam ** 2)
    out = 2.0 * (model.omega0 / root) * ((w - delta) / root)
    if np.isscalar(omega) or np.ndim(omega) == 0:
        return float(out[0])
    return out


def validity_map(etas, omegas, x: float = 0.5, omega_c: float = 1.0,
                 omega0: float = 1.0) -> np.ndarray:
    """|2 xi zeta| over an (eta, omega) grid; rows follow etas."""
    out = np.empty((len(etas), len(omegas)))
    for i, eta in enumerate(etas):
        m = ReservoirModel.from_x(eta=float(eta), x=x, omega_c=omega_c,
                                  omega0=omega0)
        out[i] = np.abs(correction_term(m, omegas))
    return out


def fit_power_law(series: SpectrumSeries, fit_range) -> PowerLawFit:
    """OLS line on (log w, log S); exponent is minus the slope."""
    lo, hi = fit_range
    sel = (series.omegas >= lo) & (series.omegas <= hi)
    if np.count_nonzero(sel) < 8:
        raise ValueError("need at least 8 samples inside the fit range")
    w = series.omegas[sel]
    s = series.values[sel]
    if np.any(s <= 0):
        raise ValueError("power-law fit requires positive samples")
    lw, ls = np.log(w), np.log(s)
    slope, intercept = np.polyfit(lw, ls, 1)
    pred = slope * lw + intercept
    ss_res = float(np.sum((ls - pred) ** 2))
    ss_tot = float(np.sum((ls - ls.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return PowerLawFit(exponent=-slope, prefactor=float(np.exp(intercept)),
                       r_squared=min(r2, 1.0), fit_range=(float(lo), float(hi)))


def classical_rtn_spectrum(nu: float, omega):
    """Lorentzian spectrum of a single random-telegraph fluctuator."""
    if nu <= 0:
        raise ValueError("switching rate must be positive")
    w = np.asarray(omega, dtype=float)
    out = nu / (math.pi * (w ** 2 + nu ** 2))
    return out if out.ndim else float(out)


def classical_ensemble_spectrum(alpha: float, nu1: float, nu2: float, omega):
    """RTN ensemble spectrum: Lorentzians weighted by p(nu) ~ nu^-alpha.

    The normalization on [nu1, nu2] is analytic; the nu integral runs in
    log space by adaptive quadrature. nu1 = nu2 degenerates to a single
    fluctuator.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if nu1 <= 0 or nu2 < nu1:
        raise ValueError("need 0 < nu1 <= nu2")
    if nu1 == nu2:
        return classical_rtn_spectrum(nu1, omega)
    if alpha == 1.0:
        norm = 1.0 / math.log(nu2 / nu1)
    else:
        norm = (1.0 - alpha) / (nu2 ** (1.0 - alpha) - nu1 ** (1.0 - alpha))

    ws = np.atleast_1d(np.asarray(omega, dtype=float))
    out = np.empty_like(ws)
    la, lb = math.log(nu1), math.log(nu2)
    for i, w in enumerate(ws):
        def f(y):
            nu = math.exp(y)
            # extra nu from the log substitution
            return nu ** (1.0 - alpha) * nu / (w ** 2 + nu ** 2)
        pts = None
        if nu1 < abs(w) < nu2:
            pts = [math.log(abs(w))]
        val, _ = integrate.quad(f, la, lb, points=pts, limit=200,
                                epsabs=1e-13, epsrel=1e-10)
        out[i] = norm * val / math.pi
    if np.isscalar(omega) or np.ndim(omega) == 0:
        return float(out[0])
    return out
