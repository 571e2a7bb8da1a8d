"""Brute-force checkers for the analytic and fast paths.

Three independent routes:

* a discretized bath evolved exactly as an (N+1)-mode linear system,
  validating u(t) and v(t) without any Volterra machinery;
* a direct two-dimensional composite quadrature for v(t) at spot times;
* a Fock-truncated integration of the time-local master equation followed
  by a displaced-parity transform, validating the closed-form Wigner
  propagation through a completely different representation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh
from scipy.special import eval_genlaguerre, gammaln

from .greens import MasterCoefficients, TimeGrid
from .spectral import ReservoirModel, j_omega, kernel_g_tilde_series, occupation
from .wigner import PhaseSpaceGrid, WignerField

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-6
LEAKAGE_TOL = 1e-6


class TraceDriftError(RuntimeError):
    """Density-matrix trace left 1 beyond tolerance."""


class LeakageError(RuntimeError):
    """Population reached the top of the truncated Fock space."""


@dataclass(frozen=True)
class DiscreteBath:
    """Finite sampling of the reservoir: N modes with real couplings.

    Invariant by construction: |V_k|^2 * 2 pi / dw_k reproduces J at the
    sample points. A single mode is allowed for closed-form checks
    (resonant Rabi case); discretize_bath always produces N >= 2.
    """

    mode_freqs: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        freqs = np.asarray(self.mode_freqs, dtype=float)
        coups = np.asarray(self.couplings, dtype=float)
        if freqs.ndim != 1 or freqs.size < 1 or freqs.size != coups.size:
            raise ValueError("need matching 1-D mode_freqs and couplings")
        if np.any(freqs <= 0):
            raise ValueError("mode frequencies must be positive")
        if freqs.size > 1 and np.any(np.diff(freqs) <= 0):
            raise ValueError("mode frequencies must increase")
        object.__setattr__(self, "mode_freqs", freqs)
        object.__setattr__(self, "couplings", coups)

    @property
    def n_modes(self) -> int:
        return self.mode_freqs.size


def discretize_bath(model: ReservoirModel, n_modes: int,
                    omega_min: float | None = None,
                    omega_max: float | None = None) -> DiscreteBath:
    """Log-spaced bath on [1e-6, 10] w0 with midpoint couplings.

    The geometric spacing concentrates modes at low frequency, where the
    1/f^x weight lives; |V_k|^2 = J(w_k) dw_k / 2pi.
    """
    if n_modes < 2:
        raise ValueError("need at least 2 modes")
    lo = 1e-6 * model.omega0 if omega_min is None else omega_min
    hi = 10.0 * model.omega0 if omega_max is None else omega_max
    if not 0 < lo < hi:
        raise ValueError("need 0 < omega_min < omega_max")
    edges = np.geomspace(lo, hi, n_modes + 1)
    freqs = 0.5 * (edges[1:] + edges[:-1])
    widths = np.diff(edges)
    couplings = np.sqrt(j_omega(model, freqs) * widths / (2.0 * math.pi))
    return DiscreteBath(mode_freqs=freqs, couplings=couplings)


def recurrence_time(bath: DiscreteBath, omega0: float = 1.0) -> float:
    """Artificial revival time, 2 pi over the mode spacing at resonance.

    Only the spacing where spectral weight actually sits matters; for a
    log-spaced bath the global extremes are either vacuous (first cell)
    or harmless (exponentially cut tail).
    """
    if bath.n_modes < 2:
        return math.inf
    spacings = np.diff(bath.mode_freqs)
    centers = 0.5 * (bath.mode_freqs[1:] + bath.mode_freqs[:-1])
    at = int(np.argmin(np.abs(centers - omega0)))
    return 2.0 * math.pi / float(spacings[at])


def bath_u_v(bath: DiscreteBath, model: ReservoirModel, grid: TimeGrid):
    """Exact linear evolution of system + N modes.

    Diagonalizes the one-excitation Hamiltonian; u_N is the system-system
    propagator entry and v_N sums thermal weights over the system-mode
    entries. Valid only before recurrence_time(bath).
    """
    n = bath.n_modes
    h = np.zeros((n + 1, n + 1))
    h[0, 0] = model.omega0
    h[np.arange(1, n + 1), np.arange(1, n + 1)] = bath.mode_freqs
    h[0, 1:] = bath.couplings
    h[1:, 0] = bath.couplings
    vals, vecs = eigh(h)

    ts = grid.times
    q0 = vecs[0, :]
    nbar = np.zeros(n + 1)
    if model.theta > 0:
        nbar[1:] = occupation(model.theta, bath.mode_freqs, model.omega0)

    u_n = np.empty(ts.size, dtype=complex)
    v_n = np.empty(ts.size)
    chunk = max(1, int(4e6) // (n + 1))
    for start in range(0, ts.size, chunk):
        block = ts[start:start + chunk]
        phase = np.exp(-1j * np.outer(vals, block))
        weighted = q0[:, None] * phase
        u_n[start:start + chunk] = (np.abs(q0) ** 2) @ phase
        if model.theta > 0:
            amps = vecs @ weighted
            v_n[start:start + chunk] = nbar @ (np.abs(amps) ** 2)
        else:
            v_n[start:start + chunk] = 0.0
    return u_n, v_n


def brute_force_v(model: ReservoirModel, u, grid: TimeGrid, t_index: int):
    """v at one sample by direct 2-D trapezoid over the full (a, b) square.

    O(n^2) per call; exists purely to spot-check the structured evaluator.
    """
    u = np.asarray(u, dtype=complex)
    if u.size != grid.n_steps + 1:
        raise ValueError("u length does not match the grid")
    if not 0 <= t_index <= grid.n_steps:
        raise ValueError("t_index outside the grid")
    if t_index == 0 or model.theta == 0:
        return 0.0
    k = t_index
    dt = grid.dt
    row = kernel_g_tilde_series(model, dt * np.arange(-k, k + 1))
    kernel = row[(np.arange(k + 1)[:, None] - np.arange(k + 1)[None, :]) + k]
    w = np.ones(k + 1)
    w[0] = w[-1] = 0.5
    ua = np.conj(u[:k + 1]) * w
    ub = u[:k + 1] * w
    val = dt * dt * np.einsum("a,ab,b->", ua, kernel, ub)
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise ValueError(f"double quadrature returned complex v: {val}")
    return float(val.real)


@dataclass
class TruncatedDensityMatrix:
    """rho(t) in the Fock basis 0..dim-1."""

    dim: int
    entries: np.ndarray
    time: float

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def leakage(self) -> float:
        """Population in the top two levels."""
        pops = np.diag(self.entries).real
        return float(pops[-1] + pops[-2])

    def smallest_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


def _superposition_density(n: int, m: int, dim: int) -> np.ndarray:
    rho = np.zeros((dim, dim), dtype=complex)
    for j in (n, m):
        for k in (n, m):
            rho[j, k] = 0.5
    return rho


def _liouville(rho, omega_p, gamma, gamma_tilde, levels):
    jj = levels[:, None]
    kk = levels[None, :]
    down = np.zeros_like(rho)
    down[:-1, :-1] = np.sqrt((jj[:-1] + 1.0) * (kk[:, :-1] + 1.0)) * rho[1:, 1:]
    up = np.zeros_like(rho)
    up[1:, 1:] = np.sqrt(jj[1:] * kk[:, 1:]) * rho[:-1, :-1]
    out = -1j * omega_p * (jj - kk) * rho
    out += gamma * (2.0 * down - (jj + kk) * rho)
    out += gamma_tilde * (down + up - (jj + kk + 1.0) * rho)
    return out


def integrate_master_equation(coeffs: MasterCoefficients, state, n_max: int,
                              times):
    """Classic fixed-step 4th-order run of the time-local master equation.

    Coefficients are taken on their own lattice (midpoint values averaged
    from neighbors), so the step size equals the coefficient grid spacing.
    Returns one TruncatedDensityMatrix per requested time.
    """
    if n_max < state.n + state.m + 8:
        raise ValueError("n_max must be at least n + m + 8")
    requested = np.atleast_1d(np.asarray(times, dtype=float))
    grid = coeffs.grid
    ts = grid.times
    if np.any(requested < ts[0]) or np.any(requested > ts[-1]):
        raise ValueError("requested time outside the coefficient range")
    idx = (requested - ts[0]) / grid.dt
    snap = np.rint(idx).astype(int)
    if np.any(np.abs(idx - snap) > 1e-9):
        raise ValueError("requested times must lie on the coefficient lattice")

    last = int(snap.max())
    for arr in (coeffs.omega0_prime, coeffs.gamma, coeffs.gamma_tilde):
        if not np.all(np.isfinite(arr[:last + 1])):
            raise ValueError("coefficients undefined inside the horizon")

    dim = n_max + 1
    levels = np.arange(dim, dtype=float)
    rho = _superposition_density(state.n, state.m, dim)
    h = grid.dt
    out = {}
    if 0 in snap:
        out[0] = rho.copy()
    for k in range(last):
        c0 = (coeffs.omega0_prime[k], coeffs.gamma[k], coeffs.gamma_tilde[k])
        c1 = (coeffs.omega0_prime[k + 1], coeffs.gamma[k + 1],
              coeffs.gamma_tilde[k + 1])
        ch = tuple(0.5 * (a + b) for a, b in zip(c0, c1))
        k1 = _liouville(rho, *c0, levels)
        k2 = _liouville(rho + 0.5 * h * k1, *ch, levels)
        k3 = _liouville(rho + 0.5 * h * k2, *ch, levels)
        k4 = _liouville(rho + h * k3, *c1, levels)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if k + 1 in snap:
            out[k + 1] = rho.copy()

    series = []
    for i, t in zip(snap, requested):
        entry = TruncatedDensityMatrix(dim=dim, entries=out[int(i)],
                                       time=float(t))
        if abs(entry.trace() - 1.0) > TRACE_TOL:
            raise TraceDriftError(
                f"trace drifted to {entry.trace():.10f} at t={t}")
        if entry.leakage() > LEAKAGE_TOL:
            raise LeakageError(
                f"top-level population {entry.leakage():.3e} at t={t}; "
                "raise n_max")
        series.append(entry)
    return series


def _displacement_column(k: int, j: int, alpha, alpha_sq):
    """<k|D(alpha)|j> from the closed form with log-factorial prefactors."""
    if k >= j:
        pref = math.exp(0.5 * (gammaln(j + 1) - gammaln(k + 1)))
        return (pref * alpha ** (k - j)
                * eval_genlaguerre(j, k - j, alpha_sq))
    pref = math.exp(0.5 * (gammaln(k + 1) - gammaln(j + 1)))
    return (pref * (-np.conj(alpha)) ** (j - k)
            * eval_genlaguerre(k, j - k, alpha_sq))


def wigner_from_density_matrix(rho: TruncatedDensityMatrix,
                               grid: PhaseSpaceGrid | None = None,
                               state_label: str = "density-matrix oracle"):
    """Displaced-parity transform W(z) = (2/pi) tr[rho D(2z) P].

    Matrix elements of the displacement are exact closed forms, so the
    only truncation effect is the leakage already bounded by the
    integrator; a warning flags displacements near the cutoff.
    """
    if grid is None:
        grid = PhaseSpaceGrid()
    xs, ys = grid.axes()
    zs = xs[None, :] + 1j * ys[:, None]
    zz = np.abs(zs) ** 2
    if float(np.max(zz)) >= rho.dim - 1:
        warnings.warn(
            "displacement amplitude reaches the Fock cutoff; enlarge n_max "
            "or shrink the grid", RuntimeWarning, stacklevel=2)

    alpha = 2.0 * zs
    alpha_sq = np.abs(alpha) ** 2
    envelope = np.exp(-0.5 * alpha_sq)
    total = np.zeros_like(zs)
    parity = 1.0 - 2.0 * (np.arange(rho.dim) % 2)
    for j in range(rho.dim):
        for k in range(rho.dim):
            coef = rho.entries[j, k] * parity[j]
            if coef == 0:
                continue
            total += coef * _displacement_column(k, j, alpha, alpha_sq)
    values = (2.0 / math.pi) * envelope * total
    residue = float(np.max(np.abs(values.imag)))
    if residue > 1e-9:
        raise ValueError(f"Wigner transform not real (residue {residue:.3e})")
    return WignerField(re_grid=xs, im_grid=ys, values=values.real,
                       time=rho.time, state_label=state_label)
