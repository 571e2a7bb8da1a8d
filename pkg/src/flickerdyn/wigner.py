"""Closed-form Wigner propagation for Fock superpositions.

Any initial state of the form (|n> + |m>)/sqrt(2) evolves under the exact
master equation into a field that depends on the dynamics only through
u(t) and v(t): a squeezing-free Gaussian envelope times polynomials in
z and z*. Everything here is a pure function of (z, u, v).

The Gaussian envelope used throughout is W00 = (Omega/pi) exp(-Omega|z|^2)
with Omega = 2/(1+2v), which integrates to exactly 1 under d^2z = dx dy;
see the decisions ledger for the normalization choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .greens import GreensSolution

# hard bound for any unit-trace state; parity expectation cannot exceed 1
WIGNER_BOUND = 2.0 / math.pi

# the two interference sums are mutual conjugates; anything beyond this is
# a genuine bug, not roundoff
IMAG_RESIDUE_TOL = 1e-10

MAX_PHOTON_NUMBER = 60


@dataclass(frozen=True)
class SuperpositionState:
    """(|n> + |m>)/sqrt(2) with fixed equal amplitudes."""

    n: int
    m: int

    def __post_init__(self):
        for label, value in (("n", self.n), ("m", self.m)):
            if int(value) != value or value < 0:
                raise ValueError(f"{label} must be a non-negative integer")
        if self.n == self.m:
            raise ValueError("superposition requires n != m")
        if max(self.n, self.m) > MAX_PHOTON_NUMBER:
            raise ValueError(
                f"photon numbers above {MAX_PHOTON_NUMBER} overflow the "
                "closed-form coefficients")

    @property
    def label(self) -> str:
        return f"(|{self.n}> + |{self.m}>)/sqrt(2)"


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Square sampling grid for z = x + iy."""

    half_width: float = 5.0
    points: int = 256

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.points < 8:
            raise ValueError("need at least 8 points per axis")

    def axes(self):
        ax = np.linspace(-self.half_width, self.half_width, self.points)
        return ax, ax.copy()


@dataclass
class WignerField:
    """One Wigner snapshot; values[i, j] = W(re_grid[j] + 1i*im_grid[i])."""

    re_grid: np.ndarray
    im_grid: np.ndarray
    values: np.ndarray
    time: float
    state_label: str

    def norm(self) -> float:
        inner = np.trapezoid(self.values, self.re_grid, axis=1)
        return float(np.trapezoid(inner, self.im_grid))


def omega_factor(v: float) -> float:
    """Inverse width 2/(1+2v) of the thermal Gaussian envelope."""
    if v < 0:
        raise ValueError("v must be non-negative")
    return 2.0 / (1.0 + 2.0 * v)


def w_vacuum(z, u, v):
    """Evolved vacuum field (Omega/pi) exp(-Omega |z|^2); u drops out."""
    omega = omega_factor(v)
    zz = np.abs(np.asarray(z)) ** 2
    out = (omega / math.pi) * np.exp(-omega * zz)
    if np.isscalar(z):
        return float(out)
    return out


def _validate_photon_number(n) -> int:
    if int(n) != n or n < 0:
        raise ValueError("photon number must be a non-negative integer")
    if n > MAX_PHOTON_NUMBER:
        raise ValueError(
            f"photon numbers above {MAX_PHOTON_NUMBER} overflow the "
            "closed-form coefficients")
    return int(n)


def w_fock_diagonal(n, z, u, v):
    """Evolved |n><n| field: W00 times a finite polynomial in |z|^2.

    Coefficients n!/(p!(n-p)!(n-p)!) accumulate in log space so n up to
    MAX_PHOTON_NUMBER stays finite.
    """
    n = _validate_photon_number(n)
    omega = omega_factor(v)
    usq = abs(u) ** 2
    q = usq * omega ** 2 * np.abs(np.asarray(z)) ** 2
    b = 1.0 - usq * omega
    total = np.zeros_like(q)
    for p in range(n + 1):
        log_coef = gammaln(n + 1) - gammaln(p + 1) - 2.0 * gammaln(n - p + 1)
        total = total + math.exp(log_coef) * np.power(q, n - p) * b ** p
    out = w_vacuum(z, u, v) * total
    if np.isscalar(z):
        return float(out)
    return out


def w_superposition(state: SuperpositionState, z, u, v):
    """Evolved field of (|n> + |m>)/sqrt(2): diagonal mean + interference.

    The two interference sums are evaluated independently and must be
    conjugates of each other; the imaginary residue is asserted below
    IMAG_RESIDUE_TOL and discarded.
    """
    n, m = state.n, state.m
    scalar = np.isscalar(z)
    z = np.asarray(z, dtype=complex)
    diag = 0.5 * (w_fock_diagonal(n, z, u, v) + w_fock_diagonal(m, z, u, v))

    omega = omega_factor(v)
    usq = abs(u) ** 2
    b = 1.0 - usq * omega
    zeta = np.conj(z) * omega * u
    zeta_c = np.conj(zeta)
    term_a = np.zeros_like(z)
    term_b = np.zeros_like(z)
    for p in range(min(n, m) + 1):
        log_coef = (0.5 * gammaln(n + 1) + 0.5 * gammaln(m + 1)
                    - gammaln(p + 1) - gammaln(n - p + 1) - gammaln(m - p + 1))
        coef = math.exp(log_coef) * b ** p
        term_a = term_a + coef * zeta ** (n - p) * zeta_c ** (m - p)
        term_b = term_b + coef * zeta ** (m - p) * zeta_c ** (n - p)
    interference = 0.5 * w_vacuum(z, u, v) * (term_a + term_b)
    residue = float(np.max(np.abs(interference.imag))) if interference.size else 0.0
    if residue >= IMAG_RESIDUE_TOL:
        raise AssertionError(
            f"interference terms are not conjugate (residue {residue:.3e})")
    out = diag + interference.real
    if scalar:
        return float(out)
    return out


def snapshot_series(state: SuperpositionState, solution: GreensSolution,
                    times, grid: PhaseSpaceGrid | None = None,
                    norm_tol: float = 1e-6):
    """Wigner fields at the requested times, u and v linearly interpolated.

    Raises if a requested time falls outside the solution range or if the
    grid fails to capture the state (normalization drifts past norm_tol).
    """
    if grid is None:
        grid = PhaseSpaceGrid()
    ts = solution.grid.times
    requested = np.asarray(times, dtype=float)
    if requested.ndim != 1:
        requested = np.atleast_1d(requested)
    if np.any(requested < ts[0]) or np.any(requested > ts[-1]):
        raise ValueError("requested time outside the solution range")

    u_t = (np.interp(requested, ts, solution.u.real)
           + 1j * np.interp(requested, ts, solution.u.imag))
    v_t = np.maximum(np.interp(requested, ts, solution.v), 0.0)

    xs, ys = grid.axes()
    zs = xs[None, :] + 1j * ys[:, None]
    fields = []
    for t, u_i, v_i in zip(requested, u_t, v_t):
        values = w_superposition(state, zs, complex(u_i), float(v_i))
        if not np.all(np.isfinite(values)):
            raise ValueError(f"non-finite Wigner values at t={t}")
        field = WignerField(re_grid=xs, im_grid=ys, values=values,
                            time=float(t), state_label=state.label)
        norm = field.norm()
        if abs(norm - 1.0) > norm_tol:
            raise ValueError(
                f"grid does not capture the state at t={t}: "
                f"integral {norm:.8f} (half_width {grid.half_width})")
        fields.append(field)
    return fields
