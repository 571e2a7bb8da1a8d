"""Nonequilibrium Green's functions u(t), v(t) and master-equation rates.

The retarded propagator u(t) obeys a Volterra integro-differential equation
with memory kernel g(t); the correlation function v(t) follows from u and
the thermal kernel g_tilde by a double time integral. Two independent u
solvers are provided (time stepping and a branch-cut spectral integral) so
each can serve as an oracle for the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.signal import fftconvolve
from scipy.special import roots_legendre

from .spectral import (
    ConvergenceError,
    ReservoirModel,
    find_localized_mode,
    j_omega,
    kernel_g,
    kernel_g_tilde_series,
    self_energy_profile,
)

# |u| may not exceed this without the step solver flagging instability.
CONTRACTIVITY_TOL = 1e-6
# Samples with |u| below the floor give undefined master coefficients.
DIVISION_FLOOR = 1e-9
# Tolerated imaginary residue of v(t), relative to max(1, |v|).
V_RESIDUE_TOL = 1e-8


class InstabilityError(RuntimeError):
    """Step solver produced |u| > 1 + tolerance: grid too coarse or model bad."""


class ResidueError(RuntimeError):
    """Imaginary part of v(t) exceeded tolerance: kernel or contraction bug."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_k = t0 + k dt, k = 0..n_steps (n_steps+1 samples)."""

    t0: float
    dt: float
    n_steps: int

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 2:
            raise ValueError("need at least two steps")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1)

    @classmethod
    def from_horizon(cls, horizon: float, dt: float, t0: float = 0.0):
        return cls(t0=t0, dt=dt, n_steps=int(round(horizon / dt)))

    def halved(self) -> "TimeGrid":
        """Companion grid with doubled step covering the same span."""
        return TimeGrid(t0=self.t0, dt=2.0 * self.dt, n_steps=self.n_steps // 2)


@dataclass
class GreensSolution:
    grid: TimeGrid
    u: np.ndarray
    v: np.ndarray
    u_error: float | None = None
    v_error: float | None = None

    def __post_init__(self):
        if len(self.u) != self.grid.n_steps + 1 or len(self.v) != len(self.u):
            raise ValueError("u, v must be sampled on the grid")


@dataclass
class MasterCoefficients:
    """Time-local rates: frequency shift, dissipation, fluctuation."""

    grid: TimeGrid
    omega0_prime: np.ndarray
    gamma: np.ndarray
    gamma_tilde: np.ndarray
    defined: np.ndarray = field(default=None)  # False where |u| underflowed


def default_dt(model: ReservoirModel) -> float:
    # steeper kernels (small s) want the finer default step
    return 1e-3 if model.s <= 0.25 else 5e-3


def solve_u_volterra(model: ReservoirModel, grid: TimeGrid,
                     error_estimate: bool = True):
    """March u through u' = -i w0 u - int_0^t g(t-tau) u(tau) dtau.

    Trapezoidal product integration of the convolution with one Heun
    predictor-corrector pass per step (second order overall). Returns
    (u, err) where err is a Richardson estimate of the sup-norm error
    from a doubled-step companion run, or None when not requested.
    """
    n = grid.n_steps
    dt = grid.dt
    w0 = model.omega0
    ts_rel = grid.times - grid.t0
    if model.eta == 0.0:
        u = np.exp(-1j * w0 * ts_rel)
        return u, (0.0 if error_estimate else None)

    g = np.asarray(kernel_g(model, dt * np.arange(n + 1)))
    grev = g[::-1].copy()
    half_g0_dt = 0.5 * dt * g[0]
    cap = 1.0 + CONTRACTIVITY_TOL

    u = np.empty(n + 1, dtype=complex)
    u[0] = 1.0
    conv = 0.0 + 0.0j  # trapezoid convolution at the current step
    for k in range(n):
        f0 = -1j * w0 * u[k] - conv
        pred = u[k] + dt * f0
        # partial convolution at t_{k+1}: nodes 0..k, end node handled below
        part = dt * (0.5 * g[k + 1] * u[0]
                     + (np.dot(grev[n - k:n], u[1:k + 1]) if k else 0.0))
        f1 = -1j * w0 * pred - (part + half_g0_dt * pred)
        u[k + 1] = u[k] + 0.5 * dt * (f0 + f1)
        if abs(u[k + 1]) > cap:
            raise InstabilityError(
                f"|u| = {abs(u[k + 1]):.6f} at t = {grid.times[k + 1]:.4g}; "
                f"refine dt or check the model")
        conv = part + half_g0_dt * u[k + 1]

    if not error_estimate:
        return u, None
    try:
        coarse, _ = solve_u_volterra(model, grid.halved(), error_estimate=False)
    except InstabilityError:
        # companion at doubled step blew up: no certified estimate
        return u, float("inf")
    shared = u[::2][:len(coarse)]
    err = float(np.max(np.abs(shared - coarse)) / 3.0)
    return u, err


def _legendre_panel(a: float, b: float, order: int):
    x, w = roots_legendre(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def _branch_nodes(model: ReservoirModel, t_max: float, order: int):
    """Quadrature nodes for the branch-cut integral over w in (0, inf).

    Geometric panels resolve the log-scale structure near w -> 0 (the
    self-energy varies on the ln w scale when s is small), linear panels
    capped at half an oscillation period of exp(-i w t_max) cover the bulk,
    and nested panels scaled by the quasiparticle width resolve the
    resonance peak(s) where w - w0 - Delta(w) crosses zero.
    """
    w0, wc = model.omega0, model.omega_c
    a_head = 0.1 * min(w0, wc)
    top = w0 + 30.0 * wc
    w_osc = np.pi / (2.0 * max(t_max, 1e-6))
    w_osc = min(w_osc, 0.25 * min(w0, wc))

    breaks = list(np.geomspace(1e-30 * w0, a_head,
                               max(2, int(np.ceil(np.log10(a_head / (1e-30 * w0))))) + 1))
    breaks += list(np.arange(a_head, w0 + 6.0 * wc, w_osc))
    breaks += list(np.geomspace(w0 + 6.0 * wc, top, 9))

    # locate quasiparticle resonances: zeros of F(w) = w - w0 - Delta(w)
    scan = np.unique(np.concatenate([
        np.geomspace(1e-12 * w0, 0.99 * top, 900),
        np.linspace(1e-3 * w0, 0.99 * top, 900)]))
    fvals = scan - w0 - self_energy_profile(model, scan)
    sign_flip = np.nonzero(np.diff(np.sign(fvals)) != 0)[0]
    for i in sign_flip[:4]:
        wstar = brentq(
            lambda w: w - w0 - float(self_energy_profile(model, np.array([w]))[0]),
            scan[i], scan[i + 1], xtol=1e-14 * w0)
        gam = max(0.5 * j_omega(model, wstar), 1e-12 * w0)
        for k in (-3000.0, -1000.0, -300.0, -100.0, -30.0, -10.0, -3.0, -1.0,
                  1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0):
            wb = wstar + k * gam
            if 0.0 < wb < top:
                breaks.append(wb)
        breaks.append(wstar)

    breaks = np.unique(np.clip(np.asarray(breaks), 1e-30 * w0, top))
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b - a <= 0:
            continue
        pieces = int(np.ceil((b - a) / w_osc)) if (b - a) > w_osc else 1
        for j in range(pieces):
            lo = a + (b - a) * j / pieces
            hi = a + (b - a) * (j + 1) / pieces
            x, w = _legendre_panel(lo, hi, order)
            nodes.append(x)
            weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def solve_u_spectral(model: ReservoirModel, grid: TimeGrid,
                     sum_rule_tol: float = 1e-6) -> np.ndarray:
    """Evaluate u(t) from its spectral representation.

    u(t) = Z exp(-i w_b (t-t0)) + (1/pi) int_0^inf dw gamma(w)
           exp(-i w (t-t0)) / ((w - w0 - Delta(w))^2 + gamma(w)^2)
    with gamma(w) = J(w)/2. The localized-mode term enters only when the
    pole exists. Node count doubles until the t = t0 sum rule |u - 1| is
    within sum_rule_tol.
    """
    ts_rel = grid.times - grid.t0
    if model.eta == 0.0:
        return np.exp(-1j * model.omega0 * ts_rel)

    lm = find_localized_mode(model)
    z_term = lm.residue_z if lm.exists else 0.0

    t_max = float(ts_rel[-1])
    for order in (16, 32, 64):
        nodes, weights = _branch_nodes(model, t_max, order)
        delta = self_energy_profile(model, nodes)
        gam = 0.5 * j_omega(model, nodes)
        dens = (1.0 / np.pi) * gam / ((nodes - model.omega0 - delta) ** 2
                                      + gam ** 2)
        mass = weights * dens
        defect = abs(z_term + mass.sum() - 1.0)
        if defect <= sum_rule_tol:
            break
    else:
        raise ConvergenceError(
            f"sum rule defect {defect:.3e} above {sum_rule_tol:.1e}")

    u = z_term * np.exp(-1j * lm.omega_b * ts_rel) if lm.exists \
        else np.zeros(len(ts_rel), dtype=complex)
    chunk = max(1, int(4e6) // max(len(nodes), 1))
    for i in range(0, len(ts_rel), chunk):
        phase = np.exp(-1j * np.outer(ts_rel[i:i + chunk], nodes))
        u[i:i + chunk] += phase @ mass
    return u


def _thermal_rows(model: ReservoirModel, dt: float, n: int):
    # g_tilde sampled on the signed lattice; the two signs are evaluated
    # independently so conjugate symmetry is checked, not assumed
    ts = dt * np.arange(n + 1)
    gp = kernel_g_tilde_series(model, ts)
    gn = kernel_g_tilde_series(model, -ts)
    return gp, gn


def compute_v(model: ReservoirModel, u: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """Correlation v(t_n) = int_0^t int_0^t u*(a) g_tilde(a-b) u(b) da db.

    Incremental trapezoid contraction: each step adds one row and one
    column of the Hermitian kernel matrix in O(n) so the whole series
    costs O(n^2). Row and column use independently evaluated positive-
    and negative-time kernel samples; the imaginary residue of every
    v(t_n) is checked against V_RESIDUE_TOL before being discarded.
    """
    n = grid.n_steps
    if len(u) != n + 1:
        raise ValueError("u must be sampled on the grid")
    if model.theta == 0.0:
        return np.zeros(n + 1)
    dt = grid.dt
    gp, gn = _thermal_rows(model, dt, n)
    gprev = gp[::-1].copy()
    gnrev = gn[::-1].copy()
    uc = np.conj(u)

    v = np.empty(n + 1)
    v[0] = 0.0
    t_full = gp[0] * (u[0] * uc[0])          # full square sum, runs complex
    row0 = gn[0] * u[0] * uc[0]              # j = 0 row
    col0 = gp[0] * uc[0] * u[0]              # k = 0 column
    for k in range(1, n + 1):
        seg = slice(n - k, n)
        row_k = uc[k] * (np.dot(gprev[seg], u[:k]) + gp[0] * u[k])
        col_k = u[k] * (np.dot(gnrev[seg], uc[:k]) + gn[0] * uc[k])
        m_kk = gp[0] * u[k] * uc[k]
        t_full = t_full + row_k + col_k - m_kk
        row0 = row0 + gn[k] * u[k] * uc[0]
        col0 = col0 + gp[k] * uc[k] * u[0]
        corners = (gp[0] * u[0] * uc[0] + m_kk
                   + gn[k] * u[k] * uc[0] + gp[k] * uc[k] * u[0])
        val = dt * dt * (t_full - 0.5 * (row0 + row_k + col0 + col_k)
                         + 0.25 * corners)
        scale = max(1.0, abs(val.real))
        if abs(val.imag) > V_RESIDUE_TOL * scale:
            raise ResidueError(
                f"Im v = {val.imag:.3e} at t = {grid.times[k]:.4g} "
                f"(tolerance {V_RESIDUE_TOL:.1e} x {scale:.3g})")
        v[k] = val.real
    return v


def compute_v_two_time(model: ReservoirModel, u: np.ndarray, grid: TimeGrid,
                       t: float, taus) -> np.ndarray:
    """Two-time correlation v(t, t + tau) for tau >= 0 on the grid lattice.

    Equal to int_0^t da int_0^(t+tau) db u*(a) g_tilde(a - b + tau) u(b),
    which reduces to compute_v at tau = 0; the propagator depends only on
    time differences so u(t, a) = u(t - a). Each tau costs one FFT
    convolution over the solved range. t and every tau must sit on the
    grid lattice.
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    dt = grid.dt
    n_t = _lattice_index(t - grid.t0, dt, grid.n_steps, "t")
    ms = np.array([_lattice_index(tau, dt, grid.n_steps - n_t, "tau")
                   for tau in taus])
    if model.theta == 0.0:
        return np.zeros(len(taus), dtype=complex)

    n_max = n_t + ms.max()
    if len(u) < n_max + 1:
        raise ValueError("u too short for requested t + tau range")
    # signed kernel lattice g_tilde(p dt), p = -n_t .. n_t + m_max
    ps = np.arange(-n_t, n_t + int(ms.max()) + 1)
    gsig = kernel_g_tilde_series(model, dt * ps)

    wa = np.ones(n_t + 1)
    wa[0] = wa[-1] = 0.5
    a_row = np.conj(u[:n_t + 1]) * wa

    out = np.empty(len(taus), dtype=complex)
    for idx, m in enumerate(ms):
        nb = n_t + m
        wb = np.ones(nb + 1)
        wb[0] = wb[-1] = 0.5
        b_row = u[:nb + 1] * wb
        # inner(a) = sum_b b_row[b] gsig[(a - b + m) + n_t], one convolution
        full = fftconvolve(b_row, gsig)
        inner = full[n_t + m:n_t + m + n_t + 1]
        out[idx] = dt * dt * np.dot(a_row, inner)
    return out


def _lattice_index(value: float, dt: float, n_limit: int, name: str) -> int:
    k = int(round(value / dt))
    if abs(value - k * dt) > 1e-9 * dt or k < 0 or k > n_limit:
        raise ValueError(f"{name} = {value!r} not on the grid lattice")
    return k


def master_coefficients(u: np.ndarray, v: np.ndarray,
                        grid: TimeGrid) -> MasterCoefficients:
    """Time-local rates from the solution pair.

    w0'(t) = -Im[u'/u], gamma(t) = -Re[u'/u],
    gamma_tilde(t) = v' - 2 v Re[u'/u].
    Centered differences inside, second-order one-sided at the ends.
    Samples with |u| below DIVISION_FLOOR are marked undefined (NaN).
    """
    n = grid.n_steps
    if len(u) != n + 1 or len(v) != n + 1:
        raise ValueError("u, v must be sampled on the grid")
    dt = grid.dt
    du = np.empty(n + 1, dtype=complex)
    dv = np.empty(n + 1)
    du[1:-1] = (u[2:] - u[:-2]) / (2 * dt)
    dv[1:-1] = (v[2:] - v[:-2]) / (2 * dt)
    du[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * dt)
    du[-1] = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * dt)
    dv[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * dt)
    dv[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * dt)

    defined = np.abs(u) >= DIVISION_FLOOR
    ratio = np.full(n + 1, np.nan + 0j, dtype=complex)
    ratio[defined] = du[defined] / u[defined]
    omega0_prime = -np.imag(ratio)
    gamma = -np.real(ratio)
    gamma_tilde = dv - 2.0 * v * np.real(ratio)
    return MasterCoefficients(grid=grid, omega0_prime=omega0_prime,
                              gamma=gamma, gamma_tilde=gamma_tilde,
                              defined=defined)


def solve_greens(model: ReservoirModel, grid: TimeGrid,
                 method: str = "volterra") -> GreensSolution:
    """Solve u and v on the grid and attach Richardson error estimates."""
    if method == "volterra":
        u, _ = solve_u_volterra(model, grid, error_estimate=False)
    elif method == "spectral":
        u = solve_u_spectral(model, grid)
    else:
        raise ValueError(f"unknown method {method!r}")
    v = compute_v(model, u, grid)
    u_err = v_err = None
    if method == "volterra":
        coarse_grid = grid.halved()
        uc, _ = solve_u_volterra(model, coarse_grid, error_estimate=False)
        vc = compute_v(model, uc, coarse_grid)
        m = len(uc)
        u_err = float(np.max(np.abs(u[::2][:m] - uc)) / 3.0)
        v_err = float(np.max(np.abs(v[::2][:m] - vc)) / 3.0)
    return GreensSolution(grid=grid, u=u, v=v, u_error=u_err, v_error=v_err)
