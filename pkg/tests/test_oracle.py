import math

import numpy as np
import pytest

from flickerdyn.greens import TimeGrid, compute_v, master_coefficients, solve_greens
from flickerdyn.oracle import (
    DiscreteBath,
    LeakageError,
    TruncatedDensityMatrix,
    bath_u_v,
    brute_force_v,
    discretize_bath,
    integrate_master_equation,
    recurrence_time,
    wigner_from_density_matrix,
)
from flickerdyn.spectral import ReservoirModel, j_omega, occupation
from flickerdyn.wigner import (
    PhaseSpaceGrid,
    SuperpositionState,
    w_superposition,
)


def reference_model(eta=1e-2):
    return ReservoirModel.from_x(eta=eta, x=0.5, omega_c=1.0, theta=0.654)


def fock_density(pairs, dim):
    rho = np.zeros((dim, dim), dtype=complex)
    for (j, k), val in pairs.items():
        rho[j, k] = val
    return TruncatedDensityMatrix(dim=dim, entries=rho, time=0.0)


class TestDiscreteBath:
    def test_coupling_rule_reproduces_j(self):
        m = reference_model()
        bath = discretize_bath(m, 400)
        edges = np.geomspace(1e-6, 10.0, 401)
        widths = np.diff(edges)
        recovered = bath.couplings ** 2 * 2.0 * math.pi / widths
        assert np.allclose(recovered, j_omega(m, bath.mode_freqs), rtol=1e-12)

    def test_validation(self):
        m = reference_model()
        with pytest.raises(ValueError):
            discretize_bath(m, 1)
        with pytest.raises(ValueError):
            discretize_bath(m, 10, omega_min=1.0, omega_max=0.5)
        with pytest.raises(ValueError):
            DiscreteBath(np.array([1.0, 0.5]), np.array([0.1, 0.1]))
        with pytest.raises(ValueError):
            DiscreteBath(np.array([-1.0]), np.array([0.1]))
        with pytest.raises(ValueError):
            DiscreteBath(np.array([1.0, 2.0]), np.array([0.1]))

    def test_recurrence_time(self):
        m = reference_model()
        bath = discretize_bath(m, 250)
        spacings = np.diff(bath.mode_freqs)
        centers = 0.5 * (bath.mode_freqs[1:] + bath.mode_freqs[:-1])
        expected = 2 * math.pi / spacings[np.argmin(np.abs(centers - 1.0))]
        assert recurrence_time(bath) == pytest.approx(expected, rel=1e-12)
        assert recurrence_time(
            DiscreteBath(np.array([1.0]), np.array([0.1]))) == math.inf


class TestBathUV:
    def test_resonant_rabi(self):
        m = ReservoirModel(eta=1e-3, s=0.5, omega_c=1.0, theta=0.0)
        bath = DiscreteBath(np.array([1.0]), np.array([0.05]))
        grid = TimeGrid(0.0, 0.01, 500)
        u, v = bath_u_v(bath, m, grid)
        expected = np.exp(-1j * grid.times) * np.cos(0.05 * grid.times)
        assert np.abs(u - expected).max() < 1e-12
        assert np.all(v == 0.0)

    def test_thermal_single_mode(self):
        """v for one resonant mode is nbar sin^2(Vt), exactly."""
        m = ReservoirModel(eta=1e-3, s=0.5, omega_c=1.0, theta=0.654)
        bath = DiscreteBath(np.array([1.0]), np.array([0.07]))
        grid = TimeGrid(0.0, 0.02, 400)
        _, v = bath_u_v(bath, m, grid)
        nbar = occupation(0.654, 1.0, 1.0)
        assert np.allclose(v, nbar * np.sin(0.07 * grid.times) ** 2,
                           atol=1e-12)

    def test_converges_to_volterra(self):
        m = reference_model()
        grid = TimeGrid.from_horizon(5.0, 5e-3)
        sol = solve_greens(m, grid)
        sample = TimeGrid(0.0, 0.025, 200)
        idx = np.arange(0, grid.n_steps + 1, 5)
        errors = []
        for n in (250, 1000):
            u_n, v_n = bath_u_v(discretize_bath(m, n), m, sample)
            assert sample.times[-1] < recurrence_time(discretize_bath(m, n))
            errors.append(max(np.abs(u_n - sol.u[idx]).max(),
                              np.abs(v_n - sol.v[idx]).max()))
        assert errors[1] < errors[0]
        assert errors[1] < 5e-4


class TestBruteForceV:
    def test_trivial_zeroes(self):
        m = reference_model()
        grid = TimeGrid.from_horizon(1.0, 1e-2)
        u = np.exp(-1j * grid.times)
        assert brute_force_v(m, u, grid, 0) == 0.0
        cold = ReservoirModel(eta=1e-2, s=0.5, omega_c=1.0, theta=0.0)
        assert brute_force_v(cold, u, grid, 50) == 0.0

    def test_matches_structured_evaluator(self):
        m = reference_model()
        grid = TimeGrid.from_horizon(10.0, 5e-3)
        sol = solve_greens(m, grid)
        for t_spot in (1.0, 5.0, 10.0):
            k = int(round(t_spot / grid.dt))
            direct = brute_force_v(m, sol.u, grid, k)
            assert direct == pytest.approx(sol.v[k], rel=1e-6)

    def test_validation(self):
        m = reference_model()
        grid = TimeGrid.from_horizon(1.0, 1e-2)
        with pytest.raises(ValueError):
            brute_force_v(m, np.ones(5, dtype=complex), grid, 1)
        with pytest.raises(ValueError):
            brute_force_v(m, np.exp(-1j * grid.times), grid, 101)


class TestMasterEquation:
    def free_coefficients(self, horizon=2.0, dt=1e-3):
        m = ReservoirModel(eta=0.0, s=0.5, omega_c=1.0, theta=0.0)
        grid = TimeGrid.from_horizon(horizon, dt)
        sol = solve_greens(m, grid)
        return master_coefficients(sol.u, sol.v, grid)

    def test_unitary_limit(self):
        coeffs = self.free_coefficients()
        st = SuperpositionState(0, 3)
        series = integrate_master_equation(coeffs, st, n_max=11,
                                           times=[0.0, 2.0])
        rho0, rho2 = series[0].entries, series[1].entries
        assert rho0[0, 0] == 0.5 and rho0[3, 3] == 0.5
        # populations frozen, coherence a pure phase at 3 w0; the phase
        # carries the finite-difference bias of omega0' (~(w0 dt)^2/6 per
        # unit time), which dominates the integrator error by design
        assert abs(rho2[0, 0] - 0.5) < 1e-10
        assert abs(rho2[3, 3] - 0.5) < 1e-10
        assert abs(rho2[0, 3]) == pytest.approx(0.5, abs=1e-10)
        assert rho2[0, 3] == pytest.approx(0.5 * np.exp(6j), abs=5e-6)

    def test_occupation_identity(self):
        """tr(rho n) must track |u|^2 <n>_0 + v, the Gaussian-channel law."""
        m = reference_model()
        grid = TimeGrid.from_horizon(5.0, 5e-3)
        sol = solve_greens(m, grid)
        coeffs = master_coefficients(sol.u, sol.v, grid)
        st = SuperpositionState(2, 3)
        rho = integrate_master_equation(coeffs, st, n_max=16,
                                        times=[5.0])[0]
        n_op = np.arange(16 + 1)
        measured = float(np.sum(np.diag(rho.entries).real * n_op))
        k = grid.n_steps
        expected = abs(sol.u[k]) ** 2 * 2.5 + sol.v[k]
        assert measured == pytest.approx(expected, rel=1e-5)

    def test_decoherence_kills_coherences(self):
        m = ReservoirModel.from_x(eta=0.15, x=0.5, omega_c=1.0, theta=0.654)
        grid = TimeGrid.from_horizon(20.0, 5e-3)
        sol = solve_greens(m, grid)
        coeffs = master_coefficients(sol.u, sol.v, grid)
        rho = integrate_master_equation(coeffs, SuperpositionState(0, 3),
                                        n_max=24, times=[20.0])[0]
        off = rho.entries - np.diag(np.diag(rho.entries))
        assert np.abs(off).max() < 1e-3
        assert rho.trace() == pytest.approx(1.0, abs=1e-6)

    def test_snapshot_invariants(self):
        m = reference_model(eta=1e-3)
        grid = TimeGrid.from_horizon(2.0, 5e-3)
        sol = solve_greens(m, grid)
        coeffs = master_coefficients(sol.u, sol.v, grid)
        series = integrate_master_equation(coeffs, SuperpositionState(0, 3),
                                           n_max=12, times=[0.0, 1.0, 2.0])
        for entry in series:
            assert abs(entry.trace() - 1.0) < 1e-6
            assert entry.hermiticity_defect() < 1e-10
            assert entry.leakage() < 1e-6
            assert entry.smallest_eigenvalue() > -1e-8

    def test_validation(self):
        coeffs = self.free_coefficients()
        st = SuperpositionState(2, 3)
        with pytest.raises(ValueError):
            integrate_master_equation(coeffs, st, n_max=10, times=[1.0])
        with pytest.raises(ValueError):
            integrate_master_equation(coeffs, st, n_max=16, times=[3.0])
        with pytest.raises(ValueError):
            integrate_master_equation(coeffs, st, n_max=16, times=[1.0005e-3])

    def test_leakage_guard_trips(self):
        # hot bath fills the 11-level ladder: top-two population crosses
        # 1e-6 near t=0.4 while the trace is still good to ~1e-10
        m = ReservoirModel.from_x(eta=0.15, x=0.5, omega_c=1.0, theta=3.0)
        grid = TimeGrid.from_horizon(1.0, 5e-3)
        sol = solve_greens(m, grid)
        coeffs = master_coefficients(sol.u, sol.v, grid)
        with pytest.raises(LeakageError):
            integrate_master_equation(coeffs, SuperpositionState(0, 2),
                                      n_max=10, times=[0.5])


class TestWignerTransform:
    def test_vacuum(self):
        rho = fock_density({(0, 0): 1.0}, dim=12)
        grid = PhaseSpaceGrid(half_width=2.0, points=33)
        field = wigner_from_density_matrix(rho, grid)
        zs = field.re_grid[None, :] + 1j * field.im_grid[:, None]
        assert np.allclose(field.values,
                           (2 / math.pi) * np.exp(-2 * np.abs(zs) ** 2),
                           atol=1e-12)

    def test_single_photon_origin(self):
        rho = fock_density({(1, 1): 1.0}, dim=12)
        field = wigner_from_density_matrix(
            rho, PhaseSpaceGrid(half_width=2.0, points=33))
        assert field.values[16, 16] == pytest.approx(-2 / math.pi, rel=1e-12)

    def test_cross_path_identity_at_t0(self):
        rho = fock_density({(0, 0): 0.5, (0, 3): 0.5, (3, 0): 0.5,
                            (3, 3): 0.5}, dim=20)
        grid = PhaseSpaceGrid(half_width=3.0, points=64)
        field = wigner_from_density_matrix(rho, grid)
        zs = field.re_grid[None, :] + 1j * field.im_grid[:, None]
        direct = w_superposition(SuperpositionState(0, 3), zs, 1.0, 0.0)
        assert np.abs(field.values - direct).max() < 1e-8

    def test_truncation_warning(self):
        rho = fock_density({(0, 0): 1.0}, dim=8)
        with pytest.warns(RuntimeWarning, match="cutoff"):
            wigner_from_density_matrix(rho,
                                       PhaseSpaceGrid(half_width=5.0,
                                                      points=16))
