"""Time-local master-equation rates derived exactly from u and v.

gamma(t) is the dissipation rate, gamma_tilde(t) the fluctuation rate,
and omega0'(t) the renormalized frequency. Non-Markovian memory shows up
as gamma_tilde swinging through zero: while negative, the bath is taking
occupation back out of the mode.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from flickerdyn import (
    ReservoirModel,
    TimeGrid,
    default_dt,
    master_coefficients,
    solve_greens,
)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))
for x in (0.25, 0.5, 0.75, 0.9999):
    model = ReservoirModel.from_x(eta=1e-3, x=x, theta=0.654)
    grid = TimeGrid.from_horizon(20.0, default_dt(model))
    sol = solve_greens(model, grid)
    coeffs = master_coefficients(sol.u, sol.v, grid)
    axes[0].plot(grid.times, coeffs.omega0_prime - 1.0, label=f"x={x:g}")
    axes[1].plot(grid.times, coeffs.gamma)
    scale = np.max(np.abs(coeffs.gamma_tilde))
    axes[2].plot(grid.times, coeffs.gamma_tilde / scale)
    signs = np.sign(coeffs.gamma_tilde)
    signs = signs[np.abs(coeffs.gamma_tilde) > 1e-9 * scale]
    flips = int(np.sum(signs[1:] * signs[:-1] < 0))
    print(f"x={x:g}: min gamma {np.min(coeffs.gamma):.2e}, "
          f"gamma_tilde sign changes {flips}, peak scale {scale:.3g}")

axes[0].set(xlabel="omega0 t", ylabel="omega0'(t) - omega0",
            title="frequency shift")
axes[0].legend(fontsize=8)
axes[1].set(xlabel="omega0 t", ylabel="gamma(t)", title="dissipation rate")
axes[2].set(xlabel="omega0 t", ylabel="gamma_tilde / peak",
            title="fluctuation rate (scaled)")
fig.tight_layout()
fig.savefig(OUT / "master_coefficients.png", dpi=150)
print(f"\nwrote {OUT / 'master_coefficients.png'}")

print("\ngamma stays positive for every preset here, so dissipation never")
print("reverses; the memory lives in gamma_tilde, which oscillates harder")
print("as x approaches 1.")
