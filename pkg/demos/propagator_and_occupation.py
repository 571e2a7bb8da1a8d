"""Exact propagator u(t) and thermal occupation v(t) across the noise
exponent sweep.

|u| measures how much of the initial amplitude survives the bath; v is
the occupation the bath pumps back in. The x -> 1 reservoir barely damps
the mode yet loads it with an enormous fluctuation budget, which is the
whole story of 1/f decoherence in one pair of panels.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from flickerdyn import ReservoirModel, TimeGrid, default_dt, solve_greens

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

fig, axes = plt.subplots(2, 2, figsize=(10, 6.5), sharex=True)
for col, eta in enumerate((1e-3, 1e-2)):
    for x in (0.25, 0.5, 0.75, 0.9999):
        model = ReservoirModel.from_x(eta=eta, x=x, theta=0.654)
        grid = TimeGrid.from_horizon(20.0, default_dt(model))
        sol = solve_greens(model, grid)
        axes[0, col].plot(grid.times, np.abs(sol.u), label=f"x={x:g}")
        axes[1, col].semilogy(grid.times, np.maximum(sol.v, 1e-12))
        print(f"eta={eta:g} x={x:g}: |u(20)|={np.abs(sol.u[-1]):.6f} "
              f"max v={np.max(sol.v):.4g} "
              f"(u error est {sol.u_error:.1e})")
    axes[0, col].set_title(f"eta = {eta:g}")
    axes[0, col].legend(fontsize=8)
    axes[1, col].set_xlabel("omega0 t")
axes[0, 0].set_ylabel("|u(t)|")
axes[1, 0].set_ylabel("v(t)")
fig.tight_layout()
fig.savefig(OUT / "propagator_and_occupation.png", dpi=150)
print(f"\nwrote {OUT / 'propagator_and_occupation.png'}")

print("\n|u| barely distinguishes the exponents at weak coupling, but v")
print("for x=0.9999 towers orders of magnitude over the others: the")
print("infrared modes hold huge thermal occupation and feed it straight")
print("into the resonator.")
