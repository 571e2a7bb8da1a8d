import numpy as np
import pytest

from flickerdyn import ReservoirModel, TimeGrid, solve_greens

ETAS = (1e-3, 1e-2)
XS = (0.25, 0.5, 0.75, 0.9999)


@pytest.fixture(scope="session")
def preset_grid():
    return TimeGrid.from_horizon(20.0, 1e-3)


@pytest.fixture(scope="session")
def preset_solutions(preset_grid):
    """Green's function solutions for the eight (eta, x) presets, theta=0.654."""
    out = {}
    for eta in ETAS:
        for x in XS:
            m = ReservoirModel.from_x(eta=eta, x=x, omega_c=1.0, theta=0.654)
            out[(eta, x)] = (m, solve_greens(m, preset_grid))
    return out
