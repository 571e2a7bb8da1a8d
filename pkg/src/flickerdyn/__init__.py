"""Exact decoherence dynamics of a bosonic mode in a 1/f^x reservoir."""

from .greens import (
    GreensSolution,
    InstabilityError,
    MasterCoefficients,
    ResidueError,
    TimeGrid,
    compute_v,
    compute_v_two_time,
    default_dt,
    master_coefficients,
    solve_greens,
    solve_u_spectral,
    solve_u_volterra,
)
from .noise import (
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
from .oracle import (
    DiscreteBath,
    LeakageError,
    TraceDriftError,
    TruncatedDensityMatrix,
    bath_u_v,
    brute_force_v,
    discretize_bath,
    integrate_master_equation,
    recurrence_time,
    wigner_from_density_matrix,
)
from .spectral import (
    ConvergenceError,
    KernelSample,
    LocalizedMode,
    ReservoirModel,
    find_localized_mode,
    j_omega,
    kernel_g,
    kernel_g_tilde,
    kernel_g_tilde_series,
    occupation,
    self_energy_profile,
    self_energy_shift,
    theta_from_temperature,
)
from .wigner import (
    PhaseSpaceGrid,
    SuperpositionState,
    WignerField,
    omega_factor,
    snapshot_series,
    w_fock_diagonal,
    w_superposition,
    w_vacuum,
)

__all__ = [
    "ConvergenceError",
    "DiscreteBath",
    "GreensSolution",
    "InstabilityError",
    "KernelSample",
    "LeakageError",
    "LocalizedMode",
    "MasterCoefficients",
    "PhaseSpaceGrid",
    "PowerLawFit",
    "ReservoirModel",
    "ResidueError",
    "SpectrumSeries",
    "SuperpositionState",
    "TimeGrid",
    "TraceDriftError",
    "TruncatedDensityMatrix",
    "WignerField",
    "bath_u_v",
    "brute_force_v",
    "classical_ensemble_spectrum",
    "classical_rtn_spectrum",
    "compute_v",
    "compute_v_two_time",
    "correction_term",
    "default_dt",
    "discretize_bath",
    "find_localized_mode",
    "fit_power_law",
    "integrate_master_equation",
    "j_omega",
    "kernel_g",
    "kernel_g_tilde",
    "kernel_g_tilde_series",
    "master_coefficients",
    "occupation",
    "omega_factor",
    "recurrence_time",
    "s_exact",
    "s_low_freq",
    "self_energy_profile",
    "self_energy_shift",
    "snapshot_series",
    "solve_greens",
    "solve_u_spectral",
    "solve_u_volterra",
    "spectrum_series",
    "theta_from_temperature",
    "validity_map",
    "w_fock_diagonal",
    "w_superposition",
    "w_vacuum",
    "wigner_from_density_matrix",
]

__version__ = "0.1.0"
