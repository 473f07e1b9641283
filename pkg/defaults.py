# Numerical tolerances and default controls shared by every module.
# Values are relative unless the key says otherwise.

defaults = {
    # Inertia / twisting validation
    "moment_tolerance": 1e-12,
    "symmetric_top_tolerance": 1e-12,

    # Classical integration
    "rk4_method": "rk4",
    "cone_half_angle_warning": 0.2,

    # Root isolation on [-J, J]
    "root_grid_cells": 1024,
    "root_dedupe": 1e-9,
    "root_bisection_steps": 80,
    "root_newton_steps": 20,
    "double_root_residual": 1e-10,
    "double_root_merge": 1e-6,

    # Stationary points
    "sphere_residual": 1e-8,
    "denominator_floor": 1e-8,
    "omega_zero": 1e-14,
    "point_dedupe": 1e-7,
    "marginal_band": 1e-6,
    "critical_bisection_steps": 60,
    "degenerate_energy": 1e-9,

    # Ellipsoid geometry
    "surface_tolerance": 1e-9,

    # Brute-force oracle grid (theta x phi)
    "oracle_grid": (128, 256),
    "oracle_min_grid": (64, 128),

    # Regime classification
    "regime_band": 0.01,

    # Quantum spectra
    "hermitian_tolerance": 1e-12,
    "jacobi_tolerance": 1e-12,
    "jacobi_max_sweeps": 100,
    "degeneracy_tolerance": 1e-10,
    "density_half_window": 2,
    "min_levels_for_density": 20,
    "density_prominence": 0.1,
    "doublet_fraction": 1e-3,

    # Floquet protocol
    "floquet_steps_per_period": 10_000,
    "floquet_sample_every": 50,
    "escape_fraction": 0.25,

    # Output
    "float_format": "%.11e",
    "threads": 1,
}
