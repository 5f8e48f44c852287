"""parosc: flux-pumped superconducting parametric oscillator toolkit.

Closed-form device physics (tuning curve, Duffing/pump/rectification
coefficients), probe-driven steady states, parametric-instability regions,
slow-amplitude time integration, compensated two-tone pump synthesis, and
least-squares calibration fits.
"""
from .backend import backend_name
from .calibration import (
    DataSeries,
    FitResult,
    fit_duffing_alpha,
    fit_reflection_trace,
    fit_tuning_curve,
)
from .compensation import (
    CompensatedPump,
    SpectralReport,
    build_compensated_pump,
    derivative_ratio,
    derivative_ratio_small_gamma,
    rectification_offset,
    second_tone_amplitude,
    single_tone_pump,
    verify_cancelation,
)
from .device import (
    PHI0,
    R_K,
    DeviceParams,
    FluxDomainError,
    PumpDrive,
    alpha_over_alpha0,
    beta_coefficient,
    duffing_alpha,
    effective_pump_strength,
    freq_d1,
    freq_d2,
    pump_epsilon,
    quality_factors,
    reduce_flux,
    resonance_frequency,
    squid_inductance,
)
from .dynamics import (
    IntegrationDivergedError,
    SimConfig,
    Trajectory,
    growth_rate,
    integrate,
    rect_pulse,
    steady_state_detect,
)
from .region import (
    RegionBoundary,
    boundary_grid,
    closure_detuning,
    pump_induced_shift,
    region_contains,
    threshold_skewed,
    threshold_symmetric,
)
from .steady_state import (
    ProbeDrive,
    SteadyStateBranch,
    duffing_shift,
    photon_number_roots,
    reflection_amplitude,
    reflection_coefficient,
    sweep_rows,
    write_sweep_csv,
)

__version__ = "0.1.0"

__all__ = [
    "PHI0",
    "R_K",
    "DeviceParams",
    "PumpDrive",
    "FluxDomainError",
    "IntegrationDivergedError",
    "DataSeries",
    "FitResult",
    "ProbeDrive",
    "SteadyStateBranch",
    "RegionBoundary",
    "SimConfig",
    "Trajectory",
    "CompensatedPump",
    "SpectralReport",
    "backend_name",
    "reduce_flux",
    "squid_inductance",
    "resonance_frequency",
    "freq_d1",
    "freq_d2",
    "duffing_alpha",
    "alpha_over_alpha0",
    "pump_epsilon",
    "effective_pump_strength",
    "beta_coefficient",
    "quality_factors",
    "photon_number_roots",
    "reflection_coefficient",
    "reflection_amplitude",
    "duffing_shift",
    "sweep_rows",
    "write_sweep_csv",
    "threshold_symmetric",
    "threshold_skewed",
    "region_contains",
    "pump_induced_shift",
    "closure_detuning",
    "boundary_grid",
    "integrate",
    "growth_rate",
    "steady_state_detect",
    "rect_pulse",
    "build_compensated_pump",
    "single_tone_pump",
    "second_tone_amplitude",
    "rectification_offset",
    "derivative_ratio",
    "derivative_ratio_small_gamma",
    "verify_cancelation",
    "fit_tuning_curve",
    "fit_reflection_trace",
    "fit_duffing_alpha",
]
