"""twpakit: travelling-wave parametric amplifier design and analysis.

Predicts dispersion, parametric gain, phase matching and noise budgets of
Josephson (rf-SQUID chain) and kinetic-inductance nonlinear transmission
lines, and analyzes pump-on/pump-off spectra, idler bias scans and junction
array resistance maps.
"""

__version__ = "0.1.0"

from ._backend import USING_COMPILED_KERNELS, backend_name
from .circuit import (
    JosephsonJunction,
    KineticCell,
    NonlinearExpansion,
    RfSquidCell,
    characteristic_impedance,
    josephson_inductance,
    plasma_frequency,
    squid_effective_inductance,
    taylor_nonlinearity,
)
from .constants import CONSTANTS, PhysicalConstants
from .coupled_mode import (
    CmeCoefficients,
    CmeTrajectory,
    GainProfile,
    ModeState,
    cme_coefficients,
    integrate_cme,
    ripple_metric,
    sweep_gain,
    undepleted_pump_gain,
)
from .dispersion import (
    AbcdMatrix,
    DispersionCurve,
    LineSpec,
    LoadingSlot,
    Stopband,
    bloch_wavenumber,
    cascade,
    cell_abcd,
    find_stopbands,
    idler_frequency,
    phase_mismatch,
    scan_dispersion,
)
from .matching import (
    LoadingPlan,
    QpmProfile,
    apply_plan,
    coherence_length,
    kitwpa_plan,
    qpm_sign_profile,
    rpm_plan,
)
from .noise import (
    NoiseStage,
    budget_report,
    friis_cascade,
    quantum_limit_temperature,
    snr_improvement,
)

__all__ = [
    "AbcdMatrix",
    "CmeCoefficients",
    "CmeTrajectory",
    "CONSTANTS",
    "DispersionCurve",
    "GainProfile",
    "JosephsonJunction",
    "KineticCell",
    "LineSpec",
    "LoadingPlan",
    "LoadingSlot",
    "ModeState",
    "NoiseStage",
    "NonlinearExpansion",
    "PhysicalConstants",
    "QpmProfile",
    "RfSquidCell",
    "Stopband",
    "USING_COMPILED_KERNELS",
    "apply_plan",
    "backend_name",
    "bloch_wavenumber",
    "budget_report",
    "cascade",
    "cell_abcd",
    "characteristic_impedance",
    "cme_coefficients",
    "coherence_length",
    "find_stopbands",
    "friis_cascade",
    "idler_frequency",
    "integrate_cme",
    "josephson_inductance",
    "kitwpa_plan",
    "phase_mismatch",
    "plasma_frequency",
    "qpm_sign_profile",
    "quantum_limit_temperature",
    "ripple_metric",
    "rpm_plan",
    "scan_dispersion",
    "snr_improvement",
    "squid_effective_inductance",
    "sweep_gain",
    "taylor_nonlinearity",
    "undepleted_pump_gain",
]
