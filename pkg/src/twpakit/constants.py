"""Fixed physical constants (2018 CODATA, SI units)."""

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable CODATA values used by the Josephson relations and noise formulas."""

    flux_quantum: float = 2.067833848e-15  # Wb, h/(2e)
    planck: float = 6.62607015e-34  # J s
    reduced_planck: float = 1.054571817e-34  # J s
    boltzmann: float = 1.380649e-23  # J/K
    electron_charge: float = 1.602176634e-19  # C


CONSTANTS = PhysicalConstants()

PHI0 = CONSTANTS.flux_quantum
H = CONSTANTS.planck
HBAR = CONSTANTS.reduced_planck
KB = CONSTANTS.boltzmann
E_CHARGE = CONSTANTS.electron_charge
