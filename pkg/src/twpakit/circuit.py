"""Unit-cell circuit models of nonlinear superconducting transmission lines.

Two cell flavors are supported: an rf-SQUID cell (geometric inductor in
parallel with a capacitively shunted Josephson junction, the whole branch
shunted to ground) and a kinetic-inductance cell (series inductor whose
value depends quadratically on current, with resonant fingers to ground).
All quantities are strictly SI; unit conversions happen only at interfaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .constants import PHI0
from .errors import SingularBiasError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class JosephsonJunction:
    """A single junction described by its critical current and self-capacitance."""

    critical_current: float  # A
    self_capacitance: float  # F

    def __post_init__(self):
        if self.critical_current <= 0.0:
            raise ValueError("critical_current must be > 0")
        if self.self_capacitance <= 0.0:
            raise ValueError("self_capacitance must be > 0")


@dataclass(frozen=True)
class RfSquidCell:
    """rf-SQUID cell: geometric inductor in parallel with the junction branch.

    The parallel topology is what brings the cell impedance close to 50 ohm
    for realistic ground capacitances; a series topology does not.  The cell
    must be nonhysteretic, i.e. the screening parameter
    beta_L = 2*pi*Lg*Ic/Phi0 has to stay below 1 so the flux-phase relation
    is single valued.
    """

    geometric_inductance: float  # H
    junction: JosephsonJunction
    ground_capacitance: float  # F

    def __post_init__(self):
        if self.geometric_inductance <= 0.0:
            raise ValueError("geometric_inductance must be > 0")
        if self.ground_capacitance <= 0.0:
            raise ValueError("ground_capacitance must be > 0")
        if self.screening_parameter >= 1.0:
            raise ValueError(
                f"hysteretic cell: beta_L = {self.screening_parameter:.3f} >= 1"
            )

    @property
    def screening_parameter(self) -> float:
        return TWO_PI * self.geometric_inductance * self.junction.critical_current / PHI0


@dataclass(frozen=True)
class KineticCell:
    """Kinetic-inductance cell: series inductor plus two finger resonators.

    The series inductance depends on current as Ld*(1 + (I/I*)^2) where I*
    is the current scale of the kinetic nonlinearity (kept distinct from any
    junction critical current).  Each finger is a series LC branch to ground
    with inductance Lf and capacitance C/2.
    """

    series_inductance: float  # H
    finger_inductance: float  # H
    ground_capacitance: float  # F, total per cell (each finger carries C/2)
    scale_current: float  # A

    def __post_init__(self):
        for name in ("series_inductance", "finger_inductance",
                     "ground_capacitance", "scale_current"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")


Cell = Union[RfSquidCell, KineticCell]


@dataclass(frozen=True)
class NonlinearExpansion:
    """Quadratic expansion L(I0 + dI) = l0 + c1*dI + c2*dI**2 about a bias point."""

    l0: float  # H
    c1: float  # H/A, odd in bias; zero at zero bias
    c2: float  # H/A^2, > 0 on the inductive branch

    def inductance(self, delta_current: float) -> float:
        return self.l0 + self.c1 * delta_current + self.c2 * delta_current**2


def josephson_inductance(jj: JosephsonJunction, phase: float = 0.0) -> float:
    """Josephson inductance Phi0 / (2*pi*Ic*cos(phase)).

    Valid only on the inductive branch |phase| < pi/2; beyond it the branch
    inductance diverges and changes sign.
    """
    if abs(phase) >= math.pi / 2.0:
        raise SingularBiasError(
            f"phase {phase:.4f} rad is outside the inductive branch (|phase| < pi/2)"
        )
    return PHI0 / (TWO_PI * jj.critical_current * math.cos(phase))


def squid_effective_inductance(cell: RfSquidCell, phase: float = 0.0) -> float:
    """Parallel combination of the geometric and junction inductances at a bias phase."""
    lj = josephson_inductance(cell.junction, phase)
    lg = cell.geometric_inductance
    return lg * lj / (lg + lj)


def squid_branch_current(cell: RfSquidCell, phase: float) -> float:
    """Total current through the cell at a junction phase.

    The geometric inductor and the junction see the same phase drop, so
    I = Phi0*phase/(2*pi*Lg) + Ic*sin(phase).  Monotone in phase for a
    nonhysteretic cell, which makes it invertible.
    """
    return (
        PHI0 * phase / (TWO_PI * cell.geometric_inductance)
        + cell.junction.critical_current * math.sin(phase)
    )


def squid_phase_for_current(cell: RfSquidCell, current: float) -> float:
    """Invert squid_branch_current by Newton iteration."""
    ic = cell.junction.critical_current
    d0 = PHI0 / (TWO_PI * cell.geometric_inductance)
    phase = current / (d0 + ic)  # linearized start
    for _ in range(80):
        f = squid_branch_current(cell, phase) - current
        df = d0 + ic * math.cos(phase)
        step = f / df
        phase -= step
        if abs(step) < 1e-15 * max(1.0, abs(phase)):
            break
    if abs(phase) >= math.pi / 2.0:
        raise SingularBiasError(
            f"current {current:.3e} A drives the junction beyond the inductive branch"
        )
    return phase


def kinetic_inductance(cell: KineticCell, current: float) -> float:
    """Current-dependent series inductance Ld*(1 + (I/I*)^2)."""
    x = current / cell.scale_current
    return cell.series_inductance * (1.0 + x * x)


def taylor_nonlinearity(cell: Cell, bias: float = 0.0) -> NonlinearExpansion:
    """Expand the cell inductance to second order in current about a bias point.

    ``bias`` is a junction phase in radians for an rf-SQUID cell and a DC
    current in ampere for a kinetic cell.  The linear coefficient c1 is the
    knob that turns on three-wave mixing: it is odd in the bias and vanishes
    exactly at zero bias, while c2 (four-wave mixing, Kerr-like) is always
    positive on the valid branch.
    """
    if isinstance(cell, KineticCell):
        if abs(bias) >= cell.scale_current:
            raise SingularBiasError(
                f"|I_dc| = {abs(bias):.3e} A exceeds the scale current"
            )
        ld, istar = cell.series_inductance, cell.scale_current
        return NonlinearExpansion(
            l0=ld * (1.0 + (bias / istar) ** 2),
            c1=2.0 * ld * bias / istar**2,
            c2=ld / istar**2,
        )
    if isinstance(cell, RfSquidCell):
        if abs(bias) >= math.pi / 2.0:
            raise SingularBiasError(
                f"bias phase {bias:.4f} rad is outside the inductive branch"
            )
        ic = cell.junction.critical_current
        # D(phi) = dI/dphi * 2*pi/Phi0 has units of current; the expansion
        # follows from L(I) = (Phi0/2*pi) * dphi/dI with dI/dphi = D(phi).
        d = PHI0 / (TWO_PI * cell.geometric_inductance) + ic * math.cos(bias)
        k = PHI0 / TWO_PI
        sin_b, cos_b = math.sin(bias), math.cos(bias)
        return NonlinearExpansion(
            l0=k / d,
            c1=k * ic * sin_b / d**3,
            c2=k * ic * (cos_b * d + 3.0 * ic * sin_b**2) / (2.0 * d**5),
        )
    raise TypeError(f"unsupported cell type: {type(cell).__name__}")


def characteristic_impedance(l_cell: float, c_cell: float) -> float:
    """Lumped-line impedance sqrt(L/C)."""
    if l_cell <= 0.0 or c_cell <= 0.0:
        raise ValueError("inductance and capacitance must be > 0")
    return math.sqrt(l_cell / c_cell)


def plasma_frequency(l: float, c: float) -> float:
    """Resonance frequency 1/(2*pi*sqrt(L*C)) in Hz."""
    if l <= 0.0 or c <= 0.0:
        raise ValueError("inductance and capacitance must be > 0")
    return 1.0 / (TWO_PI * math.sqrt(l * c))
