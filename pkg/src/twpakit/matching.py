"""Phase-matching structure generators.

Three mechanisms are covered: quasi-phase-matching sign profiles that flip
the nonlinearity every coherence length, resonant re-phasing plans that open
a bandgap with periodic shunt LC resonators, and periodic impedance loading
plans for kinetic-inductance lines that carve a wide stopband at three times
the pump frequency plus a narrow one just above it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .dispersion import (
    LineSpec,
    LoadingSlot,
    bloch_wavenumber,
    cell_abcd,
    find_stopbands,
    image_impedance,
    scan_dispersion,
)
from .errors import DesignInfeasibleError, NoMismatchError, ResolutionError


@dataclass(frozen=True)
class QpmProfile:
    """Per-cell nonlinearity sign sequence with flips each coherence length."""

    signs: tuple
    coherence_length_cells: float

    def __post_init__(self):
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @property
    def n_cells(self) -> int:
        return len(self.signs)

    def sign_array(self) -> np.ndarray:
        return np.array(self.signs, dtype=np.float64)

    def to_json_dict(self) -> dict:
        return {
            "signs": list(self.signs),
            "coherence_length_cells": self.coherence_length_cells,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "QpmProfile":
        return cls(tuple(d["signs"]), d["coherence_length_cells"])


@dataclass(frozen=True)
class LoadingPlan:
    """Periodic loading pattern: one slot every ``loading_period`` cells.

    ``slots`` and ``widths`` describe one pattern repetition (``widths`` in
    cells, each loading centered in its period).  The plan is pure data;
    regenerating with identical inputs yields identical plans.
    """

    loading_period: int
    slots: tuple
    widths: tuple
    f_pump_hz: float | None = None
    detuning_fraction: float | None = None
    f_gap_hz: float | None = None
    max_frequency_hz: float | None = None

    def __post_init__(self):
        if self.loading_period < 1:
            raise ValueError("loading_period must be >= 1 cell")
        if len(self.slots) != len(self.widths):
            raise ValueError("slots and widths must pair up")
        for w in self.widths:
            if not 1 <= w <= self.loading_period:
                raise ValueError("loading width must be within its period")

    @property
    def pattern_period(self) -> int:
        """Count of loadings before the pattern repeats."""
        return len(self.slots)

    @property
    def period_cells(self) -> int:
        return self.loading_period * self.pattern_period

    def to_json_dict(self) -> dict:
        return {
            "loading_period": self.loading_period,
            "slots": [s.to_json_dict() for s in self.slots],
            "widths": list(self.widths),
            "f_pump_hz": self.f_pump_hz,
            "detuning_fraction": self.detuning_fraction,
            "f_gap_hz": self.f_gap_hz,
            "max_frequency_hz": self.max_frequency_hz,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "LoadingPlan":
        return cls(
            loading_period=d["loading_period"],
            slots=tuple(LoadingSlot.from_json_dict(s) for s in d["slots"]),
            widths=tuple(d["widths"]),
            f_pump_hz=d.get("f_pump_hz"),
            detuning_fraction=d.get("detuning_fraction"),
            f_gap_hz=d.get("f_gap_hz"),
            max_frequency_hz=d.get("max_frequency_hz"),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "LoadingPlan":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def apply_plan(line: LineSpec, plan: LoadingPlan) -> LineSpec:
    """Materialize a plan onto a line as periodic loaded-cell positions."""
    period = plan.period_cells
    loadings = []
    for j, (slot, width) in enumerate(zip(plan.slots, plan.widths)):
        start = j * plan.loading_period + (plan.loading_period - width) // 2
        for cell in range(start, start + width):
            loadings.append((cell, slot))
    return replace(line, loadings=tuple(loadings), period=period)


def coherence_length(delta_k: float) -> float:
    """Cells after which a mismatched process has slipped by pi: L_c = pi/|dk|."""
    if delta_k == 0.0:
        raise NoMismatchError("delta_k is zero; there is nothing to rectify")
    return math.pi / abs(delta_k)


def qpm_sign_profile(delta_k: float, n_cells: int) -> QpmProfile:
    """Alternating +/-1 blocks with boundaries at multiples of the coherence length.

    Boundaries are rounded to the nearest whole cell (cells are physically
    discrete); the first block is +1.
    """
    if n_cells < 1:
        raise ValueError("n_cells must be >= 1")
    lc = coherence_length(delta_k)
    signs = np.ones(n_cells, dtype=np.int64)
    sign = 1
    m = 1
    start = int(round(lc))
    while start < n_cells:
        sign = -sign
        end = int(round((m + 1) * lc))
        signs[start:min(end, n_cells)] = sign
        m += 1
        start = end
    return QpmProfile(tuple(int(s) for s in signs), lc)


def rpm_plan(f_gap: float, line: LineSpec, spacing_cells: int,
             impedance_ratio: float = 12.0) -> LoadingPlan:
    """Shunt-resonator loading every ``spacing_cells`` opening a gap at ``f_gap``.

    The resonator is a series Lr-Cr branch to ground resonating at the gap
    frequency, with characteristic impedance ``impedance_ratio`` times the
    line impedance (larger ratio, weaker load, narrower gap).  The returned
    plan is verified by a closed-loop dispersion scan; if the loading is too
    sparse or too weak to carve a resolvable band around the target the plan
    is rejected.
    """
    if spacing_cells < 1:
        raise ValueError("spacing_cells must be >= 1")
    if f_gap <= 0.0:
        raise ValueError("f_gap must be > 0")
    if spacing_cells > line.n_cells:
        raise DesignInfeasibleError(
            f"spacing {spacing_cells} exceeds the {line.n_cells}-cell line; "
            "the loading degenerates to an unloaded line"
        )
    base_ka = bloch_wavenumber(cell_abcd(line.base_cell, f_gap, line.bias))
    if base_ka.imag > 1e-9:
        raise DesignInfeasibleError(
            f"{f_gap:.4g} Hz is not in a passband of the unloaded line"
        )
    z_res = impedance_ratio * image_impedance(line.base_cell, f_gap, line.bias)
    omega = 2.0 * math.pi * f_gap
    slot = LoadingSlot(
        shunt_resonator_l=z_res / omega,
        shunt_resonator_c=1.0 / (z_res * omega),
    )
    plan = LoadingPlan(
        loading_period=spacing_cells,
        slots=(slot,),
        widths=(1,),
        f_gap_hz=f_gap,
    )
    loaded = apply_plan(line, plan)
    grid = np.linspace(0.8 * f_gap, 1.2 * f_gap, 1601)
    bands = find_stopbands(scan_dispersion(loaded, grid))
    if not any(band.contains(f_gap) for band in bands):
        raise DesignInfeasibleError(
            f"no stopband brackets {f_gap:.4g} Hz with spacing {spacing_cells}"
        )
    return plan


def kitwpa_plan(f_pump: float, detuning_fraction: float, line: LineSpec,
                impedance_scale: float = 1.2,
                third_length_scale: float | None = None) -> LoadingPlan:
    """Periodic impedance loading for a kinetic line pumped at ``f_pump``.

    Loadings sit every sixth of a wavelength at the shifted frequency
    f_pump * (1 + detuning_fraction), producing a wide stopband near three
    times the pump; every third loading is made longer, which opens a narrow
    stopband just above the pump.  Loading impedance is scaled while the
    phase velocity is preserved.

    Discretization: the period is the largest multiple of four cells not
    exceeding the sixth-wavelength target (never above it, so the narrow
    band always lands at or above the shifted frequency and the pump keeps
    propagating below it), and the widths are even.  That parity keeps every
    loading centered on the same sub-cell offset, and with the default
    complementary third width 3*period/2 - base (ratio ~1.5, "longer") the
    pattern's second spatial harmonic cancels to first order, so no
    resolvable band opens near twice the pump (a sub-megahertz second-order
    residue remains).  Forcing ``third_length_scale=1.0`` ablates the
    modification (and with it the narrow band).
    """
    if detuning_fraction <= 0.0:
        raise ValueError("detuning_fraction must be > 0")
    if f_pump <= 0.0:
        raise ValueError("f_pump must be > 0")
    f_mod = f_pump * (1.0 + detuning_fraction)
    ka = bloch_wavenumber(cell_abcd(line.base_cell, f_mod, line.bias)).real
    if ka <= 0.0:
        raise DesignInfeasibleError("loading frequency has no propagating phase")
    wavelength_cells = 2.0 * math.pi / ka
    period = 4 * int(math.floor(wavelength_cells / 24.0 + 1e-9))
    if period < 4:
        raise ResolutionError(
            f"sixth-wavelength period {wavelength_cells / 6.0:.2f} cells "
            "is below the cell resolution"
        )
    base_width = 2 * int(round(0.3 * period))
    base_width = max(2, min(period - 2, base_width))
    if third_length_scale is None:
        third_width = (3 * period) // 2 - base_width
    else:
        third_width = 2 * int(round(third_length_scale * base_width / 2.0))
    third_width = max(2, min(period, third_width))
    slot = LoadingSlot(impedance_scale=impedance_scale)
    return LoadingPlan(
        loading_period=period,
        slots=(slot, slot, slot),
        widths=(base_width, base_width, third_width),
        f_pump_hz=f_pump,
        detuning_fraction=detuning_fraction,
        max_frequency_hz=1.5 * 3.0 * f_pump,
    )
