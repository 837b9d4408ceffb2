"""Receiver noise budgets and quantum-limit references."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

from .constants import H, KB


@dataclass(frozen=True)
class NoiseStage:
    """One amplification stage of a receiver chain."""

    label: str
    gain_db: float
    noise_temperature_k: float

    def __post_init__(self):
        if self.noise_temperature_k < 0.0:
            raise ValueError("noise temperature must be >= 0")
        if not math.isfinite(self.gain_db):
            raise ValueError("gain must be finite")

    @property
    def gain_linear(self) -> float:
        return 10.0 ** (self.gain_db / 10.0)


def quantum_limit_temperature(frequency: float, half_photon: bool = False) -> float:
    """Input-referred noise temperature of an ideal phase-insensitive amplifier.

    The default convention is T_q = h f / k_B, one photon of added noise
    including the zero-point half; ``half_photon=True`` returns h f / (2 k_B)
    for the bare added-noise convention.
    """
    if frequency <= 0.0:
        raise ValueError("frequency must be > 0")
    t = H * frequency / KB
    return t / 2.0 if half_photon else t


def friis_cascade(stages: Sequence[NoiseStage]) -> float:
    """System noise temperature T1 + T2/G1 + T3/(G1 G2) + ... in kelvin."""
    if not stages:
        raise ValueError("friis_cascade of an empty chain")
    total = 0.0
    running_gain = 1.0
    for stage in stages:
        total += stage.noise_temperature_k / running_gain
        running_gain *= stage.gain_linear
    return total


def snr_improvement(t_before: float, t_after: float) -> float:
    """SNR change 10*log10(T_before / T_after) in dB when the front end improves."""
    if t_before <= 0.0 or t_after <= 0.0:
        raise ValueError("temperatures must be > 0")
    return 10.0 * math.log10(t_before / t_after)


@dataclass(frozen=True)
class BudgetReport:
    """Stage-by-stage contribution table for a receiver chain."""

    stages: tuple
    contributions_k: tuple
    system_temperature_k: float

    def text(self) -> str:
        rows = [("stage", "gain_db", "noise_k", "contribution_k")]
        for stage, contrib in zip(self.stages, self.contributions_k):
            rows.append((stage.label, f"{stage.gain_db:.2f}",
                         f"{stage.noise_temperature_k:.4g}", f"{contrib:.4g}"))
        rows.append(("system", "", "", f"{self.system_temperature_k:.6g}"))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                 for row in rows]
        return "\n".join(lines)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["stage", "gain_db", "noise_k", "contribution_k"])
            for stage, contrib in zip(self.stages, self.contributions_k):
                writer.writerow([stage.label, repr(float(stage.gain_db)),
                                 repr(float(stage.noise_temperature_k)),
                                 repr(float(contrib))])
            writer.writerow(["system", "", "", repr(float(self.system_temperature_k))])


def budget_report(stages: Sequence[NoiseStage]) -> BudgetReport:
    """Expand a Friis cascade into per-stage input-referred contributions."""
    if not stages:
        raise ValueError("empty receiver chain")
    contributions = []
    running_gain = 1.0
    for stage in stages:
        contributions.append(stage.noise_temperature_k / running_gain)
        running_gain *= stage.gain_linear
    return BudgetReport(
        stages=tuple(stages),
        contributions_k=tuple(contributions),
        system_temperature_k=sum(contributions),
    )
