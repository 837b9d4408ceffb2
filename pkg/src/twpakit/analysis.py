"""Measurement analysis: pump-on/off spectra, idler bias scans, junction maps.

File formats
------------
Resistance CSV header (exact): wafer_x,wafer_y,array_id,junction_index,resistance_ohm,process
with process in {static, dynamic}.  Spectrum CSV: frequency_hz,power_dbm with
a sidecar JSON holding rbw_hz and label.  Idler scan CSV: bias_a,idler_dbm
with a sidecar JSON holding pump_dbm and floor_dbm.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .constants import E_CHARGE
from .errors import (
    AlignmentError,
    ComparisonUnavailableError,
    NoModulationError,
)

PROCESS_LABELS = ("static", "dynamic")
RESISTANCE_HEADER = ["wafer_x", "wafer_y", "array_id", "junction_index",
                     "resistance_ohm", "process"]


@dataclass(frozen=True)
class SpectrumTrace:
    """One power spectrum with its resolution bandwidth and pump label."""

    frequency_hz: np.ndarray
    power_dbm: np.ndarray
    rbw_hz: float
    label: str  # "pump-on" | "pump-off"

    def __post_init__(self):
        f = np.asarray(self.frequency_hz, dtype=float)
        p = np.asarray(self.power_dbm, dtype=float)
        if f.shape != p.shape or f.ndim != 1:
            raise ValueError("frequency and power must be matching 1-D arrays")
        if not np.all(np.isfinite(p)):
            raise ValueError("powers must be finite")
        object.__setattr__(self, "frequency_hz", f)
        object.__setattr__(self, "power_dbm", p)

    def to_csv(self, path) -> None:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frequency_hz", "power_dbm"])
            for f, p in zip(self.frequency_hz, self.power_dbm):
                writer.writerow([repr(float(f)), repr(float(p))])
        with open(path.with_suffix(path.suffix + ".json"), "w") as fh:
            json.dump({"rbw_hz": self.rbw_hz, "label": self.label}, fh,
                      indent=2, sort_keys=True)

    @classmethod
    def from_csv(cls, path) -> "SpectrumTrace":
        path = Path(path)
        freqs, powers = [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["frequency_hz", "power_dbm"]:
                raise ValueError(f"unexpected spectrum CSV header: {header}")
            for row in reader:
                freqs.append(float(row[0]))
                powers.append(float(row[1]))
        sidecar = path.with_suffix(path.suffix + ".json")
        meta = json.loads(sidecar.read_text()) if sidecar.exists() else {}
        return cls(np.array(freqs), np.array(powers),
                   rbw_hz=float(meta.get("rbw_hz", 0.0)),
                   label=str(meta.get("label", "")))


@dataclass(frozen=True)
class GainCurve:
    """Pointwise pump-on minus pump-off gain."""

    frequency_hz: np.ndarray
    gain_db: np.ndarray


@dataclass(frozen=True)
class IdlerScan:
    """Idler tone power versus DC bias current at a fixed pump power."""

    bias_a: np.ndarray
    idler_dbm: np.ndarray
    pump_dbm: float
    floor_dbm: float

    def __post_init__(self):
        b = np.asarray(self.bias_a, dtype=float)
        p = np.asarray(self.idler_dbm, dtype=float)
        if b.shape != p.shape or b.ndim != 1:
            raise ValueError("bias and power must be matching 1-D arrays")
        if not np.all(np.diff(b) > 0.0):
            raise ValueError("bias grid must be strictly increasing")
        object.__setattr__(self, "bias_a", b)
        object.__setattr__(self, "idler_dbm", p)

    def to_csv(self, path) -> None:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bias_a", "idler_dbm"])
            for b, p in zip(self.bias_a, self.idler_dbm):
                writer.writerow([repr(float(b)), repr(float(p))])
        with open(path.with_suffix(path.suffix + ".json"), "w") as fh:
            json.dump({"pump_dbm": self.pump_dbm, "floor_dbm": self.floor_dbm},
                      fh, indent=2, sort_keys=True)

    @classmethod
    def from_csv(cls, path) -> "IdlerScan":
        path = Path(path)
        bias, power = [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["bias_a", "idler_dbm"]:
                raise ValueError(f"unexpected idler CSV header: {header}")
            for row in reader:
                bias.append(float(row[0]))
                power.append(float(row[1]))
        sidecar = path.with_suffix(path.suffix + ".json")
        meta = json.loads(sidecar.read_text()) if sidecar.exists() else {}
        return cls(np.array(bias), np.array(power),
                   pump_dbm=float(meta.get("pump_dbm", 0.0)),
                   floor_dbm=float(meta.get("floor_dbm", -np.inf)))


@dataclass(frozen=True)
class ResistanceRecord:
    """One four-terminal junction resistance with wafer position and process."""

    wafer_x: int
    wafer_y: int
    array_id: str
    junction_index: int
    resistance_ohm: float
    process: str

    def __post_init__(self):
        if self.resistance_ohm <= 0.0:
            raise ValueError("resistance must be > 0")
        if self.process not in PROCESS_LABELS:
            raise ValueError(f"process must be one of {PROCESS_LABELS}")


def write_resistance_csv(records: Iterable[ResistanceRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESISTANCE_HEADER)
        for r in records:
            writer.writerow([r.wafer_x, r.wafer_y, r.array_id,
                             r.junction_index, repr(float(r.resistance_ohm)),
                             r.process])


def read_resistance_csv(path) -> list[ResistanceRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != RESISTANCE_HEADER:
            raise ValueError(f"unexpected resistance CSV header: {header}")
        for row in reader:
            records.append(ResistanceRecord(
                wafer_x=int(row[0]), wafer_y=int(row[1]), array_id=row[2],
                junction_index=int(row[3]), resistance_ohm=float(row[4]),
                process=row[5],
            ))
    return records


def pump_on_off_gain(on: SpectrumTrace, off: SpectrumTrace) -> GainCurve:
    """Pointwise dB difference of the pump-on and pump-off spectra."""
    if on.frequency_hz.shape != off.frequency_hz.shape or not np.array_equal(
        on.frequency_hz, off.frequency_hz
    ):
        raise AlignmentError("pump-on and pump-off traces use different grids")
    return GainCurve(on.frequency_hz.copy(), on.power_dbm - off.power_dbm)


def idler_scan_features(scan: IdlerScan, fit_window: int = 5) -> dict:
    """Locate the modulation minimum of an idler bias scan.

    Returns the bias offset of the minimum (from a local quadratic fit so the
    estimate is sub-grid), the modulation depth, and whether the minimum
    reaches the setup noise floor (within 1 dB).  The local fit avoids
    assuming the full modulation shape, which measured scans distort.
    """
    if scan.bias_a.size < 5:
        raise ValueError("need at least 5 scan points")
    power = scan.idler_dbm
    depth = float(power.max() - power.min())
    if depth < 0.5:
        raise NoModulationError(f"modulation depth {depth:.2f} dB below 0.5 dB")
    i_min = int(np.argmin(power))
    half = fit_window // 2
    lo = max(0, i_min - half)
    hi = min(power.size, lo + fit_window)
    lo = max(0, hi - fit_window)
    xw = scan.bias_a[lo:hi]
    yw = power[lo:hi]
    # center the window to keep the quadratic fit well conditioned
    x0 = xw.mean()
    coeff = np.polyfit(xw - x0, yw, 2)
    if coeff[0] > 0.0:
        vertex = -coeff[1] / (2.0 * coeff[0]) + x0
        if not xw[0] <= vertex <= xw[-1]:
            vertex = float(scan.bias_a[i_min])
    else:
        vertex = float(scan.bias_a[i_min])
    return {
        "minimum_bias_offset_a": float(vertex),
        "modulation_depth_db": depth,
        "floor_reached": bool(power.min() <= scan.floor_dbm + 1.0),
    }


def jj_statistics(records: Sequence[ResistanceRecord]) -> dict:
    """Per-array homogeneity statistics plus a global summary.

    Per array: mean resistance, coefficient of variation and the
    least-squares resistance gradient versus junction index.  Arrays with
    fewer than two records are skipped with a warning.  The global summary
    pools every record and bins the distribution into a histogram.
    """
    if not records:
        raise ValueError("no records")
    by_array: dict[str, list[ResistanceRecord]] = {}
    for r in records:
        by_array.setdefault(r.array_id, []).append(r)

    per_array = {}
    for array_id in sorted(by_array):
        rows = by_array[array_id]
        if len(rows) < 2:
            warnings.warn(f"array {array_id}: fewer than 2 records, skipped",
                          stacklevel=2)
            continue
        rows = sorted(rows, key=lambda r: r.junction_index)
        idx = np.array([r.junction_index for r in rows], dtype=float)
        res = np.array([r.resistance_ohm for r in rows], dtype=float)
        mean = float(res.mean())
        cv = float(res.std(ddof=1) / mean)
        slope = float(np.polyfit(idx, res, 1)[0])
        per_array[array_id] = {
            "n": len(rows),
            "mean_ohm": mean,
            "cv": cv,
            "slope_ohm_per_index": slope,
        }
    if not per_array:
        raise ValueError("no array with at least 2 records")

    all_res = np.array([r.resistance_ohm for r in records], dtype=float)
    counts, edges = np.histogram(all_res, bins=20)
    return {
        "arrays": per_array,
        "global": {
            "n": int(all_res.size),
            "mean_ohm": float(all_res.mean()),
            "cv": float(all_res.std(ddof=1) / all_res.mean()),
            "mean_array_cv": float(np.mean([a["cv"] for a in per_array.values()])),
            "histogram_counts": counts.tolist(),
            "histogram_edges_ohm": edges.tolist(),
        },
    }


def compare_processes(records: Sequence[ResistanceRecord],
                      t_threshold: float = 3.0) -> dict:
    """Per-process resistance summary with a two-sample difference test.

    The significance indicator is a plain Welch t statistic against the
    given threshold; the underlying claim is directional, so nothing
    heavier is warranted.
    """
    groups = {label: [] for label in PROCESS_LABELS}
    for r in records:
        groups[r.process].append(r.resistance_ohm)
    if any(len(v) < 2 for v in groups.values()):
        raise ComparisonUnavailableError(
            "need at least two records of each oxidation process"
        )
    stats = {}
    for label, values in groups.items():
        arr = np.asarray(values, dtype=float)
        stats[label] = {
            "n": int(arr.size),
            "mean_ohm": float(arr.mean()),
            "cv": float(arr.std(ddof=1) / arr.mean()),
        }
    a = np.asarray(groups["static"], dtype=float)
    b = np.asarray(groups["dynamic"], dtype=float)
    se = math.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
    t_stat = (a.mean() - b.mean()) / se if se > 0.0 else math.inf
    return {
        "per_process": stats,
        "mean_difference_ohm": float(a.mean() - b.mean()),
        "t_statistic": float(t_stat),
        "significant": bool(abs(t_stat) > t_threshold),
        "static_higher": bool(a.mean() > b.mean()),
    }


def ambegaokar_baratoff_rn(ic: float, gap_ev: float = 180e-6) -> float:
    """Normal-state resistance pi*Delta/(2 e Ic) of a tunnel junction, in ohm.

    ``gap_ev`` is the superconducting gap in electronvolt; the default is a
    standard thin-film aluminum value and is an assumption, not a fitted
    quantity.
    """
    if ic <= 0.0 or gap_ev <= 0.0:
        raise ValueError("critical current and gap must be > 0")
    gap_joule = gap_ev * E_CHARGE
    return math.pi * gap_joule / (2.0 * E_CHARGE * ic)
