"""Bloch dispersion of periodically loaded lines via 2x2 transfer matrices.

A line is a chain of identical unit cells, optionally with loaded cells at
periodic positions.  Each cell is reduced to a series impedance / shunt
admittance two-port; the repeating unit (super-cell) is cascaded per
frequency and the complex Bloch phase per cell follows from
cos(K) = (A + D)/2.  The scan unfolds the principal arccos branch across
band edges so that phase-mismatch arithmetic can use true accumulated phase.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._backend import kernels
from .circuit import (
    Cell,
    KineticCell,
    RfSquidCell,
    josephson_inductance,
    kinetic_inductance,
    squid_effective_inductance,
)
from .errors import InconsistentMatrixError, OutOfRangeError

DET_TOLERANCE = 1e-6
DEFAULT_STOPBAND_THRESHOLD = 1e-6  # nepers per cell


@dataclass(frozen=True)
class AbcdMatrix:
    """Two-port chain matrix; lossless reciprocal cells keep det = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    @property
    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def mirrored(self) -> "AbcdMatrix":
        """The same two-port seen from the opposite side (A and D swap)."""
        return AbcdMatrix(self.d, self.b, self.c, self.a)

    def __matmul__(self, other: "AbcdMatrix") -> "AbcdMatrix":
        return AbcdMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)


IDENTITY = AbcdMatrix(1.0, 0.0, 0.0, 1.0)


def series_impedance_abcd(z: complex) -> AbcdMatrix:
    return AbcdMatrix(1.0, z, 0.0, 1.0)


def shunt_admittance_abcd(y: complex) -> AbcdMatrix:
    return AbcdMatrix(1.0, 0.0, y, 1.0)


@dataclass(frozen=True)
class LoadingSlot:
    """Descriptor of a modified cell.

    ``impedance_scale`` multiplies the series impedance and divides the shunt
    admittance, which scales the local impedance while preserving the phase
    velocity.  A shunt LC resonator (series Lr-Cr branch to ground) may be
    attached for resonant re-phasing loads.
    """

    impedance_scale: float = 1.0
    shunt_resonator_l: float | None = None
    shunt_resonator_c: float | None = None

    def __post_init__(self):
        if self.impedance_scale <= 0.0:
            raise ValueError("impedance_scale must be > 0")
        if (self.shunt_resonator_l is None) != (self.shunt_resonator_c is None):
            raise ValueError("resonator needs both L and C")

    @property
    def has_resonator(self) -> bool:
        return self.shunt_resonator_l is not None

    def to_json_dict(self) -> dict:
        return {
            "impedance_scale": self.impedance_scale,
            "shunt_resonator_l": self.shunt_resonator_l,
            "shunt_resonator_c": self.shunt_resonator_c,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "LoadingSlot":
        return cls(
            impedance_scale=d.get("impedance_scale", 1.0),
            shunt_resonator_l=d.get("shunt_resonator_l"),
            shunt_resonator_c=d.get("shunt_resonator_c"),
        )


@dataclass(frozen=True)
class LineSpec:
    """A transmission line: base cell, length, bias and loaded-cell positions.

    ``loadings`` lists (cell position, slot descriptor) pairs.  When
    ``period`` is set the loadings repeat with that period and positions must
    lie inside [0, period); Floquet analysis then uses the period as the
    super-cell.  Without a period the whole line is treated as one repeating
    unit.  ``cell_length`` (meters) is metadata used only for reporting.
    """

    base_cell: Cell
    n_cells: int = 990
    cell_length: float = 1.0
    loadings: tuple = ()
    bias: float = 0.0
    period: int | None = None

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError("n_cells must be >= 1")
        span = self.period if self.period is not None else self.n_cells
        if self.period is not None and self.period < 1:
            raise ValueError("period must be >= 1")
        for pos, slot in self.loadings:
            if not 0 <= pos < span:
                raise ValueError(f"loading position {pos} outside [0, {span})")
            if not isinstance(slot, LoadingSlot):
                raise TypeError("loadings must hold LoadingSlot descriptors")

    def supercell(self) -> int:
        if self.period is not None:
            return self.period
        return 1 if not self.loadings else self.n_cells


def _base_zy(cell: Cell, omega: float, bias: float) -> tuple[complex, complex]:
    """Series impedance and total shunt admittance of the unloaded cell."""
    jw = 1j * omega
    if isinstance(cell, RfSquidCell):
        lj = josephson_inductance(cell.junction, bias)
        y_series = (
            1.0 / (jw * cell.geometric_inductance)
            + 1.0 / (jw * lj)
            + jw * cell.junction.self_capacitance
        )
        return 1.0 / y_series, jw * cell.ground_capacitance
    if isinstance(cell, KineticCell):
        ld = kinetic_inductance(cell, bias)
        # two finger branches, each Lf in series with C/2 to ground
        z_finger = jw * cell.finger_inductance + 2.0 / (jw * cell.ground_capacitance)
        return jw * ld, 2.0 / z_finger
    raise TypeError(f"unsupported cell type: {type(cell).__name__}")


def _slot_zy(z: complex, y: complex, omega: float, slot: LoadingSlot | None) -> tuple[complex, complex]:
    if slot is None:
        return z, y
    z = z * slot.impedance_scale
    y = y / slot.impedance_scale
    if slot.has_resonator:
        z_res = 1j * omega * slot.shunt_resonator_l + 1.0 / (
            1j * omega * slot.shunt_resonator_c
        )
        # an ideal lossless branch is a perfect short exactly on resonance;
        # clamp so a grid point landing there stays finite
        if abs(z_res) < 1e-9:
            z_res = 1e-9j
        y = y + 1.0 / z_res
    return z, y


def cell_abcd(cell: Cell, frequency: float, bias: float = 0.0,
              slot: LoadingSlot | None = None) -> AbcdMatrix:
    """Series-impedance / shunt-admittance cascade of one cell at one frequency."""
    if frequency <= 0.0:
        raise ValueError("frequency must be > 0")
    omega = 2.0 * math.pi * frequency
    z, y = _slot_zy(*_base_zy(cell, omega, bias), omega, slot)
    return series_impedance_abcd(z) @ shunt_admittance_abcd(y)


def cascade(matrices: Sequence[AbcdMatrix]) -> AbcdMatrix:
    """Ordered product of two-port matrices (first element at the input)."""
    if not matrices:
        raise ValueError("cascade of an empty list")
    out = matrices[0]
    for m in matrices[1:]:
        out = out @ m
    return out


def bloch_wavenumber(m: AbcdMatrix) -> complex:
    """Complex Bloch phase per cell, principal branch Re in [0, pi], Im >= 0."""
    det = m.determinant
    if abs(det - 1.0) > DET_TOLERANCE:
        raise InconsistentMatrixError(
            f"determinant {det:.3e} deviates from 1 beyond {DET_TOLERANCE:g}"
        )
    half_trace = (m.a + m.d) / 2.0
    k = cmath.acos(half_trace)
    if k.imag < 0.0:
        k = k.conjugate()
    if k.real < 0.0:
        k = complex(-k.real, k.imag)
    return k


def image_impedance(cell: Cell, frequency: float, bias: float = 0.0) -> float:
    """Mid-series image impedance sqrt(B/C) of the unit cell, in ohms.

    Real in a passband; reduces to sqrt(L/C) for a plain LC cell.
    """
    m = cell_abcd(cell, frequency, bias)
    val = cmath.sqrt(m.b / m.c)
    return abs(val)


@dataclass(frozen=True)
class Stopband:
    """A forbidden band: edge frequencies and peak per-cell attenuation."""

    lower_hz: float
    upper_hz: float
    max_attenuation_nepers: float

    def __post_init__(self):
        if not self.lower_hz < self.upper_hz:
            raise ValueError("stopband must satisfy lower < upper")
        if self.max_attenuation_nepers <= 0.0:
            raise ValueError("stopband attenuation must be > 0")

    def contains(self, frequency: float) -> bool:
        return self.lower_hz < frequency < self.upper_hz


@dataclass(frozen=True)
class DispersionCurve:
    """Complex Bloch phase per cell on a strictly increasing frequency grid.

    The real part is the unfolded (zone-extended) phase so differences of
    k(f) between tones are physically meaningful; the imaginary part is the
    per-cell attenuation in nepers (>= 0).
    """

    frequency_hz: np.ndarray
    ka: np.ndarray  # complex radians per cell
    supercell_cells: int = 1

    def __post_init__(self):
        f = np.asarray(self.frequency_hz, dtype=float)
        k = np.asarray(self.ka, dtype=np.complex128)
        if f.ndim != 1 or f.size < 2 or k.shape != f.shape:
            raise ValueError("grid and ka must be matching 1-D arrays")
        if not np.all(np.diff(f) > 0.0):
            raise ValueError("frequency grid must be strictly increasing")
        if np.any(k.imag < -1e-12):
            raise ValueError("attenuation sign convention violated (Im < 0)")
        object.__setattr__(self, "frequency_hz", f)
        object.__setattr__(self, "ka", k)

    def real_ka_at(self, frequency: float) -> float:
        self._check_range(frequency)
        return float(np.interp(frequency, self.frequency_hz, self.ka.real))

    def attenuation_at(self, frequency: float) -> float:
        self._check_range(frequency)
        return float(np.interp(frequency, self.frequency_hz, self.ka.imag))

    def _check_range(self, frequency: float) -> None:
        if not self.frequency_hz[0] <= frequency <= self.frequency_hz[-1]:
            raise OutOfRangeError(
                f"{frequency:.6g} Hz outside curve grid "
                f"[{self.frequency_hz[0]:.6g}, {self.frequency_hz[-1]:.6g}]"
            )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frequency_hz", "re_ka", "im_ka"])
            for f, k in zip(self.frequency_hz, self.ka):
                writer.writerow([repr(float(f)), repr(float(k.real)), repr(float(k.imag))])

    @classmethod
    def from_csv(cls, path) -> "DispersionCurve":
        freqs, res, ims = [], [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["frequency_hz", "re_ka", "im_ka"]:
                raise ValueError(f"unexpected dispersion CSV header: {header}")
            for row in reader:
                freqs.append(float(row[0]))
                res.append(float(row[1]))
                ims.append(float(row[2]))
        return cls(np.array(freqs), np.array(res) + 1j * np.array(ims))


def _supercell_tables(line: LineSpec, grid: np.ndarray):
    """Per-type ABCD tables over the grid plus the super-cell type sequence."""
    n_super = line.supercell()
    slot_by_pos = {}
    for pos, slot in line.loadings:
        if line.period is None and n_super == line.n_cells:
            slot_by_pos[pos % n_super] = slot
        else:
            slot_by_pos[pos] = slot

    distinct: list[LoadingSlot | None] = [None]
    index_of = {None: 0}
    seq = np.zeros(n_super, dtype=np.int64)
    for pos, slot in slot_by_pos.items():
        if slot not in index_of:
            index_of[slot] = len(distinct)
            distinct.append(slot)
        seq[pos] = index_of[slot]

    omega = 2.0 * math.pi * grid
    tables = np.empty((len(distinct), grid.size, 4), dtype=np.complex128)
    for t, slot in enumerate(distinct):
        z = np.empty(grid.size, dtype=np.complex128)
        y = np.empty(grid.size, dtype=np.complex128)
        for i, w in enumerate(omega):
            zi, yi = _slot_zy(*_base_zy(line.base_cell, w, line.bias), w, slot)
            z[i] = zi
            y[i] = yi
        # series @ shunt: [[1+z*y, z], [y, 1]]
        tables[t, :, 0] = 1.0 + z * y
        tables[t, :, 1] = z
        tables[t, :, 2] = y
        tables[t, :, 3] = 1.0
    return tables, seq


def _unfold_phase(grid: np.ndarray, folded: np.ndarray, atten: np.ndarray) -> np.ndarray:
    """Extend the principal arccos branch monotonically across band edges.

    Chooses, per point, the candidate 2*pi*n +/- folded closest to a linear
    extrapolation of the running curve.  Requires a grid dense enough that
    the phase advances by well under pi between neighboring points.
    """
    out = np.empty_like(folded)
    out[0] = folded[0]
    slope = 0.0
    two_pi = 2.0 * math.pi
    for i in range(1, folded.size):
        df = grid[i] - grid[i - 1]
        pred = out[i - 1] + slope * df
        best = None
        for branch in (folded[i], -folded[i]):
            n = round((pred - branch) / two_pi)
            for nn in (n - 1, n, n + 1):
                cand = two_pi * nn + branch
                if cand < out[i - 1] - 1e-9:
                    continue
                if best is None or abs(cand - pred) < abs(best - pred):
                    best = cand
        out[i] = best if best is not None else out[i - 1]
        if df > 0.0:
            slope = (out[i] - out[i - 1]) / df
    return out


def scan_dispersion(line: LineSpec, grid: Iterable[float]) -> DispersionCurve:
    """Bloch phase per cell of the line's repeating unit over a frequency grid."""
    grid = np.asarray(list(grid) if not isinstance(grid, np.ndarray) else grid,
                      dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-D array with at least two points")
    if np.any(grid <= 0.0) or not np.all(np.diff(grid) > 0.0):
        raise ValueError("grid must be positive and strictly increasing")

    tables, seq = _supercell_tables(line, grid)
    chain = kernels.cascade_chain(tables, seq)
    half_trace = (chain[:, 0] + chain[:, 3]) / 2.0
    # lossless reactive cells give a real trace; tolerate rounding residue
    t = half_trace.real

    folded = np.empty(grid.size)
    atten = np.zeros(grid.size)
    inside = np.abs(t) <= 1.0
    folded[inside] = np.arccos(t[inside])
    over = t > 1.0
    under = t < -1.0
    folded[over] = 0.0
    folded[under] = math.pi
    atten[over] = np.arccosh(t[over])
    atten[under] = np.arccosh(-t[under])

    unfolded = _unfold_phase(grid, folded, atten)
    n_super = len(seq)
    ka = (unfolded + 1j * atten) / n_super
    return DispersionCurve(grid, ka, supercell_cells=n_super)


def find_stopbands(curve: DispersionCurve,
                   min_attenuation: float = DEFAULT_STOPBAND_THRESHOLD) -> list[Stopband]:
    """Maximal grid intervals with per-cell attenuation above the threshold.

    Intervals supported by a single grid point cannot satisfy lower < upper
    and are below the scan's resolution; they are ignored.
    """
    im = curve.ka.imag
    f = curve.frequency_hz
    bands: list[Stopband] = []
    i = 0
    n = im.size
    while i < n:
        if im[i] > min_attenuation:
            j = i
            while j + 1 < n and im[j + 1] > min_attenuation:
                j += 1
            if j > i:
                bands.append(
                    Stopband(
                        lower_hz=float(f[i]),
                        upper_hz=float(f[j]),
                        max_attenuation_nepers=float(im[i:j + 1].max()),
                    )
                )
            i = j + 1
        else:
            i += 1
    return bands


def idler_frequency(f_pump: float, f_signal: float, mode: str) -> float:
    """Idler frequency fixed by energy conservation for the mixing order."""
    if mode == "3WM":
        return f_pump - f_signal
    if mode == "4WM":
        return 2.0 * f_pump - f_signal
    raise ValueError(f"mode must be '3WM' or '4WM', got {mode!r}")


def phase_mismatch(curve: DispersionCurve, f_pump: float, f_signal: float,
                   mode: str) -> float:
    """Wavenumber imbalance of the mixing process, radians per cell.

    3WM: k_p - k_s - k_i with f_i = f_p - f_s.
    4WM: 2 k_p - k_s - k_i with f_i = 2 f_p - f_s.
    Real parts only, linear interpolation on the curve grid.
    """
    f_idler = idler_frequency(f_pump, f_signal, mode)
    if f_idler <= 0.0:
        raise OutOfRangeError(f"idler frequency {f_idler:.6g} Hz is not positive")
    k_p = curve.real_ka_at(f_pump)
    k_s = curve.real_ka_at(f_signal)
    k_i = curve.real_ka_at(f_idler)
    if mode == "3WM":
        return k_p - k_s - k_i
    return 2.0 * k_p - k_s - k_i
