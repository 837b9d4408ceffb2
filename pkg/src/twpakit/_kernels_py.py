"""Pure-Python fallback kernels.

Same numerical contract as the compiled extension in _kernels.pyx: an
embedded Dormand-Prince 5(4) stepper over the three complex mode amplitudes,
and a per-frequency chain product of 2x2 transfer matrices.  Keep the two
implementations in lockstep; tests compare them directly.
"""

from __future__ import annotations

import cmath

import numpy as np

COMPILED = False

# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
)
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
# error = 5th-order minus embedded 4th-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_H_MIN = 1e-12
_MAX_REJECTS = 60

STATUS_OK = 0
STATUS_NONFINITE = 1
STATUS_UNDERFLOW = 2


def _rhs(x, ap, as_, ai, mode, g3, g4, kp, ks, ki, delta_k, sigma, deplete):
    np_ = ap.real * ap.real + ap.imag * ap.imag
    ns = as_.real * as_.real + as_.imag * as_.imag
    ni = ai.real * ai.real + ai.imag * ai.imag
    ph = cmath.exp(-1j * delta_k * x)
    if mode == 3:
        mix = g3 * sigma
        dp = -1j * mix * as_ * ai * ph.conjugate()
        ds = -1j * mix * ap * ai.conjugate() * ph
        di = -1j * mix * ap * as_.conjugate() * ph
    else:
        mix = g4 * sigma
        dp = -2j * mix * as_ * ai * ap.conjugate() * ph.conjugate()
        ds = -1j * mix * ap * ap * ai.conjugate() * ph
        di = -1j * mix * ap * ap * as_.conjugate() * ph
    ds += -1j * ks * (ns + 2.0 * np_ + 2.0 * ni) * as_
    di += -1j * ki * (ni + 2.0 * np_ + 2.0 * ns) * ai
    if deplete:
        dp += -1j * kp * (np_ + 2.0 * ns + 2.0 * ni) * ap
    else:
        dp = 0.0 + 0.0j
    return dp, ds, di


def cme_rk45(ap0, as0, ai0, n_cells, mode, g3, g4, kerr_p, kerr_s, kerr_i,
             delta_k, sign, rtol, deplete_pump):
    """Integrate the coupled-mode equations over ``n_cells`` unit cells.

    Returns (trajectory, status, bad_cell, n_steps) where trajectory is a
    complex128 array of shape (n_cells + 1, 3) sampled at cell boundaries.
    Error control is relative per component with weight
    rtol * max(|y_start|, |y_end|).
    """
    traj = np.empty((n_cells + 1, 3), dtype=np.complex128)
    ap, as_, ai = complex(ap0), complex(as0), complex(ai0)
    traj[0] = (ap, as_, ai)
    deplete = bool(deplete_pump)

    h_try = 0.5
    n_steps = 0
    k1 = None
    for cell in range(n_cells):
        sigma = 1.0 if sign is None else float(sign[cell])
        x = float(cell)
        x_end = float(cell + 1)
        if k1 is None:
            k1 = _rhs(x, ap, as_, ai, mode, g3, g4, kerr_p, kerr_s, kerr_i,
                      delta_k, sigma, deplete)
        while x < x_end:
            clipped = h_try >= x_end - x
            h = x_end - x if clipped else h_try
            rejects = 0
            while True:
                kp1, ks1, ki1 = k1
                yp = ap + h * _A21 * kp1
                ys = as_ + h * _A21 * ks1
                yi = ai + h * _A21 * ki1
                kp2, ks2, ki2 = _rhs(x + h / 5.0, yp, ys, yi, mode, g3, g4,
                                     kerr_p, kerr_s, kerr_i, delta_k, sigma, deplete)
                yp = ap + h * (_A31 * kp1 + _A32 * kp2)
                ys = as_ + h * (_A31 * ks1 + _A32 * ks2)
                yi = ai + h * (_A31 * ki1 + _A32 * ki2)
                kp3, ks3, ki3 = _rhs(x + 3.0 * h / 10.0, yp, ys, yi, mode, g3, g4,
                                     kerr_p, kerr_s, kerr_i, delta_k, sigma, deplete)
                yp = ap + h * (_A41 * kp1 + _A42 * kp2 + _A43 * kp3)
                ys = as_ + h * (_A41 * ks1 + _A42 * ks2 + _A43 * ks3)
                yi = ai + h * (_A41 * ki1 + _A42 * ki2 + _A43 * ki3)
                kp4, ks4, ki4 = _rhs(x + 4.0 * h / 5.0, yp, ys, yi, mode, g3, g4,
                                     kerr_p, kerr_s, kerr_i, delta_k, sigma, deplete)
                yp = ap + h * (_A51 * kp1 + _A52 * kp2 + _A53 * kp3 + _A54 * kp4)
                ys = as_ + h * (_A51 * ks1 + _A52 * ks2 + _A53 * ks3 + _A54 * ks4)
                yi = ai + h * (_A51 * ki1 + _A52 * ki2 + _A53 * ki3 + _A54 * ki4)
                kp5, ks5, ki5 = _rhs(x + 8.0 * h / 9.0, yp, ys, yi, mode, g3, g4,
                                     kerr_p, kerr_s, kerr_i, delta_k, sigma, deplete)
                yp = ap + h * (_A61 * kp1 + _A62 * kp2 + _A63 * kp3 + _A64 * kp4 + _A65 * kp5)
                ys = as_ + h * (_A61 * ks1 + _A62 * ks2 + _A63 * ks3 + _A64 * ks4 + _A65 * ks5)
                yi = ai + h * (_A61 * ki1 + _A62 * ki2 + _A63 * ki3 + _A64 * ki4 + _A65 * ki5)
                kp6, ks6, ki6 = _rhs(x + h, yp, ys, yi, mode, g3, g4,
                                     kerr_p, kerr_s, kerr_i, delta_k, sigma, deplete)
                np5 = ap + h * (_B1 * kp1 + _B3 * kp3 + _B4 * kp4 + _B5 * kp5 + _B6 * kp6)
                ns5 = as_ + h * (_B1 * ks1 + _B3 * ks3 + _B4 * ks4 + _B5 * ks5 + _B6 * ks6)
                ni5 = ai + h * (_B1 * ki1 + _B3 * ki3 + _B4 * ki4 + _B5 * ki5 + _B6 * ki6)
                kp7, ks7, ki7 = _rhs(x + h, np5, ns5, ni5, mode, g3, g4,
                                     kerr_p, kerr_s, kerr_i, delta_k, sigma, deplete)
                ep = h * (_E1 * kp1 + _E3 * kp3 + _E4 * kp4 + _E5 * kp5 + _E6 * kp6 + _E7 * kp7)
                es = h * (_E1 * ks1 + _E3 * ks3 + _E4 * ks4 + _E5 * ks5 + _E6 * ks6 + _E7 * ks7)
                ei = h * (_E1 * ki1 + _E3 * ki3 + _E4 * ki4 + _E5 * ki5 + _E6 * ki6 + _E7 * ki7)
                n_steps += 1

                if not (
                    _finite(np5) and _finite(ns5) and _finite(ni5)
                    and _finite(ep) and _finite(es) and _finite(ei)
                ):
                    return traj, STATUS_NONFINITE, cell, n_steps

                err = 0.0
                for e, y0c, y1c in ((ep, ap, np5), (es, as_, ns5), (ei, ai, ni5)):
                    w = rtol * max(abs(y0c), abs(y1c))
                    mag = abs(e)
                    if w > 0.0:
                        err = max(err, mag / w)
                    elif mag > 0.0:
                        err = float("inf")

                if err <= 1.0:
                    x = x_end if clipped else x + h
                    ap, as_, ai = np5, ns5, ni5
                    k1 = (kp7, ks7, ki7)
                    if not clipped:
                        factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                        h_try = h * factor
                    break
                rejects += 1
                h = h * min(0.9, max(0.2, 0.9 * err ** -0.2))
                h_try = h
                clipped = False
                if h < _H_MIN or rejects > _MAX_REJECTS:
                    return traj, STATUS_UNDERFLOW, cell, n_steps
        traj[cell + 1] = (ap, as_, ai)
        if sign is not None:
            # the coupling flips discontinuously between cells: refresh FSAL stage
            k1 = None
    return traj, STATUS_OK, -1, n_steps


def _finite(z) -> bool:
    return cmath.isfinite(z)


def cascade_chain(abcd_types: np.ndarray, seq: np.ndarray) -> np.ndarray:
    """Chain product of per-type ABCD matrices along a cell sequence.

    ``abcd_types`` has shape (n_types, n_freq, 4) holding (A, B, C, D) per
    frequency; ``seq`` is the ordered cell-type index sequence.  Returns the
    (n_freq, 4) product, first sequence element applied first (input side).
    """
    n_freq = abcd_types.shape[1]
    a = np.ones(n_freq, dtype=np.complex128)
    b = np.zeros(n_freq, dtype=np.complex128)
    c = np.zeros(n_freq, dtype=np.complex128)
    d = np.ones(n_freq, dtype=np.complex128)
    for t in seq:
        ta, tb, tc, td = (abcd_types[t, :, j] for j in range(4))
        a, b, c, d = (
            a * ta + b * tc,
            a * tb + b * td,
            c * ta + d * tc,
            c * tb + d * td,
        )
    out = np.empty((n_freq, 4), dtype=np.complex128)
    out[:, 0], out[:, 1], out[:, 2], out[:, 3] = a, b, c, d
    return out
