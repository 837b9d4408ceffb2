# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Dormand-Prince 5(4) coupled-mode stepper and 2x2 chain
product.  Mirrors _kernels_py.py exactly; tests compare the two backends."""

import numpy as np

from libc.math cimport cos, sin, fabs, fmax, fmin, pow, isfinite, sqrt

COMPILED = True

STATUS_OK = 0
STATUS_NONFINITE = 1
STATUS_UNDERFLOW = 2

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double H_MIN = 1e-12
cdef int MAX_REJECTS = 60

ctypedef double complex cplx


cdef inline double cmag(cplx z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef inline bint cfinite(cplx z) nogil:
    return isfinite(z.real) and isfinite(z.imag)


cdef inline void rhs(double x, cplx ap, cplx as_, cplx ai,
                     int mode, double g3, double g4,
                     double kp, double ks, double ki,
                     double delta_k, double sigma, bint deplete,
                     cplx *dp, cplx *ds, cplx *di) nogil:
    cdef double np_ = ap.real * ap.real + ap.imag * ap.imag
    cdef double ns = as_.real * as_.real + as_.imag * as_.imag
    cdef double ni = ai.real * ai.real + ai.imag * ai.imag
    cdef double theta = delta_k * x
    cdef cplx ph = cos(theta) - 1j * sin(theta)
    cdef cplx phc = cos(theta) + 1j * sin(theta)
    cdef double mix
    cdef cplx tp, ts, ti
    if mode == 3:
        mix = g3 * sigma
        tp = -1j * mix * as_ * ai * phc
        ts = -1j * mix * ap * ai.conjugate() * ph
        ti = -1j * mix * ap * as_.conjugate() * ph
    else:
        mix = g4 * sigma
        tp = -2j * mix * as_ * ai * ap.conjugate() * phc
        ts = -1j * mix * ap * ap * ai.conjugate() * ph
        ti = -1j * mix * ap * ap * as_.conjugate() * ph
    ts = ts - 1j * ks * (ns + 2.0 * np_ + 2.0 * ni) * as_
    ti = ti - 1j * ki * (ni + 2.0 * np_ + 2.0 * ns) * ai
    if deplete:
        tp = tp - 1j * kp * (np_ + 2.0 * ns + 2.0 * ni) * ap
    else:
        tp = 0
    dp[0] = tp
    ds[0] = ts
    di[0] = ti


def cme_rk45(ap0, as0, ai0, int n_cells, int mode, double g3, double g4,
             double kerr_p, double kerr_s, double kerr_i, double delta_k,
             sign, double rtol, bint deplete_pump):
    """Integrate the coupled-mode equations over ``n_cells`` unit cells.

    Returns (trajectory, status, bad_cell, n_steps); see the fallback
    implementation for the contract.
    """
    traj_arr = np.empty((n_cells + 1, 3), dtype=np.complex128)
    cdef cplx[:, :] traj = traj_arr
    cdef double[:] sig_view
    cdef bint has_sign = sign is not None
    if has_sign:
        sig_view = np.ascontiguousarray(sign, dtype=np.float64)
    else:
        sig_view = np.empty(1, dtype=np.float64)

    cdef cplx ap = ap0, as_ = as0, ai = ai0
    cdef cplx kp1, ks1, ki1, kp2, ks2, ki2, kp3, ks3, ki3
    cdef cplx kp4, ks4, ki4, kp5, ks5, ki5, kp6, ks6, ki6, kp7, ks7, ki7
    cdef cplx yp, ys, yi, np5, ns5, ni5, ep, es, ei
    cdef double x, x_end, h, h_try, sigma, err, w, mag, factor
    cdef int cell, rejects
    cdef long n_steps = 0
    cdef bint k1_valid = False
    cdef bint clipped

    traj[0, 0] = ap
    traj[0, 1] = as_
    traj[0, 2] = ai

    h_try = 0.5
    for cell in range(n_cells):
        sigma = sig_view[cell] if has_sign else 1.0
        x = cell
        x_end = cell + 1
        if not k1_valid:
            rhs(x, ap, as_, ai, mode, g3, g4, kerr_p, kerr_s, kerr_i,
                delta_k, sigma, deplete_pump, &kp1, &ks1, &ki1)
            k1_valid = True
        while x < x_end:
            clipped = h_try >= x_end - x
            h = x_end - x if clipped else h_try
            rejects = 0
            while True:
                yp = ap + h * A21 * kp1
                ys = as_ + h * A21 * ks1
                yi = ai + h * A21 * ki1
                rhs(x + h / 5.0, yp, ys, yi, mode, g3, g4, kerr_p, kerr_s,
                    kerr_i, delta_k, sigma, deplete_pump, &kp2, &ks2, &ki2)
                yp = ap + h * (A31 * kp1 + A32 * kp2)
                ys = as_ + h * (A31 * ks1 + A32 * ks2)
                yi = ai + h * (A31 * ki1 + A32 * ki2)
                rhs(x + 3.0 * h / 10.0, yp, ys, yi, mode, g3, g4, kerr_p,
                    kerr_s, kerr_i, delta_k, sigma, deplete_pump, &kp3, &ks3, &ki3)
                yp = ap + h * (A41 * kp1 + A42 * kp2 + A43 * kp3)
                ys = as_ + h * (A41 * ks1 + A42 * ks2 + A43 * ks3)
                yi = ai + h * (A41 * ki1 + A42 * ki2 + A43 * ki3)
                rhs(x + 4.0 * h / 5.0, yp, ys, yi, mode, g3, g4, kerr_p,
                    kerr_s, kerr_i, delta_k, sigma, deplete_pump, &kp4, &ks4, &ki4)
                yp = ap + h * (A51 * kp1 + A52 * kp2 + A53 * kp3 + A54 * kp4)
                ys = as_ + h * (A51 * ks1 + A52 * ks2 + A53 * ks3 + A54 * ks4)
                yi = ai + h * (A51 * ki1 + A52 * ki2 + A53 * ki3 + A54 * ki4)
                rhs(x + 8.0 * h / 9.0, yp, ys, yi, mode, g3, g4, kerr_p,
                    kerr_s, kerr_i, delta_k, sigma, deplete_pump, &kp5, &ks5, &ki5)
                yp = ap + h * (A61 * kp1 + A62 * kp2 + A63 * kp3 + A64 * kp4 + A65 * kp5)
                ys = as_ + h * (A61 * ks1 + A62 * ks2 + A63 * ks3 + A64 * ks4 + A65 * ks5)
                yi = ai + h * (A61 * ki1 + A62 * ki2 + A63 * ki3 + A64 * ki4 + A65 * ki5)
                rhs(x + h, yp, ys, yi, mode, g3, g4, kerr_p, kerr_s, kerr_i,
                    delta_k, sigma, deplete_pump, &kp6, &ks6, &ki6)
                np5 = ap + h * (B1 * kp1 + B3 * kp3 + B4 * kp4 + B5 * kp5 + B6 * kp6)
                ns5 = as_ + h * (B1 * ks1 + B3 * ks3 + B4 * ks4 + B5 * ks5 + B6 * ks6)
                ni5 = ai + h * (B1 * ki1 + B3 * ki3 + B4 * ki4 + B5 * ki5 + B6 * ki6)
                rhs(x + h, np5, ns5, ni5, mode, g3, g4, kerr_p, kerr_s, kerr_i,
                    delta_k, sigma, deplete_pump, &kp7, &ks7, &ki7)
                ep = h * (E1 * kp1 + E3 * kp3 + E4 * kp4 + E5 * kp5 + E6 * kp6 + E7 * kp7)
                es = h * (E1 * ks1 + E3 * ks3 + E4 * ks4 + E5 * ks5 + E6 * ks6 + E7 * ks7)
                ei = h * (E1 * ki1 + E3 * ki3 + E4 * ki4 + E5 * ki5 + E6 * ki6 + E7 * ki7)
                n_steps += 1

                if not (cfinite(np5) and cfinite(ns5) and cfinite(ni5)
                        and cfinite(ep) and cfinite(es) and cfinite(ei)):
                    return traj_arr, STATUS_NONFINITE, cell, n_steps

                err = 0.0
                w = rtol * fmax(cmag(ap), cmag(np5))
                mag = cmag(ep)
                if w > 0.0:
                    err = fmax(err, mag / w)
                elif mag > 0.0:
                    err = 1e308
                w = rtol * fmax(cmag(as_), cmag(ns5))
                mag = cmag(es)
                if w > 0.0:
                    err = fmax(err, mag / w)
                elif mag > 0.0:
                    err = 1e308
                w = rtol * fmax(cmag(ai), cmag(ni5))
                mag = cmag(ei)
                if w > 0.0:
                    err = fmax(err, mag / w)
                elif mag > 0.0:
                    err = 1e308

                if err <= 1.0:
                    x = x_end if clipped else x + h
                    ap = np5
                    as_ = ns5
                    ai = ni5
                    kp1 = kp7
                    ks1 = ks7
                    ki1 = ki7
                    if not clipped:
                        factor = 5.0 if err == 0.0 else fmin(5.0, fmax(0.2, 0.9 * pow(err, -0.2)))
                        h_try = h * factor
                    break
                rejects += 1
                h = h * fmin(0.9, fmax(0.2, 0.9 * pow(err, -0.2)))
                h_try = h
                clipped = False
                if h < H_MIN or rejects > MAX_REJECTS:
                    return traj_arr, STATUS_UNDERFLOW, cell, n_steps
        traj[cell + 1, 0] = ap
        traj[cell + 1, 1] = as_
        traj[cell + 1, 2] = ai
        if has_sign:
            # the coupling flips discontinuously between cells: refresh FSAL stage
            k1_valid = False
    return traj_arr, STATUS_OK, -1, n_steps


def cascade_chain(abcd_types, seq):
    """Chain product of per-type ABCD matrices along a cell sequence."""
    cdef cplx[:, :, :] types = np.ascontiguousarray(abcd_types, dtype=np.complex128)
    cdef long[:] s = np.ascontiguousarray(seq, dtype=np.int64)
    cdef Py_ssize_t n_freq = types.shape[1]
    cdef Py_ssize_t n_seq = s.shape[0]
    out_arr = np.empty((n_freq, 4), dtype=np.complex128)
    cdef cplx[:, :] out = out_arr
    cdef cplx a, b, c, d, ta, tb, tc, td, na, nb, nc, nd
    cdef Py_ssize_t f, n
    cdef long t
    for f in range(n_freq):
        a = 1.0
        b = 0.0
        c = 0.0
        d = 1.0
        for n in range(n_seq):
            t = s[n]
            ta = types[t, f, 0]
            tb = types[t, f, 1]
            tc = types[t, f, 2]
            td = types[t, f, 3]
            na = a * ta + b * tc
            nb = a * tb + b * td
            nc = c * ta + d * tc
            nd = c * tb + d * td
            a = na
            b = nb
            c = nc
            d = nd
        out[f, 0] = a
        out[f, 1] = b
        out[f, 2] = c
        out[f, 3] = d
    return out_arr
