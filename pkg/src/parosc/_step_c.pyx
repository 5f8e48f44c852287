# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping kernels.

Statement-for-statement twin of ``_step_py``; see that module for the
right-hand-side layout.  Compiled with -ffp-contract=off so rounding matches
the pure-Python kernel.
"""
import numpy as np


def rk4_trajectory(a0, double dt, Py_ssize_t n_steps, double delta, double eps,
                   double alpha, double gamma, double sg, b_half):
    br_arr = np.ascontiguousarray(np.real(b_half), dtype=np.float64)
    bi_arr = np.ascontiguousarray(np.imag(b_half), dtype=np.float64)
    out = np.empty(n_steps + 1, dtype=np.complex128)
    cdef double[::1] br = br_arr
    cdef double[::1] bi = bi_arr
    cdef double complex[::1] o = out
    cdef double ar = float(np.real(a0))
    cdef double ai = float(np.imag(a0))
    cdef double h = dt
    cdef double n, ur, ui
    cdef double k1r, k1i, k2r, k2i, k3r, k3i, k4r, k4i
    cdef double b0r, b0i, b1r, b1i, b2r, b2i
    cdef Py_ssize_t k
    o[0] = ar + 1j * ai
    for k in range(n_steps):
        b0r = br[2 * k]
        b0i = bi[2 * k]
        b1r = br[2 * k + 1]
        b1i = bi[2 * k + 1]
        b2r = br[2 * k + 2]
        b2i = bi[2 * k + 2]

        n = ar * ar + ai * ai
        k1r = -(delta + alpha * n - eps) * ai + sg * b0i - gamma * ar
        k1i = (delta + alpha * n + eps) * ar - sg * b0r - gamma * ai

        ur = ar + 0.5 * h * k1r
        ui = ai + 0.5 * h * k1i
        n = ur * ur + ui * ui
        k2r = -(delta + alpha * n - eps) * ui + sg * b1i - gamma * ur
        k2i = (delta + alpha * n + eps) * ur - sg * b1r - gamma * ui

        ur = ar + 0.5 * h * k2r
        ui = ai + 0.5 * h * k2i
        n = ur * ur + ui * ui
        k3r = -(delta + alpha * n - eps) * ui + sg * b1i - gamma * ur
        k3i = (delta + alpha * n + eps) * ur - sg * b1r - gamma * ui

        ur = ar + h * k3r
        ui = ai + h * k3i
        n = ur * ur + ui * ui
        k4r = -(delta + alpha * n - eps) * ui + sg * b2i - gamma * ur
        k4i = (delta + alpha * n + eps) * ur - sg * b2r - gamma * ui

        ar = ar + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        ai = ai + (h / 6.0) * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
        o[k + 1] = ar + 1j * ai
    return out


def em_trajectory(a0, double dt, Py_ssize_t n_steps, double delta, double eps,
                  double alpha, double gamma, double sg, b_start, xi):
    br_arr = np.ascontiguousarray(np.real(b_start), dtype=np.float64)
    bi_arr = np.ascontiguousarray(np.imag(b_start), dtype=np.float64)
    xr_arr = np.ascontiguousarray(np.real(xi), dtype=np.float64)
    xi_arr = np.ascontiguousarray(np.imag(xi), dtype=np.float64)
    out = np.empty(n_steps + 1, dtype=np.complex128)
    cdef double[::1] br = br_arr
    cdef double[::1] bi = bi_arr
    cdef double[::1] xr = xr_arr
    cdef double[::1] xim = xi_arr
    cdef double complex[::1] o = out
    cdef double ar = float(np.real(a0))
    cdef double ai = float(np.imag(a0))
    cdef double h = dt
    cdef double n, fr, fi
    cdef Py_ssize_t k
    o[0] = ar + 1j * ai
    for k in range(n_steps):
        n = ar * ar + ai * ai
        fr = -(delta + alpha * n - eps) * ai + sg * bi[k] - gamma * ar
        fi = (delta + alpha * n + eps) * ar - sg * br[k] - gamma * ai
        ar = ar + h * fr + xr[k]
        ai = ai + h * fi + xim[k]
        o[k + 1] = ar + 1j * ai
    return out
