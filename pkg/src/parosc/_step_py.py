"""Pure-Python time-stepping kernels (fallback for the compiled extension).

Operation order matches ``_step_c.pyx`` statement for statement so both
backends produce numerically matching trajectories.  The right-hand side of
the slow-amplitude equation, in quadrature components a = ar + i*ai with
drive b = br + i*bi, is

    f_re = -(delta + alpha*n - eps) * ai + sg * bi - gamma * ar
    f_im =  (delta + alpha*n + eps) * ar - sg * br - gamma * ai

with n = ar^2 + ai^2 and sg = sqrt(2*Gamma_ext).
"""
from __future__ import annotations

import numpy as np


def rk4_trajectory(a0, dt, n_steps, delta, eps, alpha, gamma, sg, b_half):
    """Fixed-step RK4 trajectory; returns complex array of length n_steps + 1.

    ``b_half`` holds the drive sampled at half-step spacing: b_half[k] is
    B(k*dt/2), length 2*n_steps + 1.
    """
    # native float lists: CPython scalar arithmetic is several times faster
    # than numpy scalar arithmetic in this sequential loop
    br = np.asarray(np.real(b_half), dtype=float).tolist()
    bi = np.asarray(np.imag(b_half), dtype=float).tolist()
    out = np.empty(n_steps + 1, dtype=complex)
    ar = float(np.real(a0))
    ai = float(np.imag(a0))
    out[0] = complex(ar, ai)
    h = float(dt)
    delta = float(delta)
    eps = float(eps)
    alpha = float(alpha)
    gamma = float(gamma)
    sg = float(sg)
    for k in range(n_steps):
        b0r, b0i = br[2 * k], bi[2 * k]
        b1r, b1i = br[2 * k + 1], bi[2 * k + 1]
        b2r, b2i = br[2 * k + 2], bi[2 * k + 2]

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
        out[k + 1] = complex(ar, ai)
    return out


def em_trajectory(a0, dt, n_steps, delta, eps, alpha, gamma, sg, b_start, xi):
    """Euler-Maruyama trajectory with additive complex noise increments.

    ``b_start[k]`` is the drive at the start of step k (length n_steps) and
    ``xi[k]`` the pre-scaled complex noise increment added after the drift
    update (length n_steps).
    """
    br = np.asarray(np.real(b_start), dtype=float).tolist()
    bi = np.asarray(np.imag(b_start), dtype=float).tolist()
    xr = np.asarray(np.real(xi), dtype=float).tolist()
    xim = np.asarray(np.imag(xi), dtype=float).tolist()
    out = np.empty(n_steps + 1, dtype=complex)
    ar = float(np.real(a0))
    ai = float(np.imag(a0))
    out[0] = complex(ar, ai)
    h = float(dt)
    delta = float(delta)
    eps = float(eps)
    alpha = float(alpha)
    gamma = float(gamma)
    sg = float(sg)
    for k in range(n_steps):
        n = ar * ar + ai * ai
        fr = -(delta + alpha * n - eps) * ai + sg * bi[k] - gamma * ar
        fi = (delta + alpha * n + eps) * ar - sg * br[k] - gamma * ai
        ar = ar + h * fr + xr[k]
        ai = ai + h * fi + xim[k]
        out[k + 1] = complex(ar, ai)
    return out
