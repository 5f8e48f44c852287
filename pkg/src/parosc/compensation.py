"""Two-tone pump synthesis canceling tuning-curve distortion.

A sinusoidal flux pump through a curved tuning curve frequency-modulates
the resonator with, to second order in the pump amplitude df1, a dc
rectification offset and a spurious tone at twice the pump frequency, both
proportional to (df1^2/4) * w''/w'.  Adding a small dc flux correction and
a counter-tone at 2*omega_p of equal magnitude

    f_rec = df2 = -(df1^2/4) * w''(F'_dc) / w'(F'_dc)

cancels both, leaving residuals of higher order in df1.  The derivative
ratio is evaluated at the corrected bias F'_dc = F_dc + f_rec, which this
module resolves self-consistently by fixed-point iteration.

Two forms of the derivative ratio are available: the exact one from the
analytic derivatives of the tuning curve (the default everywhere), and a
closed-form small-gamma0 expression kept for comparison; the latter differs
from the exact ratio by the sign of its cos(2F) term, and the two coincide
at F = pi/4.  `verify_cancelation` checks the result spectrally with a
plain DFT over one exact pump period.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .device import (
    DeviceParams,
    FluxDomainError,
    freq_d1,
    freq_d2,
    reduce_flux,
    resonance_frequency,
)

_FIXED_POINT_TOL = 1e-12
_FIXED_POINT_MAX_ITER = 50


class CompensationConvergenceError(RuntimeError):
    """Self-consistent bias-point iteration failed to converge."""


@dataclass(frozen=True)
class CompensatedPump:
    """Two-tone, dc-offset pump waveform.

    F(t) = f_dc + f_rec + df1*cos(omega_p t) + df2*cos(2 omega_p t), with
    f_rec = df2 by construction.
    """

    f_dc: float
    f_rec: float
    df1: float
    df2: float
    omega_p: float

    def flux(self, t):
        """Waveform F(t); accepts scalars or arrays of time."""
        t = np.asarray(t, dtype=float)
        out = (
            self.f_dc
            + self.f_rec
            + self.df1 * np.cos(self.omega_p * t)
            + self.df2 * np.cos(2.0 * self.omega_p * t)
        )
        return float(out) if out.ndim == 0 else out


def single_tone_pump(f_dc: float, df1: float, omega_p: float) -> CompensatedPump:
    """Plain sinusoidal pump (no correction terms), for comparisons."""
    return CompensatedPump(f_dc=f_dc, f_rec=0.0, df1=df1, df2=0.0, omega_p=omega_p)


def derivative_ratio(p: DeviceParams, f_dc_prime: float) -> float:
    """Exact w''/w' from the analytic tuning-curve derivatives, 1/rad.

    Raises
    ------
    FluxDomainError
        Where w' = 0 (zero flux bias), so the ratio diverges.
    """
    d1 = freq_d1(p, f_dc_prime)
    if d1 == 0.0:
        raise FluxDomainError("derivative ratio diverges where w'(F) = 0")
    return float(freq_d2(p, f_dc_prime) / d1)


def derivative_ratio_small_gamma(p: DeviceParams, f_dc_prime: float) -> float:
    """Closed-form small-gamma0 ratio, 1/rad.

    (3 + 2*gamma0*cos F + cos 2F) / (2 sin F (gamma0 + cos F)).  Note this
    differs from `derivative_ratio` by the sign of the cos(2F) term; both
    agree exactly at F = pi/4 where that term vanishes.
    """
    r = reduce_flux(f_dc_prime)
    s = math.sin(r)
    if abs(s) < 1e-12:
        raise FluxDomainError("derivative ratio diverges at zero flux bias")
    c = math.cos(r)
    return (3.0 + 2.0 * p.gamma0 * c + math.cos(2.0 * r)) / (2.0 * s * (p.gamma0 + c))


def second_tone_amplitude(p: DeviceParams, f_dc_prime: float, df1: float) -> float:
    """Counter-tone amplitude df2 = -(df1^2/4) * w''/w' at the given bias, rad."""
    if df1 == 0.0:
        return 0.0
    return -(df1 * df1 / 4.0) * derivative_ratio(p, f_dc_prime)


def rectification_offset(p: DeviceParams, f_dc_prime: float, df1: float) -> float:
    """Dc flux correction f_rec, rad; equals `second_tone_amplitude` exactly."""
    return second_tone_amplitude(p, f_dc_prime, df1)


def build_compensated_pump(
    p: DeviceParams, f_dc: float, df1: float, omega_p: float
) -> CompensatedPump:
    """Synthesize the compensated waveform at bias ``f_dc``.

    The corrected bias F'_dc = f_dc + f_rec(F'_dc) is resolved by
    fixed-point iteration from F'_dc = f_dc (tolerance 1e-12 rad, at most
    50 iterations; small df1 converges in a few).
    """
    if df1 < 0:
        raise ValueError("df1 must be >= 0")
    if df1 > 0.1:
        warnings.warn(
            f"df1 = {df1:.3g} rad: compensation is derived to second order "
            "and degrades for large pump amplitudes",
            stacklevel=2,
        )
    if not omega_p > 0:
        raise ValueError("omega_p must be > 0")
    if df1 == 0.0:
        return CompensatedPump(f_dc=f_dc, f_rec=0.0, df1=0.0, df2=0.0, omega_p=omega_p)

    fp = f_dc
    for _ in range(_FIXED_POINT_MAX_ITER):
        rec = -(df1 * df1 / 4.0) * derivative_ratio(p, fp)
        new = f_dc + rec
        if abs(new - fp) < _FIXED_POINT_TOL:
            fp = new
            break
        fp = new
    else:
        raise CompensationConvergenceError(
            f"corrected bias did not converge within {_FIXED_POINT_MAX_ITER} "
            "iterations"
        )
    df2 = -(df1 * df1 / 4.0) * derivative_ratio(p, fp)
    return CompensatedPump(f_dc=f_dc, f_rec=df2, df1=df1, df2=df2, omega_p=omega_p)


@dataclass(frozen=True)
class SpectralReport:
    """Harmonic content of w(F(t)) over one pump period (rad/s units).

    ``dc_offset`` is the signed mean of w(F(t)) minus w(f_dc); h1..h3 are
    one-sided harmonic magnitudes at omega_p, 2*omega_p, 3*omega_p.  The
    suppression figures compare against the single-tone pump at the same
    (f_dc, df1); they are +inf when the compensated residual is exactly
    zero.
    """

    dc_offset: float
    h1: float
    h2: float
    h3: float
    h2_suppression_db: float
    dc_suppression_db: float
    dc_offset_uncompensated: float
    h2_uncompensated: float


def _spectrum(p: DeviceParams, pump: CompensatedPump, n_samples: int):
    period = 2.0 * math.pi / pump.omega_p
    t = np.arange(n_samples) * (period / n_samples)
    omega = resonance_frequency(p, pump.flux(t))
    coef = np.fft.rfft(omega) / n_samples
    dc = float(coef[0].real)
    mags = 2.0 * np.abs(coef)
    return dc, float(mags[1]), float(mags[2]), float(mags[3])


def _ratio_db(reference: float, value: float) -> float:
    if value == 0.0:
        return math.inf
    return 20.0 * math.log10(abs(reference) / abs(value))


def verify_cancelation(
    p: DeviceParams, pump: CompensatedPump, n_samples: int = 1024
) -> SpectralReport:
    """Spectral check of a pump waveform against its single-tone version.

    Samples w(F(t)) over exactly one pump period at ``n_samples`` points
    (power of two, >= 256) and reports the dc offset relative to w(f_dc)
    plus the first three harmonic magnitudes, together with the dc and
    second-harmonic suppression relative to the uncompensated single-tone
    pump.
    """
    if n_samples < 256 or n_samples & (n_samples - 1):
        raise ValueError("n_samples must be a power of two >= 256")
    w_ref = float(resonance_frequency(p, pump.f_dc))
    dc_c, h1_c, h2_c, h3_c = _spectrum(p, pump, n_samples)
    uncomp = single_tone_pump(pump.f_dc, pump.df1, pump.omega_p)
    dc_u, _, h2_u, _ = _spectrum(p, uncomp, n_samples)
    off_c = dc_c - w_ref
    off_u = dc_u - w_ref
    return SpectralReport(
        dc_offset=off_c,
        h1=h1_c,
        h2=h2_c,
        h3=h3_c,
        h2_suppression_db=_ratio_db(h2_u, h2_c),
        dc_suppression_db=_ratio_db(off_u, off_c),
        dc_offset_uncompensated=off_u,
        h2_uncompensated=h2_u,
    )
