"""Parametric-oscillation region in the (detuning, pump strength) plane.

Above threshold the pump overcomes the total damping and the zero-field
solution becomes unstable.  Without the pump-induced frequency shift the
threshold is the symmetric curve eps = sqrt(Gamma^2 + delta^2).  The
quadratic pump shift -beta*eps^2/Gamma skews and closes the region; its
lower/upper boundaries are

    eps_{l,u}/Gamma = 1/(sqrt(2) beta)
                      * sqrt(1 - 2 beta x -+ sqrt(1 - 4 beta (beta + x))),

with x = delta/Gamma, existing while the inner discriminant is
non-negative, i.e. up to x = 1/(4 beta) - beta.

``beta`` here is the dimensionless coefficient of the quadratic shift; it
can be supplied directly (e.g. fitted from data) or computed from device
parameters with `device.beta_coefficient`.  All pump strengths in this
module are magnitudes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .device import DeviceParams


@dataclass(frozen=True)
class RegionBoundary:
    """Instability thresholds at one detuning (rad/s units, magnitudes)."""

    delta: float
    eps_lower: float
    eps_upper: float | None
    exists: bool


def threshold_symmetric(p: DeviceParams, delta: float) -> float:
    """Zero-shift threshold sqrt(Gamma^2 + delta^2), rad/s."""
    gam = p.gamma_total
    return math.hypot(gam, delta)


def boundary_units(beta: float, x):
    """Boundaries in Gamma units at x = delta/Gamma; vectorized.

    Returns (eps_lower, eps_upper, exists).  The lower branch is computed
    from the algebraically equivalent cancellation-free form

        eps_l^2 = 2 (1 + x^2) / (1 - 2 beta x + sqrt(D)),

    which stays accurate for small beta where the direct form loses
    precision to cancellation.
    """
    x = np.asarray(x, dtype=float)
    disc = 1.0 - 4.0 * beta * (beta + x)
    exists = disc >= 0.0
    sq = np.sqrt(np.where(exists, disc, 0.0))
    # whenever disc >= 0, 1 - 2*beta*x > sqrt(disc) > 0, so plus > 0 there
    plus = np.where(exists, 1.0 - 2.0 * beta * x + sq, np.nan)
    with np.errstate(invalid="ignore"):
        lower = np.sqrt(2.0 * (1.0 + x * x) / plus)
        upper = np.sqrt(plus / (2.0 * beta * beta))
    if x.ndim == 0:
        return float(lower), float(upper), bool(exists)
    return lower, upper, exists


def threshold_skewed(p: DeviceParams, beta: float, delta: float) -> RegionBoundary:
    """Lower/upper instability boundaries at one detuning.

    Non-existence past the region closure is reported in the ``exists``
    flag, not as an error.
    """
    if not beta > 0:
        raise ValueError("beta must be > 0 (use threshold_symmetric for beta = 0)")
    gam = p.gamma_total
    lower, upper, exists = boundary_units(beta, delta / gam)
    if not exists:
        return RegionBoundary(delta=delta, eps_lower=math.nan, eps_upper=None, exists=False)
    return RegionBoundary(
        delta=delta, eps_lower=lower * gam, eps_upper=upper * gam, exists=True
    )


def region_contains(p: DeviceParams, beta: float, delta: float, eps: float) -> bool:
    """Whether (delta, |eps|) lies inside the parametric-oscillation region.

    For beta = 0 the region is everything at or above the symmetric
    threshold; for beta > 0 it is the band between the skewed boundaries
    where they exist.
    """
    if eps < 0:
        raise ValueError("eps must be a magnitude (>= 0)")
    if beta == 0.0:
        return eps >= threshold_symmetric(p, delta)
    b = threshold_skewed(p, beta, delta)
    return bool(b.exists and b.eps_lower <= eps <= b.eps_upper)


def pump_induced_shift(p: DeviceParams, beta: float, eps: float) -> float:
    """Pump-induced resonance shift -beta*eps^2/Gamma, rad/s (red for beta > 0)."""
    return -beta * eps * eps / p.gamma_total


def closure_detuning(p: DeviceParams, beta: float, rtol: float = 1e-12) -> float:
    """Detuning where the skewed region closes (eps_l meets eps_u), rad/s.

    Located by bisection on the existence discriminant to relative
    tolerance ``rtol``.
    """
    if not beta > 0:
        raise ValueError("beta must be > 0")
    gam = p.gamma_total
    # analytic bracket around the discriminant root, then bisect
    x_c = 1.0 / (4.0 * beta) - beta
    lo, hi = x_c - max(abs(x_c), 1.0) * 1e-3, x_c + max(abs(x_c), 1.0) * 1e-3
    disc = lambda x: 1.0 - 4.0 * beta * (beta + x)
    if disc(lo) < 0 or disc(hi) > 0:  # fall back to a wide bracket
        lo, hi = -1.0 / beta, 1.0 / beta
    while hi - lo > rtol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if disc(mid) >= 0:
            lo = mid
        else:
            hi = mid
    # return the existing side so the snapped grid point stays inside
    return lo * gam


def boundary_grid(
    p: DeviceParams, beta: float, delta_min: float, delta_max: float, points: int
) -> list[RegionBoundary]:
    """Sample the skewed boundaries on a uniform detuning grid.

    When the closure point falls inside the requested range, the first grid
    point past it is snapped onto the closure so sampled region curves end
    exactly where the two branches meet.
    """
    if points < 2:
        raise ValueError("points must be >= 2")
    deltas = np.linspace(delta_min, delta_max, points)
    d_close = closure_detuning(p, beta)
    if deltas[0] < d_close < deltas[-1]:
        beyond = np.nonzero(deltas > d_close)[0]
        if beyond.size:
            deltas[beyond[0]] = d_close
    return [threshold_skewed(p, beta, float(d)) for d in deltas]


def write_region_csv(fh, p: DeviceParams, boundaries) -> None:
    """Write boundaries as CSV in Gamma units; empty fields past closure."""
    gam = p.gamma_total
    fh.write("delta_over_gamma,eps_lower_over_gamma,eps_upper_over_gamma,exists\n")
    for b in boundaries:
        if b.exists:
            fh.write(
                f"{b.delta / gam:.12g},{b.eps_lower / gam:.12g},"
                f"{b.eps_upper / gam:.12g},true\n"
            )
        else:
            fh.write(f"{b.delta / gam:.12g},,,false\n")
