import math

import numpy as np
import pytest

from parosc import DeviceParams, SimConfig, integrate

TWO_PI = 2.0 * math.pi


@pytest.fixture
def sample_i():
    """Measured-sample-I-like device (rates from the F1 bias point)."""
    return DeviceParams(
        omega_bare=TWO_PI * 5.645e9,
        gamma0=0.0898,
        gamma_ext=TWO_PI * 429e3,
        gamma_int=TWO_PI * 354e3,
        i_c=2.18e-6,
    )


@pytest.fixture
def sample_ii():
    """Measured-sample-II-like device."""
    return DeviceParams(
        omega_bare=TWO_PI * 5.626e9,
        gamma0=0.0563,
        gamma_ext=TWO_PI * 400e3,
        gamma_int=TWO_PI * 300e3,
        i_c=3.48e-6,
    )


def log_amp_at(traj, t):
    """ln|A| at time t, log-linearly interpolated between samples."""
    la = np.log(np.abs(traj.amplitudes))
    return float(np.interp(t, traj.times, la))


def measure_growth_rate(dev, delta, eps, dt=None):
    """Exponential rate of |A| from an undriven linear run (alpha = 0).

    Independent of the analytic rate formula: integrates the equation of
    motion from a tiny seed and fits ln|A| between two interpolated time
    points.  In the oscillatory regime (|eps| < |delta|) the points are an
    integer number of beat periods apart so the periodic factor cancels; in
    the hyperbolic regime the first point waits out the subdominant mode.
    """
    gam = dev.gamma_total
    if dt is None:
        dt = 0.01 / gam
    s2 = eps * eps - delta * delta
    if s2 > 0:
        s = math.sqrt(s2)
        t1, t2 = 4.0 / s, 7.0 / s
    else:
        mu = math.sqrt(-s2) if s2 < 0 else 0.0
        if mu > 0:
            beat = math.pi / mu
            k = max(1, round(2.0 / (gam * beat)))
            t1, t2 = 0.0, k * beat
        else:
            t1, t2 = 0.0, 2.0 / gam
    cfg = SimConfig(dt=dt, t_max=t2 * 1.02 + dt, a0=1e-6 * complex(math.cos(0.7), math.sin(0.7)))
    traj = integrate(dev, delta, eps, 0.0, cfg)
    return (log_amp_at(traj, t2) - log_amp_at(traj, t1)) / (t2 - t1)
