"""Time-domain integration of the slow-amplitude equation.

The intracavity envelope A(t) (|A|^2 = photon number) obeys

    dA/dt = i*(delta*A + eps*conj(A) + alpha*|A|^2*A) - Gamma*A
            - i*sqrt(2*Gamma_ext)*B(t),

integrated with fixed-step RK4 (deterministic) or Euler-Maruyama when the
optional additive white-noise hook is enabled.  The pump-induced frequency
shift is *not* applied internally; callers who want it shift delta
explicitly (see `region.pump_induced_shift`).

Analytic companions: `growth_rate` gives the linear growth/decay rate of
the zero solution, and `steady_state_detect` extracts the saturated photon
number and phase from a trajectory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .device import DeviceParams

# dt * Gamma above this makes fixed-step RK4 inaccurate for this system.
_STEP_GUARD = 0.01

# Default magnitude of the tiny seed that stands in for the fluctuations
# an oscillation builds up from.
_SEED_MAGNITUDE = 1e-6


class IntegrationDivergedError(RuntimeError):
    """Trajectory left the finite range; carries the first bad sample."""

    def __init__(self, index: int, time: float):
        super().__init__(
            f"integration diverged: first non-finite amplitude at "
            f"sample {index} (t = {time:.6g} s)"
        )
        self.index = index
        self.time = time


@dataclass(frozen=True)
class SimConfig:
    """Integration setup.

    ``a0 = None`` seeds the run with a small amplitude (1e-6) at a random
    phase drawn from ``seed``, emulating buildup from fluctuations while
    staying reproducible.  ``drive`` may be a constant (complex) amplitude,
    a callable B(t) evaluated on time arrays, or None for an undriven
    cavity.  ``noise_amplitude > 0`` switches the integrator to
    Euler-Maruyama with independent Gaussian increments on both quadratures.
    """

    dt: float
    t_max: float
    a0: complex | None = None
    drive: object = None
    noise_amplitude: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.t_max < self.dt:
            raise ValueError("t_max must be >= dt")
        if self.noise_amplitude < 0:
            raise ValueError("noise_amplitude must be >= 0")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution: times (s), complex amplitudes, photon numbers |A|^2."""

    times: np.ndarray
    amplitudes: np.ndarray
    photon_numbers: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.photon_numbers is None:
            n = self.amplitudes.real**2 + self.amplitudes.imag**2
            object.__setattr__(self, "photon_numbers", n)
        if not (len(self.times) == len(self.amplitudes) == len(self.photon_numbers)):
            raise ValueError("trajectory arrays must have equal length")


def _drive_samples(drive, times: np.ndarray) -> np.ndarray:
    if drive is None:
        return np.zeros(len(times), dtype=complex)
    if callable(drive):
        vals = np.asarray(drive(times), dtype=complex)
        if vals.shape != times.shape:
            raise ValueError("drive callable must return one value per time")
        return vals
    return np.full(len(times), complex(drive), dtype=complex)


def rect_pulse(amplitude: complex, t_on: float, t_off: float):
    """Drive callable: ``amplitude`` for t_on <= t < t_off, zero outside."""

    def b_of_t(t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= t_on) & (t < t_off), complex(amplitude), 0j)

    return b_of_t


def integrate(
    p: DeviceParams, delta: float, eps: float, alpha: float, cfg: SimConfig
) -> Trajectory:
    """Integrate the slow-amplitude equation and return the full trajectory.

    Deterministic runs use fixed-step RK4; runs with
    ``cfg.noise_amplitude > 0`` use Euler-Maruyama with pre-generated,
    seeded Gaussian increments so results are reproducible and independent
    of the active backend.

    Raises
    ------
    ValueError
        When dt violates the accuracy guard dt * Gamma <= 0.01.
    IntegrationDivergedError
        When the state leaves the finite range; the exception reports the
        first bad sample index.
    """
    gam = p.gamma_total
    if cfg.dt * gam > _STEP_GUARD * (1.0 + 1e-12):
        raise ValueError(
            f"step too large: dt*Gamma = {cfg.dt * gam:.3g} exceeds the "
            f"accuracy guard {_STEP_GUARD}"
        )
    n_steps = max(1, int(round(cfg.t_max / cfg.dt)))
    times = np.arange(n_steps + 1) * cfg.dt
    sg = math.sqrt(2.0 * p.gamma_ext)

    rng = np.random.default_rng(cfg.seed)
    if cfg.a0 is None:
        phase = rng.uniform(0.0, 2.0 * math.pi)
        a0 = _SEED_MAGNITUDE * complex(math.cos(phase), math.sin(phase))
    else:
        a0 = complex(cfg.a0)

    if cfg.noise_amplitude > 0.0:
        b_start = _drive_samples(cfg.drive, times[:-1])
        incr = rng.standard_normal(2 * n_steps) * (
            cfg.noise_amplitude * math.sqrt(cfg.dt)
        )
        xi = incr[0::2] + 1j * incr[1::2]
        amps = backend.em_trajectory(
            a0, cfg.dt, n_steps, delta, eps, alpha, gam, sg, b_start, xi
        )
    else:
        half_times = np.arange(2 * n_steps + 1) * (0.5 * cfg.dt)
        b_half = _drive_samples(cfg.drive, half_times)
        amps = backend.rk4_trajectory(
            a0, cfg.dt, n_steps, delta, eps, alpha, gam, sg, b_half
        )

    finite = np.isfinite(amps.real) & np.isfinite(amps.imag)
    if not finite.all():
        bad = int(np.nonzero(~finite)[0][0])
        raise IntegrationDivergedError(bad, float(times[bad]))
    return Trajectory(times=times, amplitudes=amps)


def growth_rate(p: DeviceParams, delta: float, eps: float) -> float:
    """Linear growth rate of the zero solution, rad/s.

    lambda = -Gamma + sqrt(eps^2 - delta^2) when |eps| >= |delta|; below
    that the linearized motion is oscillatory and the envelope decays at
    -Gamma.  Zero exactly on the symmetric threshold.
    """
    gam = p.gamma_total
    s2 = eps * eps - delta * delta
    if s2 <= 0.0:
        return -gam
    return -gam + math.sqrt(s2)


def steady_state_detect(
    traj: Trajectory, window: float, tol: float
) -> tuple[float, float | None] | None:
    """Detect a settled steady state over the trailing ``window`` seconds.

    Returns ``(n_final, phase_final)`` when the photon number varies by
    less than ``tol`` (relative) across the window, or None when the
    trajectory has not settled.  ``phase_final`` is None for a state that
    decayed to zero, where the phase is undefined.
    """
    span = traj.times[-1] - traj.times[0]
    if not 0 < window < span:
        raise ValueError("window must be positive and shorter than the trajectory")
    mask = traj.times >= traj.times[-1] - window
    n_win = traj.photon_numbers[mask]
    n_mean = float(n_win.mean())
    spread = float(n_win.max() - n_win.min())
    n_floor = 1e-9 * max(float(traj.photon_numbers.max()), 1e-300)
    if spread > tol * max(n_mean, n_floor):
        return None
    if n_mean <= n_floor:
        return 0.0, None
    a_last = traj.amplitudes[-1]
    return n_mean, math.atan2(a_last.imag, a_last.real)
