"""Closed-form device physics of a flux-tunable quarter-wave resonator.

A coplanar-waveguide resonator is shorted to ground through a dc-SQUID whose
Josephson inductance is tuned by the normalized flux bias F = pi*Phi_dc/Phi_0.
This module evaluates the SQUID inductance, the flux-tuned resonance
frequency with its first two flux derivatives, and the three coefficients
that govern the nonlinear dynamics:

* ``duffing_alpha``    -- Kerr (Duffing) shift per intracavity photon,
* ``pump_epsilon``     -- effective strength of a flux pump of amplitude df1,
* ``beta_coefficient`` -- dimensionless pump-induced (rectification) shift
  coefficient.

Unit conventions
----------------
All frequencies and rates are angular (rad/s) throughout the library; only
file formats and the CLI use cyclic units (Hz).  Flux arguments are given in
radians of normalized flux and are reduced into the principal branch
(-pi/2, pi/2] before evaluation; the physics is even and pi-periodic in F
through |cos F|.  Functions accept scalars or numpy arrays of flux.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

# Magnetic flux quantum [Wb] and von Klitzing resistance h/e^2 [ohm],
# pinned so results are bit-stable across environments.
PHI0 = 2.067833848e-15
R_K = 25812.807

TWO_PI = 2.0 * math.pi

# Flux values closer than this to the |cos F| = 0 branch point are rejected.
_COS_FLOOR = 1e-9


class FluxDomainError(ValueError):
    """Flux bias at or beyond a divergence of the device model."""


@dataclass(frozen=True)
class DeviceParams:
    """Static description of one resonator-SQUID device.

    Parameters
    ----------
    omega_bare : float
        Bare quarter-wave resonance (zero Josephson participation), rad/s.
    gamma0 : float
        Inductive participation ratio of the SQUID at zero flux,
        0 <= gamma0 < 1 (zero is the degenerate bare-resonator limit).
    gamma_ext : float
        External (coupling) damping rate, rad/s.
    gamma_int : float
        Internal (loss) damping rate, rad/s.
    z0 : float, optional
        Characteristic impedance in ohm, default 50.
    i_c : float or None, optional
        SQUID critical current in ampere; only used by `squid_inductance`.
    """

    omega_bare: float
    gamma0: float
    gamma_ext: float
    gamma_int: float
    z0: float = 50.0
    i_c: float | None = None

    def __post_init__(self):
        if not self.omega_bare > 0:
            raise ValueError("omega_bare must be > 0")
        if not 0 <= self.gamma0 < 1:
            raise ValueError("gamma0 must be in [0, 1)")
        if self.gamma_ext < 0 or self.gamma_int < 0:
            raise ValueError("damping rates must be >= 0")
        if not self.gamma_ext + self.gamma_int > 0:
            raise ValueError("total damping must be > 0")
        if not self.z0 > 0:
            raise ValueError("z0 must be > 0")
        if self.i_c is not None and not self.i_c > 0:
            raise ValueError("i_c must be > 0 when given")

    @property
    def gamma_total(self) -> float:
        """Total damping rate gamma_ext + gamma_int, rad/s."""
        return self.gamma_ext + self.gamma_int

    @property
    def alpha_zero(self) -> float:
        """Duffing scale pi^2 * omega_bare * z0 / R_K, rad/s per photon."""
        return math.pi**2 * self.omega_bare * self.z0 / R_K

    def to_json_dict(self) -> dict:
        """Serializable dict; frequencies in cyclic units (Hz)."""
        return {
            "omega_bare_hz": self.omega_bare / TWO_PI,
            "gamma0": self.gamma0,
            "z0_ohm": self.z0,
            "i_c_amp": self.i_c,
            "gamma_ext_hz": self.gamma_ext / TWO_PI,
            "gamma_int_hz": self.gamma_int / TWO_PI,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DeviceParams":
        required = {"omega_bare_hz", "gamma0", "z0_ohm", "i_c_amp",
                    "gamma_ext_hz", "gamma_int_hz"}
        missing = required - d.keys()
        if missing:
            raise ValueError(f"device JSON missing keys: {sorted(missing)}")
        unknown = d.keys() - required
        if unknown:
            raise ValueError(f"device JSON has unknown keys: {sorted(unknown)}")
        i_c = d["i_c_amp"]
        return cls(
            omega_bare=float(d["omega_bare_hz"]) * TWO_PI,
            gamma0=float(d["gamma0"]),
            gamma_ext=float(d["gamma_ext_hz"]) * TWO_PI,
            gamma_int=float(d["gamma_int_hz"]) * TWO_PI,
            z0=float(d["z0_ohm"]),
            i_c=None if i_c is None else float(i_c),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DeviceParams":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"device JSON does not parse: {exc}") from exc
        if not isinstance(d, dict):
            raise ValueError("device JSON must be an object")
        return cls.from_json_dict(d)


@dataclass(frozen=True)
class PumpDrive:
    """Parametric pump specification.

    ``delta`` is the pump-resonator detuning omega_p/2 - omega_r (rad/s),
    ``df1`` the ac flux amplitude in rad.  When ``epsilon_override`` is set
    the effective pump strength is taken as given instead of being computed
    from df1 through `pump_epsilon`.
    """

    delta: float
    df1: float = 0.0
    epsilon_override: float | None = None

    def __post_init__(self):
        if self.df1 < 0:
            raise ValueError("df1 must be >= 0")
        if self.df1 > 0.3:
            warnings.warn(
                f"df1 = {self.df1:.3g} rad is large; the small-amplitude "
                "expansion behind the pump model degrades above ~0.3 rad",
                stacklevel=2,
            )


def reduce_flux(f):
    """Reduce flux into the principal branch (-pi/2, pi/2].

    |cos F| is pi-periodic, so every bias point maps into this interval
    without changing the device physics.  Works on scalars and arrays.
    """
    f = np.asarray(f, dtype=float)
    r = f - np.round(f / math.pi) * math.pi
    r = np.where(r <= -math.pi / 2, r + math.pi, r)
    return float(r) if r.ndim == 0 else r


def _checked_cos(f):
    """cos of the reduced flux, raising at the +-pi/2 branch points."""
    c = np.cos(reduce_flux(f))
    if np.any(c < _COS_FLOOR):
        raise FluxDomainError(
            "flux bias within 1e-9 rad of +-pi/2, where the device model diverges"
        )
    return c


def squid_inductance(i_c: float, f):
    """SQUID Josephson inductance Phi_0 / (2 pi I_c |cos F|) in henry.

    Raises
    ------
    ValueError
        If ``i_c`` is not positive.
    FluxDomainError
        If the flux bias sits at the diverging |cos F| = 0 point.
    """
    if not i_c > 0:
        raise ValueError("i_c must be > 0")
    return PHI0 / (TWO_PI * i_c * _checked_cos(f))


def resonance_frequency(p: DeviceParams, f):
    """Flux-tuned resonance omega_bare / (1 + gamma0/|cos F|), rad/s.

    Even and pi-periodic in the flux bias, maximal at F = 0 and strictly
    decreasing towards the +-pi/2 branch points.
    """
    return p.omega_bare / (1.0 + p.gamma0 / _checked_cos(f))


def freq_d1(p: DeviceParams, f):
    """Analytic first flux derivative of `resonance_frequency`, rad/s per rad.

    Odd in F: zero at the zero-flux sweet spot, negative for 0 < F < pi/2.
    """
    c = _checked_cos(f)
    s = np.sin(reduce_flux(f))
    return -p.omega_bare * p.gamma0 * s / (c + p.gamma0) ** 2


def freq_d2(p: DeviceParams, f):
    """Analytic second flux derivative of `resonance_frequency`, rad/s per rad^2."""
    c = _checked_cos(f)
    s = np.sin(reduce_flux(f))
    return -p.omega_bare * p.gamma0 * (c * (c + p.gamma0) + 2.0 * s * s) / (c + p.gamma0) ** 3


def duffing_alpha(p: DeviceParams, f):
    """Duffing (Kerr) coefficient alpha, rad/s per photon.

    alpha = alpha_zero * (gamma0/cos F)^3 with
    alpha_zero = pi^2 * omega_bare * z0 / R_K.  Even in F, minimal at F = 0
    where it equals alpha_zero * gamma0^3, and diverging towards +-pi/2.
    """
    return p.alpha_zero * alpha_over_alpha0(p, f)


def alpha_over_alpha0(p: DeviceParams, f):
    """Normalized Duffing coefficient (gamma0/cos F)^3, dimensionless."""
    return (p.gamma0 / _checked_cos(f)) ** 3


def pump_epsilon(p: DeviceParams, f, df1):
    """Effective pump strength for ac flux amplitude ``df1`` (rad), rad/s.

    epsilon = (df1 * omega_bare * gamma0 / 2) * sin F / cos^2 F.  The value
    is signed (odd in F, zero at the sweet spot); threshold comparisons use
    its magnitude.
    """
    c = _checked_cos(f)
    s = np.sin(reduce_flux(f))
    return 0.5 * np.asarray(df1, dtype=float) * p.omega_bare * p.gamma0 * s / c**2


def effective_pump_strength(p: DeviceParams, f, drive: PumpDrive) -> float:
    """Pump strength of a `PumpDrive`: override if set, else from df1."""
    if drive.epsilon_override is not None:
        return drive.epsilon_override
    return float(pump_epsilon(p, f, drive.df1))


def beta_coefficient(p: DeviceParams, f):
    """Dimensionless pump-induced frequency-shift coefficient.

    beta = (Gamma / (omega_bare * gamma0)) * cos^3 F / sin^2 F with
    Gamma the total damping rate.  Even in F, decreasing in |F|, vanishing
    towards +-pi/2 and diverging at zero flux where the tuning curve is flat
    to first order.

    Raises
    ------
    FluxDomainError
        At F = 0 (and within 1e-9 rad of it), where beta diverges.
    """
    if p.gamma0 == 0:
        raise ValueError("beta coefficient requires gamma0 > 0")
    c = _checked_cos(f)
    s = np.sin(reduce_flux(f))
    if np.any(np.abs(s) < _COS_FLOOR):
        raise FluxDomainError(
            "beta coefficient diverges at zero flux bias (flat tuning curve)"
        )
    beta0 = p.gamma_total / p.omega_bare
    return (beta0 / p.gamma0) * c**3 / s**2


def quality_factors(p: DeviceParams, f) -> tuple[float, float]:
    """(Q_ext, Q_int) = omega_r/gamma_ext, omega_r/gamma_int at flux ``f``."""
    wr = resonance_frequency(p, f)
    q_ext = wr / p.gamma_ext if p.gamma_ext > 0 else math.inf
    q_int = wr / p.gamma_int if p.gamma_int > 0 else math.inf
    return q_ext, q_int
