"""Probe-driven steady-state response of the Duffing resonator (no pump).

With the parametric pump off, a probe of power ``b_power`` photons/s at
detuning ``delta_omega`` from resonance drives the intracavity photon number
n to roots of the cubic self-consistency relation

    n * [(delta_omega + alpha*n)^2 + Gamma^2] = 2*Gamma_ext*b_power.

At red detuning the cubic folds and three coexisting solutions appear, the
middle one unstable: the familiar Duffing bistability.  This module finds
and classifies the roots, evaluates the reflection coefficient on a branch,
and gives the linear-in-power displacement of the reflection minimum.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .device import DeviceParams, duffing_alpha

# Roots closer than this (relative to the largest root) are treated as a
# fold point and merged.
_FOLD_RTOL = 1e-6


@dataclass(frozen=True)
class ProbeDrive:
    """Probe tone: detuning ``delta_omega`` (rad/s), photon flux ``b_power`` (1/s)."""

    delta_omega: float
    b_power: float

    def __post_init__(self):
        if self.b_power < 0:
            raise ValueError("b_power must be >= 0")


@dataclass(frozen=True)
class SteadyStateBranch:
    """One steady-state solution.

    ``n`` is the intracavity photon number, ``zeta = delta_omega + alpha*n``
    the effective detuning at that root, ``stable`` the linearized stability,
    and ``fold`` marks a merged near-degenerate root pair at a fold point.
    """

    n: float
    stable: bool
    zeta: float
    fold: bool = False


def _cubic_roots_scaled(a2: float, a1: float, a0: float) -> list[float]:
    """Real roots of m^3 + a2 m^2 + a1 m + a0, by the trigonometric method."""
    # depressed form t^3 + p t + q with m = t - a2/3
    p = a1 - a2 * a2 / 3.0
    q = a0 - a2 * a1 / 3.0 + 2.0 * a2**3 / 27.0
    shift = -a2 / 3.0
    disc = -4.0 * p**3 - 27.0 * q * q
    if disc > 0.0:
        # three distinct real roots
        r = math.sqrt(-p / 3.0)
        phi = math.acos(max(-1.0, min(1.0, 3.0 * q / (2.0 * p * r))))
        return [shift + 2.0 * r * math.cos((phi - 2.0 * math.pi * k) / 3.0) for k in range(3)]
    # one real root (Cardano); handle p ~ 0 gracefully via cbrt
    half_q = q / 2.0
    s = math.sqrt(max(0.0, half_q * half_q + p**3 / 27.0))
    t = _cbrt(-half_q + s) + _cbrt(-half_q - s)
    return [shift + t]


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def photon_number_roots(
    p: DeviceParams, f, d: ProbeDrive, alpha: float | None = None
) -> list[SteadyStateBranch]:
    """All non-negative photon-number roots, sorted ascending.

    The cubic is solved in closed form in nondimensional variables, each
    root polished by one Newton step, near-degenerate pairs merged and
    flagged as folds, and stability classified from the eigenvalues of the
    2x2 Jacobian of the slow-amplitude flow at the fixed point.

    ``alpha`` defaults to `duffing_alpha` at the given flux; pass an explicit
    value to decouple from the flux model.

    Returns one branch (linear regime) or three (bistable regime); two when
    a fold pair has merged.
    """
    if alpha is None:
        alpha = float(duffing_alpha(p, f))
    gam = p.gamma_total
    g_ext = p.gamma_ext
    dw = d.delta_omega
    drive = 2.0 * g_ext * d.b_power

    if d.b_power == 0.0:
        return [_classify(0.0, dw, alpha, gam, g_ext, d.b_power)]
    if alpha == 0.0:
        n = drive / (dw * dw + gam * gam)
        return [_classify(n, dw, alpha, gam, g_ext, d.b_power)]

    # nondimensionalize: rates in units of Gamma, n in units of n_ref
    n_ref = drive / (gam * gam)  # linear on-resonance photon number
    a = alpha * n_ref / gam
    x = dw / gam
    # cubic in m = n/n_ref:  a^2 m^3 + 2 x a m^2 + (x^2 + 1) m - 1 = 0
    roots = _cubic_roots_scaled(2.0 * x / a, (x * x + 1.0) / (a * a), -1.0 / (a * a))

    polished = []
    for m in roots:
        # one Newton step on g(m) = m((x + a m)^2 + 1) - 1
        zt = x + a * m
        g = m * (zt * zt + 1.0) - 1.0
        dg = zt * zt + 1.0 + 2.0 * a * m * zt
        if dg != 0.0:
            m -= g / dg
        if m > -1e-12:
            polished.append(max(m, 0.0))
    polished.sort()

    # merge fold pairs
    scale = max(polished) if polished else 1.0
    merged: list[tuple[float, bool]] = []
    for m in polished:
        if merged and abs(m - merged[-1][0]) < _FOLD_RTOL * scale:
            merged[-1] = (0.5 * (m + merged[-1][0]), True)
        else:
            merged.append((m, False))

    return [
        _classify(m * n_ref, dw, alpha, gam, g_ext, d.b_power, fold)
        for m, fold in merged
    ]


def _classify(
    n: float,
    delta_omega: float,
    alpha: float,
    gamma_tot: float,
    gamma_ext: float,
    b_power: float,
    fold: bool = False,
) -> SteadyStateBranch:
    """Stability of a root from the Jacobian in quadrature coordinates."""
    zeta = delta_omega + alpha * n
    # fixed-point amplitude A = sqrt(2 G_ext) B / (zeta + i Gamma), B real
    a0 = math.sqrt(2.0 * gamma_ext) * math.sqrt(b_power) / (zeta + 1j * gamma_tot)
    u, v = a0.real, a0.imag
    jac = np.array(
        [
            [-2.0 * alpha * u * v - gamma_tot, -(zeta + 2.0 * alpha * v * v)],
            [zeta + 2.0 * alpha * u * u, 2.0 * alpha * u * v - gamma_tot],
        ]
    )
    stable = bool(np.max(np.linalg.eigvals(jac).real) < 0.0)
    return SteadyStateBranch(n=n, stable=stable, zeta=zeta, fold=fold)


def reflection_coefficient(
    p: DeviceParams, f, d: ProbeDrive, branch: SteadyStateBranch
) -> float:
    """Reflected power ratio |C|^2/|B|^2 = 1 - 4 G_ext G_int / (zeta^2 + Gamma^2).

    Unity for a lossless device, zero at critical coupling on the effective
    resonance zeta = 0.
    """
    gam = p.gamma_total
    return 1.0 - 4.0 * p.gamma_ext * p.gamma_int / (branch.zeta**2 + gam * gam)


def reflection_amplitude(
    p: DeviceParams, f, d: ProbeDrive, branch: SteadyStateBranch
) -> complex:
    """Complex reflection C/B = 1 - 2i*G_ext/(zeta + i*Gamma) (for phase traces)."""
    return 1.0 - 2.0j * p.gamma_ext / (branch.zeta + 1j * p.gamma_total)


def duffing_shift(p: DeviceParams, f, b_power: float, alpha: float | None = None) -> float:
    """Power-dependent displacement of the reflection minimum, rad/s.

    delta_omega_min = -2 * alpha * Gamma_ext * b_power / Gamma^2, exact for
    the root with zeta = 0 and the leading linear-in-power behaviour of the
    measured dip position.
    """
    if b_power < 0:
        raise ValueError("b_power must be >= 0")
    if alpha is None:
        alpha = float(duffing_alpha(p, f))
    gam = p.gamma_total
    return -2.0 * alpha * p.gamma_ext * b_power / (gam * gam)


def sweep_rows(
    p: DeviceParams,
    f,
    b_power: float,
    delta_min: float,
    delta_max: float,
    points: int,
    alpha: float | None = None,
) -> list[tuple[float, int, float, bool, float, float]]:
    """Reflection sweep over probe detuning, one row per (detuning, branch).

    Row layout matches the CSV columns written by `write_sweep_csv`:
    (delta_omega, branch_index, n_photons, stable, refl_power, refl_phase_rad)
    with delta_omega in rad/s.
    """
    rows = []
    for dw in np.linspace(delta_min, delta_max, points):
        drive = ProbeDrive(delta_omega=float(dw), b_power=b_power)
        for i, br in enumerate(photon_number_roots(p, f, drive, alpha=alpha)):
            refl = reflection_coefficient(p, f, drive, br)
            phase = cmath.phase(reflection_amplitude(p, f, drive, br))
            rows.append((float(dw), i, br.n, br.stable, refl, phase))
    return rows


def write_sweep_csv(fh, rows) -> None:
    """Write sweep rows as CSV with detuning converted to Hz."""
    fh.write("delta_omega_hz,branch_index,n_photons,stable,refl_power,refl_phase_rad\n")
    for dw, idx, n, stable, refl, phase in rows:
        fh.write(
            f"{dw / (2.0 * math.pi):.12g},{idx},{n:.12g},"
            f"{'true' if stable else 'false'},{refl:.12g},{phase:.12g}\n"
        )
