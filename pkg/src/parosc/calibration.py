"""Parameter recovery from measurement-style data.

Three fits, each against the corresponding forward model:

* `fit_tuning_curve`     -- (omega_bare, gamma0) from frequency vs flux,
* `fit_reflection_trace` -- (omega_r, gamma_ext, gamma_int) from a
  reflected-power trace in the linear (low-power) regime,
* `fit_duffing_alpha`    -- the Duffing coefficient from the linear slope
  of the dip displacement vs probe power.

The nonlinear fits run a self-contained Levenberg-Marquardt with analytic
Jacobians (damping starts at 1e-3, x10 on a rejected step, /10 on an
accepted one) on internally nondimensionalized parameters; bounds are
enforced by projection.  The reflected-power model is symmetric under
exchange of the two damping rates, which magnitude-only data cannot break;
callers state the coupling regime through the ``overcoupled`` flag.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .device import reduce_flux

_LM_LAMBDA0 = 1e-3
_LM_LAMBDA_MAX = 1e13
_FTOL = 1e-14
_XTOL = 1e-13
_GTOL = 1e-12


@dataclass(frozen=True)
class DataSeries:
    """One measured series: x, y, and optional per-point standard errors."""

    x: np.ndarray
    y: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if self.sigma is not None:
            object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float))
        if self.x.ndim != 1 or self.x.shape != self.y.shape:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if self.sigma is not None:
            if self.sigma.shape != self.x.shape:
                raise ValueError("sigma must match x in length")
            if not np.all(self.sigma > 0):
                raise ValueError("sigma values must be > 0")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ValueError("data must be finite")


@dataclass(frozen=True)
class FitResult:
    """Outcome of one fit.

    ``params`` maps parameter names to recovered values; ``residual_norm``
    is the 2-norm of the weighted residual vector at the solution;
    ``covariance_diag`` holds per-parameter variance estimates when they
    could be computed.
    """

    params: dict
    residual_norm: float
    iterations: int
    converged: bool
    covariance_diag: dict | None = None
    message: str = ""


def _levenberg_marquardt(
    res_jac,
    p0: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    max_iter: int = 200,
    trace: list | None = None,
):
    """Minimize |r(p)|^2 with LM; returns (p, cost, iterations, converged).

    ``res_jac(p) -> (r, J)`` must return the weighted residual vector and
    its Jacobian.  ``trace``, when given, records the cost after every
    accepted step.
    """
    p = np.clip(np.asarray(p0, dtype=float), lower, upper)
    r, jac = res_jac(p)
    cost = float(r @ r)
    if trace is not None:
        trace.append(cost)
    lam = _LM_LAMBDA0
    converged = False
    n_iter = 0
    small_steps = 0
    for n_iter in range(1, max_iter + 1):
        g = jac.T @ r
        if np.max(np.abs(g)) < _GTOL * (1.0 + cost):
            converged = True
            break
        jtj = jac.T @ jac
        diag = np.diag(jtj).copy()
        diag[diag <= 0] = max(diag.max(), 1e-300)
        try:
            step = np.linalg.solve(jtj + lam * np.diag(diag), -g)
        except np.linalg.LinAlgError:
            lam *= 10.0
            if lam > _LM_LAMBDA_MAX:
                break
            continue
        p_new = np.clip(p + step, lower, upper)
        r_new, jac_new = res_jac(p_new)
        cost_new = float(r_new @ r_new)
        if cost_new < cost:
            rel_impr = (cost - cost_new) / max(cost, 1e-300)
            rel_step = np.max(np.abs(p_new - p) / (np.abs(p) + _XTOL))
            p, r, jac, cost = p_new, r_new, jac_new, cost_new
            if trace is not None:
                trace.append(cost)
            lam = max(lam / 10.0, 1e-12)
            if rel_impr < _FTOL or rel_step < _XTOL:
                small_steps += 1
                if small_steps >= 2:
                    converged = True
                    break
            else:
                small_steps = 0
        else:
            lam *= 10.0
            if lam > _LM_LAMBDA_MAX:
                # no descent direction at float precision: local minimum
                converged = bool(np.isfinite(cost))
                break
    return p, cost, n_iter, converged


def _covariance_diag(res_jac, p: np.ndarray, cost: float) -> np.ndarray | None:
    _, jac = res_jac(p)
    m, n = jac.shape
    if m <= n:
        return None
    try:
        cov = np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        return None
    return np.diag(cov) * (cost / (m - n))


def fit_tuning_curve(data: DataSeries, max_iter: int = 200) -> FitResult:
    """Recover (omega_bare, gamma0) from a frequency-vs-flux series.

    ``data.x`` is flux in rad (any branch; reduced internally), ``data.y``
    the resonance in rad/s.  Requires a flux span of at least 0.2*pi so the
    curvature constrains gamma0.

    Returns params ``omega_bare`` and ``gamma0``; gamma0 is bounded to
    [0, 0.5] by projection.
    """
    if len(data.x) < 3:
        raise ValueError("need at least 3 points to fit 2 parameters")
    flux = reduce_flux(data.x)
    if np.ptp(flux) < 0.2 * math.pi:
        raise ValueError(
            "flux span too narrow (< 0.2 pi): gamma0 is not identifiable"
        )
    c = np.abs(np.cos(flux))
    y_scale = float(np.median(data.y))
    if not y_scale > 0:
        raise ValueError("frequencies must be positive")
    sig = data.sigma if data.sigma is not None else np.full_like(data.y, y_scale)

    def res_jac(p):
        u, v = p
        denom = 1.0 + v / c
        model = u * y_scale / denom
        r = (model - data.y) / sig
        jac = np.empty((len(r), 2))
        jac[:, 0] = (y_scale / denom) / sig
        jac[:, 1] = (-u * y_scale / (denom * denom * c)) / sig
        return r, jac

    # initial guess: solve the two-point linear system u/y - v/c = 1 using
    # the extreme-|cos| points, falling back to a generic curve
    i_hi, i_lo = int(np.argmax(c)), int(np.argmin(c))
    mat = np.array(
        [
            [y_scale / data.y[i_hi], -1.0 / c[i_hi]],
            [y_scale / data.y[i_lo], -1.0 / c[i_lo]],
        ]
    )
    try:
        u0, v0 = np.linalg.solve(mat, np.ones(2))
    except np.linalg.LinAlgError:
        u0, v0 = 1.05 * float(np.max(data.y)) / y_scale, 0.05
    if not (np.isfinite(u0) and np.isfinite(v0)):
        u0, v0 = 1.05 * float(np.max(data.y)) / y_scale, 0.05

    lower = np.array([1e-12, 0.0])
    upper = np.array([np.inf, 0.5])
    p, cost, n_iter, ok = _levenberg_marquardt(
        res_jac, np.array([u0, min(max(v0, 0.0), 0.5)]), lower, upper, max_iter
    )
    cov = _covariance_diag(res_jac, p, cost)
    scale = np.array([y_scale, 1.0])
    return FitResult(
        params={"omega_bare": p[0] * y_scale, "gamma0": p[1]},
        residual_norm=math.sqrt(cost),
        iterations=n_iter,
        converged=ok,
        covariance_diag=None
        if cov is None
        else {"omega_bare": cov[0] * scale[0] ** 2, "gamma0": cov[1]},
        message="" if ok else "did not converge",
    )


def fit_reflection_trace(
    data: DataSeries,
    omega_guess: float | None = None,
    overcoupled: bool = True,
    max_iter: int = 200,
) -> FitResult:
    """Recover (omega_r, gamma_ext, gamma_int) from a reflected-power trace.

    ``data.x`` is the probe frequency in rad/s (any fixed origin),
    ``data.y`` the power reflection ratio.  The model is symmetric under
    gamma_ext <-> gamma_int; the returned pair is ordered according to
    ``overcoupled`` (True: gamma_ext >= gamma_int).  A flat unity trace has
    no damping information and comes back flagged degenerate.
    """
    if len(data.x) < 4:
        raise ValueError("need at least 4 points to fit 3 parameters")
    depth = 1.0 - float(np.min(data.y))
    w0 = float(data.x[np.argmin(data.y)]) if omega_guess is None else float(omega_guess)
    if depth < 1e-9:
        return FitResult(
            params={"omega_r": w0, "gamma_ext": 0.0, "gamma_int": 0.0},
            residual_norm=0.0,
            iterations=0,
            converged=False,
            message="degenerate: trace has no dip, damping rates unidentifiable",
        )

    # width guess from the half-depth crossings
    below = np.nonzero(data.y < 1.0 - 0.5 * depth)[0]
    if below.size >= 2 and data.x[below[-1]] > data.x[below[0]]:
        gam_guess = 0.5 * (data.x[below[-1]] - data.x[below[0]])
    else:
        gam_guess = np.ptp(data.x) / 6.0
    root = math.sqrt(max(0.0, 1.0 - depth))
    g0_guess = 0.5 * gam_guess * (1.0 + root)
    gr_guess = max(gam_guess - g0_guess, 1e-6 * gam_guess)

    sig = data.sigma if data.sigma is not None else np.ones_like(data.y)
    s = gam_guess  # rate scale

    def res_jac(p):
        w_off, g0, gr = p[0] * s, p[1] * s, p[2] * s
        u = data.x - (w0 + w_off)
        m_den = u * u + (g0 + gr) ** 2
        model = 1.0 - 4.0 * g0 * gr / m_den
        r = (model - data.y) / sig
        jac = np.empty((len(r), 3))
        common = 4.0 * g0 * gr / (m_den * m_den)
        jac[:, 0] = (-2.0 * u * common) * s / sig
        jac[:, 1] = (-4.0 * gr / m_den + 2.0 * (g0 + gr) * common) * s / sig
        jac[:, 2] = (-4.0 * g0 / m_den + 2.0 * (g0 + gr) * common) * s / sig
        return r, jac

    lower = np.array([-np.inf, 0.0, 0.0])
    upper = np.array([np.inf, np.inf, np.inf])
    p0 = np.array([0.0, g0_guess / s, gr_guess / s])
    p, cost, n_iter, ok = _levenberg_marquardt(res_jac, p0, lower, upper, max_iter)
    cov = _covariance_diag(res_jac, p, cost)

    omega_r = w0 + p[0] * s
    g_ext, g_int = p[1] * s, p[2] * s
    cov_e, cov_i = (cov[1] * s * s, cov[2] * s * s) if cov is not None else (None, None)
    swapped = (overcoupled and g_ext < g_int) or (not overcoupled and g_ext > g_int)
    if swapped:
        g_ext, g_int = g_int, g_ext
        cov_e, cov_i = cov_i, cov_e
    message = (
        "rate assignment fixed by the overcoupled flag (model is symmetric "
        "under exchange)"
    )
    span = float(np.ptp(data.x))
    if span < 6.0 * (g_ext + g_int):
        message += "; warning: trace spans < 6*Gamma, rates poorly constrained"
    if not ok:
        message += "; did not converge"
    return FitResult(
        params={"omega_r": omega_r, "gamma_ext": g_ext, "gamma_int": g_int},
        residual_norm=math.sqrt(cost),
        iterations=n_iter,
        converged=ok,
        covariance_diag=None
        if cov is None
        else {"omega_r": cov[0] * s * s, "gamma_ext": cov_e, "gamma_int": cov_i},
        message=message,
    )


def fit_duffing_alpha(data: DataSeries, gamma_ext: float, gamma_tot: float) -> FitResult:
    """Recover the Duffing coefficient from dip displacement vs probe power.

    ``data.x`` is probe power in photons/s, ``data.y`` the displacement of
    the reflection minimum in rad/s, valid in the linear regime
    (|shift| < Gamma).  The slope is the closed-form weighted least-squares
    slope through the origin, converted to alpha via
    slope = -2*alpha*gamma_ext/gamma_tot^2.  Curvature in the residuals
    (reduced chi^2 > 4 with a quadratic term improving the fit) flags data
    leaving the linear regime.
    """
    if not gamma_ext > 0 or not gamma_tot > 0:
        raise ValueError("damping rates must be > 0")
    if gamma_tot < gamma_ext:
        raise ValueError("gamma_tot must include gamma_ext")
    if len(data.x) < 2:
        raise ValueError("need at least 2 points")
    w = 1.0 / data.sigma**2 if data.sigma is not None else np.ones_like(data.y)
    sxx = float(np.sum(w * data.x * data.x))
    if sxx == 0.0:
        raise ValueError("powers are all zero; slope unidentifiable")
    slope = float(np.sum(w * data.x * data.y)) / sxx
    alpha = -slope * gamma_tot**2 / (2.0 * gamma_ext)
    resid = data.y - slope * data.x
    cost = float(np.sum(w * resid * resid))

    message = ""
    if len(data.x) > 2:
        # quadratic-term check for departure from the linear regime
        basis = np.stack([data.x, data.x * data.x], axis=1)
        wb = basis * w[:, None]
        coef, *_ = np.linalg.lstsq(wb.T @ basis, wb.T @ data.y, rcond=None)
        resid_q = data.y - basis @ coef
        cost_q = float(np.sum(w * resid_q * resid_q))
        if data.sigma is not None:
            red_chi2 = cost / (len(data.x) - 1)
        else:
            noise = cost_q / max(len(data.x) - 2, 1)
            red_chi2 = math.inf if noise == 0.0 and cost > 0 else (
                cost / (len(data.x) - 1) / noise if noise > 0 else 0.0
            )
        if red_chi2 > 4.0 and cost_q < cost:
            message = (
                "nonlinear-regime warning: residual curvature suggests shifts "
                "beyond the linear-in-power range"
            )

    var = None
    if len(data.x) > 1 and data.sigma is not None:
        var = {"alpha": (gamma_tot**2 / (2.0 * gamma_ext)) ** 2 / sxx}
    return FitResult(
        params={"alpha": alpha},
        residual_norm=math.sqrt(cost),
        iterations=0,
        converged=True,
        covariance_diag=var,
        message=message,
    )
