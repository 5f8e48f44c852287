"""Command-line front end.

Subcommands: tune-curve, coeffs, region, simulate, compensate, fit.  Files
and flags use cyclic frequencies (Hz); the library works in angular units
internally.  Flux flags accept either raw radians ("0.785") or multiples of
pi ("0.25pi").  Every output starts with a JSON provenance header (comment
prefixed in CSV, under the "meta" key in JSON documents) and is written
atomically: a failed command leaves no partial file behind.

Exit codes: 0 success, 2 validation error (bad flags or input files),
1 numerical failure (divergence or non-convergence).
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import re
import sys
import tempfile

import numpy as np

from . import __version__, calibration, compensation, region
from .device import (
    DeviceParams,
    FluxDomainError,
    alpha_over_alpha0,
    beta_coefficient,
    duffing_alpha,
    pump_epsilon,
    resonance_frequency,
)
from .dynamics import IntegrationDivergedError, SimConfig, integrate, rect_pulse

TWO_PI = 2.0 * math.pi


class _ValidationError(Exception):
    """Maps to exit code 2."""


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def parse_flux(text: str) -> float:
    """Parse a flux value: raw radians, or a multiple of pi like '0.25pi'."""
    t = text.strip().lower()
    factor = 1.0
    if t.endswith("pi"):
        t = t[:-2].strip() or "1"
        factor = math.pi
    try:
        return float(t) * factor
    except ValueError:
        raise _ValidationError(f"cannot parse flux value {text!r}") from None


def _load_device(path: str) -> tuple[DeviceParams, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _ValidationError(f"cannot read device file: {exc}") from exc
    try:
        dev = DeviceParams.from_json(text)
    except ValueError as exc:
        raise _ValidationError(f"invalid device file {path}: {exc}") from exc
    digest = hashlib.sha256(
        json.dumps(dev.to_json_dict(), sort_keys=True).encode()
    ).hexdigest()[:16]
    return dev, digest


def _meta(argv: list[str], device_hash: str | None) -> dict:
    return {
        "tool": f"parosc {__version__}",
        "command": "parosc " + " ".join(argv),
        "device_sha256": device_hash,
    }


def _write_output(path: str | None, text: str) -> None:
    """Atomic write (temp file + rename); '-' or None writes to stdout."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".parosc-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(meta: dict, header: str, rows: list[str]) -> str:
    lines = ["# " + json.dumps(meta, sort_keys=True), header]
    lines.extend(rows)
    return "\n".join(lines) + "\n"


def _json_text(meta: dict, payload: dict) -> str:
    return json.dumps({"meta": meta, **payload}, indent=2) + "\n"


def _cmd_tune_curve(args, argv) -> None:
    dev, dev_hash = _load_device(args.device)
    f_min = parse_flux(args.flux_min)
    f_max = parse_flux(args.flux_max)
    if args.points < 2:
        raise _ValidationError("--points must be >= 2")
    flux = np.linspace(f_min, f_max, args.points)
    omega = resonance_frequency(dev, flux)
    rows = [f"{_fmt(f)},{_fmt(w / TWO_PI)}" for f, w in zip(flux, omega)]
    _write_output(
        args.output, _csv_text(_meta(argv, dev_hash), "flux_rad,omega_hz", rows)
    )


def _cmd_coeffs(args, argv) -> None:
    dev, dev_hash = _load_device(args.device)
    f = parse_flux(args.flux)
    alpha = float(duffing_alpha(dev, f))
    try:
        beta = float(beta_coefficient(dev, f))
    except (FluxDomainError, ValueError):
        beta = None  # diverges at zero flux
    payload = {
        "alpha_hz_per_photon": alpha / TWO_PI,
        "alpha_over_alpha0": float(alpha_over_alpha0(dev, f)),
        "beta": beta,
        "epsilon_per_df1": float(pump_epsilon(dev, f, 1.0)) / TWO_PI,
    }
    _write_output(args.output, _json_text(_meta(argv, dev_hash), payload))


def _cmd_region(args, argv) -> None:
    dev_hash = None
    if args.beta is not None:
        beta = args.beta
    elif args.device and args.flux:
        dev, dev_hash = _load_device(args.device)
        beta = float(beta_coefficient(dev, parse_flux(args.flux)))
    else:
        raise _ValidationError("give --beta, or --device together with --flux")
    if not beta > 0:
        raise _ValidationError("beta must be > 0")
    if args.points < 2:
        raise _ValidationError("--points must be >= 2")
    # the boundary geometry is scale free in Gamma units; any valid device works
    ref = DeviceParams(omega_bare=1.0, gamma0=0.1, gamma_ext=0.5, gamma_int=0.5)
    bounds = region.boundary_grid(
        ref, beta, -args.delta_span, args.delta_span, args.points
    )
    buf = io.StringIO()
    region.write_region_csv(buf, ref, bounds)
    lines = buf.getvalue().splitlines()
    _write_output(
        args.output, _csv_text(_meta(argv, dev_hash), lines[0], lines[1:])
    )


def _sim_config_from_json(path: str) -> SimConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise _ValidationError(f"cannot read sim config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _ValidationError(f"sim config does not parse: {exc}") from exc
    try:
        a0 = raw.get("a0")
        drive = raw.get("drive")
        if isinstance(drive, dict):
            pulse = drive["pulse"]
            amp = pulse["amp"]
            drive = rect_pulse(
                complex(amp[0], amp[1]), float(pulse["t_on"]), float(pulse["t_off"])
            )
        elif isinstance(drive, list):
            drive = complex(drive[0], drive[1])
        return SimConfig(
            dt=float(raw["dt_s"]),
            t_max=float(raw["t_max_s"]),
            a0=None if a0 is None else complex(a0[0], a0[1]),
            drive=drive,
            noise_amplitude=float(raw.get("noise_amplitude", 0.0)),
            seed=int(raw.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise _ValidationError(f"invalid sim config: {exc}") from exc


def _cmd_simulate(args, argv) -> None:
    dev, dev_hash = _load_device(args.device)
    cfg = _sim_config_from_json(args.sim)
    delta = args.delta_hz * TWO_PI
    if args.eps_hz is not None:
        eps = args.eps_hz * TWO_PI
    elif args.df1 is not None and args.flux is not None:
        eps = abs(float(pump_epsilon(dev, parse_flux(args.flux), parse_flux(args.df1))))
    else:
        raise _ValidationError("give --eps-hz, or --df1 together with --flux")
    if args.alpha_hz is not None:
        alpha = args.alpha_hz * TWO_PI
    elif args.flux is not None:
        alpha = float(duffing_alpha(dev, parse_flux(args.flux)))
    else:
        raise _ValidationError("give --alpha-hz or --flux (for the alpha model)")
    traj = integrate(dev, delta, eps, alpha, cfg)
    rows = [
        f"{_fmt(t)},{_fmt(a.real)},{_fmt(a.imag)},{_fmt(n)}"
        for t, a, n in zip(traj.times, traj.amplitudes, traj.photon_numbers)
    ]
    _write_output(
        args.output,
        _csv_text(_meta(argv, dev_hash), "t_s,re_a,im_a,n_photons", rows),
    )


def _cmd_compensate(args, argv) -> None:
    dev, dev_hash = _load_device(args.device)
    f_dc = parse_flux(args.flux_dc)
    df1 = parse_flux(args.df1)
    omega_p = args.pump_freq_hz * TWO_PI
    pump = compensation.build_compensated_pump(dev, f_dc, df1, omega_p)
    report = compensation.verify_cancelation(dev, pump, args.samples)

    def db(x: float):
        return None if math.isinf(x) else x

    payload = {
        "dc_offset_hz": report.dc_offset / TWO_PI,
        "h1_hz": report.h1 / TWO_PI,
        "h2_hz": report.h2 / TWO_PI,
        "h3_hz": report.h3 / TWO_PI,
        "h2_suppression_db": db(report.h2_suppression_db),
        "dc_suppression_db": db(report.dc_suppression_db),
    }
    _write_output(args.report_out, _json_text(_meta(argv, dev_hash), payload))

    if args.waveform_out is not None:
        period = TWO_PI / omega_p
        t = np.arange(args.samples) * (period / args.samples)
        flux = pump.flux(t)
        omega = resonance_frequency(dev, flux)
        rows = [
            f"{_fmt(ti)},{_fmt(fi)},{_fmt(wi / TWO_PI)}"
            for ti, fi, wi in zip(t, flux, omega)
        ]
        _write_output(
            args.waveform_out,
            _csv_text(_meta(argv, dev_hash), "t_s,flux_rad,omega_hz", rows),
        )


_FIT_KINDS = {"flux_rad": "tuning", "detuning_hz": "reflection", "power_pps": "duffing"}


def _read_fit_csv(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise _ValidationError(f"cannot read data file: {exc}") from exc
    if not lines:
        raise _ValidationError("data file is empty")
    header = [h.strip() for h in lines[0].split(",")]
    if len(header) < 2 or header[0] not in _FIT_KINDS or header[1] != "value":
        raise _ValidationError(
            "data header must be one of flux_rad|detuning_hz|power_pps, "
            "then value, then optional sigma"
        )
    has_sigma = len(header) > 2 and header[2] == "sigma"
    xs, ys, sg = [], [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        try:
            xs.append(float(parts[0]))
            ys.append(float(parts[1]))
            if has_sigma:
                sg.append(float(parts[2]))
        except (ValueError, IndexError) as exc:
            raise _ValidationError(f"bad data row {ln!r}: {exc}") from exc
    return header[0], np.array(xs), np.array(ys), (np.array(sg) if has_sigma else None)


def _cmd_fit(args, argv) -> None:
    x_name, x, y, sigma = _read_fit_csv(args.data)
    kind = args.kind or _FIT_KINDS[x_name]
    if kind != _FIT_KINDS[x_name]:
        raise _ValidationError(
            f"--kind {kind} does not match data column {x_name!r}"
        )
    try:
        if kind == "tuning":
            data = calibration.DataSeries(x=x, y=y * TWO_PI, sigma=None if sigma is None else sigma * TWO_PI)
            res = calibration.fit_tuning_curve(data)
            params = {
                "omega_bare_hz": res.params["omega_bare"] / TWO_PI,
                "gamma0": res.params["gamma0"],
            }
        elif kind == "reflection":
            data = calibration.DataSeries(x=x * TWO_PI, y=y, sigma=sigma)
            res = calibration.fit_reflection_trace(
                data,
                omega_guess=None if args.omega_guess_hz is None else args.omega_guess_hz * TWO_PI,
                overcoupled=not args.undercoupled,
            )
            params = {
                "omega_r_hz": res.params["omega_r"] / TWO_PI,
                "gamma_ext_hz": res.params["gamma_ext"] / TWO_PI,
                "gamma_int_hz": res.params["gamma_int"] / TWO_PI,
            }
        else:
            if args.gamma_ext_hz is None or args.gamma_tot_hz is None:
                raise _ValidationError(
                    "duffing fit needs --gamma-ext-hz and --gamma-tot-hz"
                )
            data = calibration.DataSeries(x=x, y=y * TWO_PI, sigma=None if sigma is None else sigma * TWO_PI)
            res = calibration.fit_duffing_alpha(
                data, args.gamma_ext_hz * TWO_PI, args.gamma_tot_hz * TWO_PI
            )
            params = {"alpha_hz_per_photon": res.params["alpha"] / TWO_PI}
    except ValueError as exc:
        raise _ValidationError(str(exc)) from exc
    payload = {
        "kind": kind,
        "params": params,
        "residual_norm": res.residual_norm,
        "iterations": res.iterations,
        "converged": res.converged,
        "message": res.message,
    }
    _write_output(args.output, _json_text(_meta(argv, None), payload))
    if not res.converged:
        raise RuntimeError(f"fit did not converge: {res.message}")


# Let argparse treat values like "-0.45pi" or "-2.5e6" as values, not flags.
_NEGATIVE_VALUE = re.compile(r"^-(\.\d+|\d+\.?\d*)([eE][-+]?\d+)?(pi)?$")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="parosc",
        description="Flux-pumped parametric oscillator toolkit",
    )
    ap._negative_number_matcher = _NEGATIVE_VALUE
    ap.add_argument("--version", action="version", version=f"parosc {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    tc = sub.add_parser("tune-curve", help="resonance frequency vs flux (CSV)")
    tc.add_argument("--device", required=True, help="DeviceParams JSON file")
    tc.add_argument("--flux-min", required=True, help="e.g. -0.45pi")
    tc.add_argument("--flux-max", required=True, help="e.g. 0.45pi")
    tc.add_argument("--points", type=int, default=181)
    tc.add_argument("--output", default=None, help="path or '-' for stdout")
    tc.set_defaults(func=_cmd_tune_curve)

    co = sub.add_parser("coeffs", help="nonlinearity coefficients at a bias (JSON)")
    co.add_argument("--device", required=True)
    co.add_argument("--flux", required=True, help="e.g. -0.25pi")
    co.add_argument("--output", default=None)
    co.set_defaults(func=_cmd_coeffs)

    rg = sub.add_parser("region", help="parametric-oscillation boundaries (CSV)")
    rg.add_argument("--beta", type=float, default=None, help="dimensionless shift coefficient")
    rg.add_argument("--device", default=None, help="derive beta from device + flux")
    rg.add_argument("--flux", default=None)
    rg.add_argument("--delta-span", type=float, default=5.0, help="half-range of delta/Gamma")
    rg.add_argument("--points", type=int, default=201)
    rg.add_argument("--output", default=None)
    rg.set_defaults(func=_cmd_region)

    sim = sub.add_parser("simulate", help="integrate the slow-amplitude equation (CSV)")
    sim.add_argument("--device", required=True)
    sim.add_argument("--sim", required=True, help="SimConfig JSON file")
    sim.add_argument("--delta-hz", type=float, required=True)
    sim.add_argument("--flux", default=None)
    sim.add_argument("--df1", default=None, help="ac flux amplitude, e.g. 0.01pi")
    sim.add_argument("--eps-hz", type=float, default=None, help="pump strength override")
    sim.add_argument("--alpha-hz", type=float, default=None, help="Duffing coefficient override")
    sim.add_argument("--output", default=None)
    sim.set_defaults(func=_cmd_simulate)

    cp = sub.add_parser("compensate", help="two-tone pump synthesis + spectral report")
    cp.add_argument("--device", required=True)
    cp.add_argument("--flux-dc", required=True)
    cp.add_argument("--df1", required=True)
    cp.add_argument("--pump-freq-hz", type=float, required=True)
    cp.add_argument("--samples", type=int, default=1024)
    cp.add_argument("--report-out", default=None, help="JSON spectral report path")
    cp.add_argument("--waveform-out", default=None, help="optional waveform CSV path")
    cp.set_defaults(func=_cmd_compensate)

    ft = sub.add_parser("fit", help="parameter fits from CSV data (JSON result)")
    ft.add_argument("--data", required=True, help="CSV with header naming the x column")
    ft.add_argument("--kind", choices=["tuning", "reflection", "duffing"], default=None)
    ft.add_argument("--omega-guess-hz", type=float, default=None)
    ft.add_argument("--undercoupled", action="store_true",
                    help="resolve the rate exchange as gamma_int >= gamma_ext")
    ft.add_argument("--gamma-ext-hz", type=float, default=None)
    ft.add_argument("--gamma-tot-hz", type=float, default=None)
    ft.add_argument("--output", default=None)
    ft.set_defaults(func=_cmd_fit)
    for sp in (tc, co, rg, sim, cp, ft):
        sp._negative_number_matcher = _NEGATIVE_VALUE
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, 0 on --help/--version
        return int(exc.code or 0)
    try:
        args.func(args, argv)
    except _ValidationError as exc:
        print(f"parosc: {exc}", file=sys.stderr)
        return 2
    except (FluxDomainError, ValueError) as exc:
        print(f"parosc: {exc}", file=sys.stderr)
        return 2
    except (IntegrationDivergedError, RuntimeError) as exc:
        print(f"parosc: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
