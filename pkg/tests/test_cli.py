import json
import math
import subprocess
import sys

import numpy as np
import pytest

from parosc import duffing_alpha, resonance_frequency
from parosc.cli import main, parse_flux

TWO_PI = 2.0 * math.pi


@pytest.fixture
def device_file(tmp_path, sample_i):
    path = tmp_path / "sampleI.json"
    path.write_text(sample_i.to_json())
    return str(path)


def run_cli(*argv) -> int:
    return main(list(argv))


class TestParseFlux:
    def test_pi_multiples(self):
        assert parse_flux("0.25pi") == pytest.approx(0.25 * math.pi)
        assert parse_flux("-0.45pi") == pytest.approx(-0.45 * math.pi)
        assert parse_flux("pi") == pytest.approx(math.pi)

    def test_raw_radians(self):
        assert parse_flux("0.7853981633974483") == pytest.approx(math.pi / 4)

    def test_garbage_rejected(self):
        with pytest.raises(Exception):
            parse_flux("two pi")


class TestTuneCurve:
    def test_csv_output(self, tmp_path, device_file, sample_i):
        out = tmp_path / "curve.csv"
        code = run_cli("tune-curve", "--device", device_file, "--flux-min", "-0.45pi",
                       "--flux-max", "0.45pi", "--points", "181", "--output", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# {")
        meta = json.loads(lines[0][2:])
        assert meta["tool"].startswith("parosc")
        assert meta["device_sha256"]
        assert lines[1] == "flux_rad,omega_hz"
        assert len(lines) == 2 + 181
        # spot check the middle (zero flux) row against the model
        f, w = map(float, lines[2 + 90].split(","))
        assert f == pytest.approx(0.0, abs=1e-12)
        assert w == pytest.approx(float(resonance_frequency(sample_i, 0.0)) / TWO_PI, rel=1e-10)

    def test_byte_identical_reruns(self, tmp_path, device_file):
        out = tmp_path / "a.csv"
        args = ["tune-curve", "--device", device_file, "--flux-min", "-0.4pi",
                "--flux-max", "0.4pi", "--points", "41", "--output", str(out)]
        assert run_cli(*args) == 0
        first = out.read_bytes()
        assert run_cli(*args) == 0
        assert out.read_bytes() == first


class TestCoeffs:
    def test_json_payload(self, tmp_path, device_file, sample_i):
        out = tmp_path / "coeffs.json"
        code = run_cli("coeffs", "--device", device_file, "--flux", "-0.25pi",
                       "--output", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert set(doc) == {"meta", "alpha_hz_per_photon", "alpha_over_alpha0",
                            "beta", "epsilon_per_df1"}
        alpha = float(duffing_alpha(sample_i, -0.25 * math.pi))
        assert doc["alpha_hz_per_photon"] == pytest.approx(alpha / TWO_PI, rel=1e-10)
        assert doc["alpha_over_alpha0"] == pytest.approx(2.048208e-3, rel=1e-6)
        assert doc["beta"] > 0

    def test_beta_null_at_sweet_spot(self, tmp_path, device_file):
        out = tmp_path / "coeffs.json"
        assert run_cli("coeffs", "--device", device_file, "--flux", "0",
                       "--output", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["beta"] is None
        assert doc["epsilon_per_df1"] == 0.0


class TestRegion:
    def test_csv_matches_reference_boundaries(self, tmp_path):
        out = tmp_path / "region.csv"
        code = run_cli("region", "--beta", "0.22", "--delta-span", "5",
                       "--points", "201", "--output", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[1] == "delta_over_gamma,eps_lower_over_gamma,eps_upper_over_gamma,exists"
        assert len(lines) == 2 + 201
        rows = [ln.split(",") for ln in lines[2:]]
        mid = rows[100]  # delta = 0
        assert float(mid[0]) == pytest.approx(0.0, abs=1e-12)
        assert float(mid[1]) == pytest.approx(1.026519, rel=1e-6)
        assert float(mid[2]) == pytest.approx(4.428026, rel=1e-6)
        assert rows[-1][3] == "false" and rows[-1][1] == ""
        closed = [r for r in rows if r[3] == "true"]
        assert closed[-1][0].startswith("0.916")

    def test_device_derived_beta(self, tmp_path, device_file):
        out = tmp_path / "region.csv"
        assert run_cli("region", "--device", device_file, "--flux", "0.25pi",
                       "--points", "21", "--output", str(out)) == 0

    def test_requires_beta_or_device(self):
        assert run_cli("region", "--points", "11") == 2


class TestSimulate:
    def test_trajectory_csv(self, tmp_path, device_file, sample_i):
        gam = sample_i.gamma_total
        sim = tmp_path / "sim.json"
        sim.write_text(json.dumps({
            "dt_s": 0.01 / gam, "t_max_s": 3.0 / gam, "a0": [1.0, 0.0],
            "drive": 0.0, "noise_amplitude": 0.0, "seed": 1,
        }))
        out = tmp_path / "traj.csv"
        code = run_cli("simulate", "--device", device_file, "--sim", str(sim),
                       "--delta-hz", "0", "--eps-hz", "0", "--alpha-hz", "0",
                       "--output", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[1] == "t_s,re_a,im_a,n_photons"
        last = [float(v) for v in lines[-1].split(",")]
        assert last[3] == pytest.approx(math.exp(-2 * gam * last[0]), rel=1e-6)

    def test_eps_from_flux_and_df1(self, tmp_path, device_file, sample_i):
        gam = sample_i.gamma_total
        sim = tmp_path / "sim.json"
        sim.write_text(json.dumps({"dt_s": 0.01 / gam, "t_max_s": 1.0 / gam,
                                   "a0": [1e-6, 0.0]}))
        out = tmp_path / "traj.csv"
        code = run_cli("simulate", "--device", device_file, "--sim", str(sim),
                       "--delta-hz", "0", "--flux", "0.25pi", "--df1", "0.01pi",
                       "--output", str(out))
        assert code == 0

    def test_missing_eps_spec_is_validation_error(self, tmp_path, device_file, sample_i):
        sim = tmp_path / "sim.json"
        sim.write_text(json.dumps({"dt_s": 1e-9, "t_max_s": 1e-7}))
        assert run_cli("simulate", "--device", device_file, "--sim", str(sim),
                       "--delta-hz", "0") == 2


class TestCompensate:
    def test_report_and_waveform(self, tmp_path, device_file):
        report = tmp_path / "report.json"
        wave = tmp_path / "wave.csv"
        code = run_cli("compensate", "--device", device_file, "--flux-dc", "0.25pi",
                       "--df1", "0.01pi", "--pump-freq-hz", "10.3e9",
                       "--report-out", str(report), "--waveform-out", str(wave))
        assert code == 0
        doc = json.loads(report.read_text())
        assert set(doc) == {"meta", "dc_offset_hz", "h1_hz", "h2_hz", "h3_hz",
                            "h2_suppression_db", "dc_suppression_db"}
        assert doc["h2_suppression_db"] >= 20
        assert doc["dc_suppression_db"] >= 20
        lines = wave.read_text().splitlines()
        assert lines[1] == "t_s,flux_rad,omega_hz"
        assert len(lines) == 2 + 1024


class TestFit:
    def _write_tuning_csv(self, tmp_path, sample_i, noise=0.0):
        flux = np.linspace(-0.4 * math.pi, 0.4 * math.pi, 41)
        y = np.asarray(resonance_frequency(sample_i, flux)) / TWO_PI
        rows = ["flux_rad,value"] + [f"{f:.12g},{v:.12g}" for f, v in zip(flux, y)]
        path = tmp_path / "tuning.csv"
        path.write_text("\n".join(rows) + "\n")
        return path

    def test_tuning_fit_from_csv(self, tmp_path, device_file, sample_i):
        data = self._write_tuning_csv(tmp_path, sample_i)
        out = tmp_path / "fit.json"
        code = run_cli("fit", "--data", str(data), "--output", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["kind"] == "tuning"
        assert doc["converged"] is True
        assert doc["params"]["omega_bare_hz"] == pytest.approx(5.645e9, rel=1e-6)
        assert doc["params"]["gamma0"] == pytest.approx(0.0898, rel=1e-6)

    def test_reflection_fit_from_csv(self, tmp_path):
        g0, gr = 429e3, 354e3
        gam = g0 + gr
        x = np.linspace(-5 * gam, 5 * gam, 201)
        y = 1.0 - 4.0 * g0 * gr / (x**2 + gam**2)
        rows = ["detuning_hz,value"] + [f"{a:.12g},{b:.12g}" for a, b in zip(x, y)]
        path = tmp_path / "refl.csv"
        path.write_text("\n".join(rows) + "\n")
        out = tmp_path / "fit.json"
        assert run_cli("fit", "--data", str(path), "--output", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["kind"] == "reflection"
        assert doc["params"]["gamma_ext_hz"] == pytest.approx(g0, rel=1e-6)
        assert doc["params"]["gamma_int_hz"] == pytest.approx(gr, rel=1e-6)

    def test_duffing_fit_from_csv(self, tmp_path):
        alpha_hz, g0_hz, gam_hz = 813e3, 482e3, 781e3
        powers = np.linspace(1e5, 2e6, 11)
        # shift in Hz: the angular-rate relation gains a 1/(2 pi) in cyclic units
        y = -2.0 * alpha_hz * g0_hz * powers / gam_hz**2 / TWO_PI
        rows = ["power_pps,value"] + [f"{a:.12g},{b:.12g}" for a, b in zip(powers, y)]
        path = tmp_path / "duffing.csv"
        path.write_text("\n".join(rows) + "\n")
        out = tmp_path / "fit.json"
        code = run_cli("fit", "--data", str(path), "--gamma-ext-hz", str(g0_hz),
                       "--gamma-tot-hz", str(gam_hz), "--output", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["params"]["alpha_hz_per_photon"] == pytest.approx(alpha_hz, rel=1e-6)

    def test_sigma_column_parsed(self, tmp_path):
        g0, gr = 429e3, 354e3
        gam = g0 + gr
        x = np.linspace(-5 * gam, 5 * gam, 101)
        y = 1.0 - 4.0 * g0 * gr / (x**2 + gam**2)
        rows = ["detuning_hz,value,sigma"] + [
            f"{a:.12g},{b:.12g},0.001" for a, b in zip(x, y)
        ]
        path = tmp_path / "refl.csv"
        path.write_text("\n".join(rows) + "\n")
        out = tmp_path / "fit.json"
        assert run_cli("fit", "--data", str(path), "--output", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["params"]["gamma_ext_hz"] == pytest.approx(g0, rel=1e-6)

    def test_kind_mismatch_rejected(self, tmp_path, device_file, sample_i):
        data = self._write_tuning_csv(tmp_path, sample_i)
        assert run_cli("fit", "--data", str(data), "--kind", "reflection") == 2

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("foo,bar\n1,2\n")
        assert run_cli("fit", "--data", str(path)) == 2


class TestErrorHandling:
    def test_missing_device_file(self, tmp_path):
        assert run_cli("tune-curve", "--device", str(tmp_path / "nope.json"),
                       "--flux-min", "0", "--flux-max", "0.4pi") == 2

    def test_malformed_device_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run_cli("coeffs", "--device", str(bad), "--flux", "0") == 2

    def test_device_invariant_violation(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({
            "omega_bare_hz": 5e9, "gamma0": 1.5, "z0_ohm": 50.0,
            "i_c_amp": None, "gamma_ext_hz": 4e5, "gamma_int_hz": 3e5,
        }))
        assert run_cli("coeffs", "--device", str(bad), "--flux", "0") == 2

    def test_no_partial_output_on_error(self, tmp_path, device_file):
        out = tmp_path / "out.csv"
        # flux at the branch point: computation fails after validation
        code = run_cli("tune-curve", "--device", device_file, "--flux-min", "-0.5pi",
                       "--flux-max", "0.5pi", "--points", "11", "--output", str(out))
        assert code == 2
        assert not out.exists()

    def test_module_entry_point(self, device_file):
        proc = subprocess.run(
            [sys.executable, "-m", "parosc", "coeffs", "--device", device_file,
             "--flux", "0.25pi"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["beta"] > 0

    def test_version_flag(self, capsys):
        assert run_cli("--version") == 0
        assert "parosc" in capsys.readouterr().out
