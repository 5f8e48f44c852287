import io
import math

import numpy as np
import pytest

from parosc import (
    boundary_grid,
    closure_detuning,
    growth_rate,
    pump_induced_shift,
    region_contains,
    threshold_skewed,
    threshold_symmetric,
)
from parosc.region import write_region_csv


class TestSymmetricThreshold:
    def test_on_resonance_equals_total_damping(self, sample_i):
        assert threshold_symmetric(sample_i, 0.0) == sample_i.gamma_total

    def test_at_delta_gamma(self, sample_i):
        gam = sample_i.gamma_total
        assert threshold_symmetric(sample_i, gam) == pytest.approx(math.sqrt(2) * gam, rel=1e-14)

    def test_even(self, sample_i):
        for d in (0.3e6, 2.7e6):
            assert threshold_symmetric(sample_i, d) == threshold_symmetric(sample_i, -d)


class TestSkewedThreshold:
    def test_values_at_zero_detuning(self, sample_i):
        # direct numeric evaluation of the boundary relation at beta = 0.22
        gam = sample_i.gamma_total
        b = threshold_skewed(sample_i, 0.22, 0.0)
        assert b.exists
        assert b.eps_lower / gam == pytest.approx(1.026519, rel=1e-6)
        assert b.eps_upper / gam == pytest.approx(4.428026, rel=1e-6)

    def test_region_closes(self, sample_i):
        gam = sample_i.gamma_total
        x_close = 1 / (4 * 0.22) - 0.22
        assert not threshold_skewed(sample_i, 0.22, (x_close + 1e-6) * gam).exists
        assert threshold_skewed(sample_i, 0.22, (x_close - 1e-6) * gam).exists
        assert closure_detuning(sample_i, 0.22) / gam == pytest.approx(x_close, rel=1e-9)
        assert x_close == pytest.approx(0.916364, rel=1e-6)

    def test_small_beta_approaches_symmetric(self, sample_i):
        # analytic expansion: eps_l = sqrt(G^2+d^2)*(1 + beta*d/G + O(beta^2)),
        # so the relative deviation at beta = 1e-4 is |beta*d/G|
        gam = sample_i.gamma_total
        for d in np.linspace(-10, 10, 81) * gam:
            lower = threshold_skewed(sample_i, 1e-4, float(d)).eps_lower
            sym = threshold_symmetric(sample_i, float(d))
            bound = max(1.5 * 1e-4 * abs(d) / gam, 1e-7)
            assert abs(lower - sym) / sym < bound
        for d in np.linspace(-5, 5, 41) * gam:
            lower = threshold_skewed(sample_i, 1e-4, float(d)).eps_lower
            assert lower == pytest.approx(threshold_symmetric(sample_i, float(d)), rel=1e-3)

    def test_small_beta_convergence_is_monotone(self, sample_i):
        gam = sample_i.gamma_total
        deltas = np.linspace(-5, 5, 201) * gam
        devs = []
        for beta in (1e-2, 1e-3, 1e-4):
            rel = [
                abs(threshold_skewed(sample_i, beta, float(d)).eps_lower - threshold_symmetric(sample_i, float(d)))
                / threshold_symmetric(sample_i, float(d))
                for d in deltas
            ]
            devs.append(max(rel))
        assert devs[0] > devs[1] > devs[2]
        assert devs[2] < 1e-3

    def test_self_consistency_with_shift(self, sample_i):
        """Boundaries satisfy eps^2 = Gamma^2 + (delta + beta eps^2/Gamma)^2."""
        gam = sample_i.gamma_total
        beta = 0.22
        for b in boundary_grid(sample_i, beta, -5 * gam, 5 * gam, 201):
            if not b.exists:
                continue
            for eps in (b.eps_lower, b.eps_upper):
                shifted = b.delta - pump_induced_shift(sample_i, beta, eps)
                # pump_induced_shift is the resonance moving down; the
                # detuning grows by the same amount
                shifted = b.delta + beta * eps**2 / gam
                res = abs(eps**2 - gam**2 - shifted**2) / eps**2
                assert res < 1e-9

    def test_band_narrows_with_beta(self, sample_i):
        gam = sample_i.gamma_total
        widths = []
        for beta in (0.05, 0.1, 0.2):
            b = threshold_skewed(sample_i, beta, 0.3 * gam)
            widths.append(b.eps_upper - b.eps_lower)
        assert widths[0] > widths[1] > widths[2]

    def test_beta_must_be_positive(self, sample_i):
        with pytest.raises(ValueError):
            threshold_skewed(sample_i, 0.0, 0.0)


class TestRegionContains:
    def test_symmetric_case(self, sample_i):
        gam = sample_i.gamma_total
        assert region_contains(sample_i, 0.0, 0.0, 1.01 * gam)
        assert not region_contains(sample_i, 0.0, 0.0, 0.99 * gam)

    def test_above_upper_boundary_is_outside(self, sample_i):
        gam = sample_i.gamma_total
        assert not region_contains(sample_i, 0.22, 0.0, 5.0 * gam)
        assert region_contains(sample_i, 0.22, 0.0, 2.0 * gam)

    def test_past_closure_is_outside(self, sample_i):
        gam = sample_i.gamma_total
        for eps in (0.5, 1.0, 3.0, 10.0):
            assert not region_contains(sample_i, 0.22, 2.0 * gam, eps * gam)

    def test_agrees_with_growth_rate_sign(self, sample_i):
        """beta = 0 membership equals instability of the zero solution."""
        gam = sample_i.gamma_total
        for x in np.linspace(-2, 2, 9):
            for e in np.linspace(0, 3, 10):
                inside = region_contains(sample_i, 0.0, x * gam, e * gam)
                lam = growth_rate(sample_i, x * gam, e * gam)
                assert inside == (lam >= 0)

    def test_rejects_negative_eps(self, sample_i):
        with pytest.raises(ValueError):
            region_contains(sample_i, 0.22, 0.0, -1.0)


class TestPumpInducedShift:
    def test_zero_pump(self, sample_i):
        assert pump_induced_shift(sample_i, 0.22, 0.0) == 0.0

    def test_quadratic_law(self, sample_i):
        s1 = pump_induced_shift(sample_i, 0.22, 1e6)
        s2 = pump_induced_shift(sample_i, 0.22, 2e6)
        assert s2 == pytest.approx(4 * s1, rel=1e-14)

    def test_reference_value(self, sample_i):
        gam = sample_i.gamma_total
        assert pump_induced_shift(sample_i, 0.22, gam) == pytest.approx(-0.22 * gam, rel=1e-14)


class TestBoundaryGrid:
    def test_snaps_to_closure(self, sample_i):
        gam = sample_i.gamma_total
        bounds = boundary_grid(sample_i, 0.22, -5 * gam, 5 * gam, 201)
        assert len(bounds) == 201
        d_close = closure_detuning(sample_i, 0.22)
        existing = [b for b in bounds if b.exists]
        assert existing[-1].delta == pytest.approx(d_close, rel=1e-9)
        # at the snapped closure point both branches meet
        assert existing[-1].eps_lower == pytest.approx(existing[-1].eps_upper, rel=1e-5)

    def test_csv_format(self, sample_i):
        gam = sample_i.gamma_total
        bounds = boundary_grid(sample_i, 0.22, -2 * gam, 2 * gam, 21)
        buf = io.StringIO()
        write_region_csv(buf, sample_i, bounds)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "delta_over_gamma,eps_lower_over_gamma,eps_upper_over_gamma,exists"
        assert len(lines) == 22
        assert lines[1].split(",")[3] == "true"
        last = lines[-1].split(",")
        assert last[1] == "" and last[2] == "" and last[3] == "false"
