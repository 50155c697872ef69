"""Prox and epigraph projection: exact values, residuals, and the
firm-nonexpansiveness / betweenness / threshold properties."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slowrate import PlanePoint, ProxConfig, catalog_get, project_A, project_epigraph, prox, reflect_A

from conftest import catalog_all
from oracles import epigraph_projection_oracle, prox_oracle

# frozen from the closed form u = (-1.5 + sqrt(4.25))/2, p = u^2, and
# cross-checked against the dense-grid oracle below
PROX_POWER15_AT_HALF = 0.0788353903933773
# frozen root of 2 y^3 + y = 1 (projection of (1,0) onto the parabola epigraph)
EPI_PARABOLA_Y = 0.5897545123014584


class TestProxExactCases:
    def test_square_is_one_third(self):
        f = catalog_get("power_q", 2.0)
        for x in (1.0, -1.0, 10.0, -10.0, 0.01):
            assert prox(f, 1.0, x) == pytest.approx(x / 3.0, rel=1e-12)

    def test_abs_soft_threshold(self):
        f = catalog_get("abs")
        assert prox(f, 1.0, 2.5) == 1.5
        assert prox(f, 1.0, 0.7) == 0.0
        assert prox(f, 1.0, 1.0) == 0.0
        assert prox(f, 1.0, -2.5) == -1.5

    def test_indicator_always_zero(self):
        f = catalog_get("indicator_zero")
        for x in (-3.0, 0.0, 5.7):
            assert prox(f, 1.0, x) == 0.0

    def test_power15_matches_analytic_and_oracle(self):
        f = catalog_get("power_q", 1.5)
        u = (-1.5 + math.sqrt(4.25)) / 2.0
        assert PROX_POWER15_AT_HALF == pytest.approx(u * u, rel=1e-15)
        got = prox(f, 1.0, 0.5)
        assert got == pytest.approx(PROX_POWER15_AT_HALF, rel=1e-12)
        assert prox_oracle(f, 1.0, 0.5, span=(0.0, 0.5)) == pytest.approx(got, abs=1e-7)

    def test_rejects_bad_inputs(self):
        f = catalog_get("power_q", 2.0)
        with pytest.raises(ValueError):
            prox(f, 0.0, 1.0)
        with pytest.raises(ValueError):
            prox(f, 1.0, math.inf)

    def test_residual_contract(self, smooth_function):
        f = smooth_function
        cfg = ProxConfig()
        hi = 2.0 if math.isinf(f.domain[1]) else f.domain[1]
        for x in np.linspace(0.05, 2.0 * hi, 9):
            p = prox(f, 1.0, x, cfg)
            if p == 0.0 or p == f.domain[1]:
                continue
            resid = abs(p + f.derivative(p) - x)
            assert resid <= cfg.abs_tol * max(1.0, abs(x)) * 10.0

    def test_flat_boundary_minimizer(self):
        # for large x the minimizer saturates at the domain endpoint
        f = catalog_get("flat")
        s = f.domain[1]
        x_big = s + f.derivative(s) + 1.0
        assert prox(f, 1.0, x_big) == s

    def test_oracle_agreement_random_cells(self, smooth_function):
        f = smooth_function
        rng = np.random.default_rng(11)
        hi = 2.0 if math.isinf(f.domain[1]) else 0.99 * f.domain[1]
        for _ in range(4):
            x = rng.uniform(0.05, hi)
            t = rng.uniform(0.2, 2.0)
            assert prox(f, t, x) == pytest.approx(prox_oracle(f, t, x), abs=2e-7)


class TestProxConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ProxConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            ProxConfig(max_bisections=10)


class TestEpigraphProjection:
    def test_origin_column_projects_to_origin(self):
        f = catalog_get("power_q", 2.0)
        assert project_epigraph(f, PlanePoint(0.0, -5.0)) == (0.0, 0.0)

    def test_parabola_from_axis_point(self):
        f = catalog_get("power_q", 2.0)
        got = project_epigraph(f, PlanePoint(1.0, 0.0))
        assert got.x == pytest.approx(EPI_PARABOLA_Y, rel=1e-12)
        assert got.r == pytest.approx(EPI_PARABOLA_Y**2, rel=1e-12)
        # independent dense-grid oracle
        y_orc, fy_orc = epigraph_projection_oracle(f, 1.0, 0.0)
        assert got.x == pytest.approx(y_orc, abs=1e-7)
        assert got.r == pytest.approx(fy_orc, abs=1e-7)

    def test_point_already_inside(self):
        f = catalog_get("circle", 1.0)
        assert project_epigraph(f, PlanePoint(0.5, 2.0)) == (0.5, 2.0)

    def test_domain_error(self):
        f = catalog_get("circle", 1.0)
        with pytest.raises(ValueError, match="domain"):
            project_epigraph(f, PlanePoint(1.5, -1.0))

    def test_indicator_projects_everywhere(self):
        f = catalog_get("indicator_zero")
        assert project_epigraph(f, PlanePoint(5.0, -3.0)) == (0.0, 0.0)
        assert project_epigraph(f, PlanePoint(-2.0, 4.0)) == (0.0, 4.0)

    def test_abs_kink_threshold(self):
        # projecting (x, r) with r < 0 lands on the kink when |x| <= -r
        f = catalog_get("abs")
        assert project_epigraph(f, PlanePoint(0.5, -1.0)) == (0.0, 0.0)
        y, s = project_epigraph(f, PlanePoint(2.0, -1.0))
        assert y == pytest.approx(0.5)  # (x + r)/2 on the unit-slope face
        assert s == pytest.approx(0.5)

    def test_strict_betweenness(self, smooth_function):
        f = smooth_function
        rng = np.random.default_rng(3)
        hi = 1.5 if math.isinf(f.domain[1]) else f.domain[1]
        for _ in range(40):
            x = rng.uniform(0.01, hi)
            fx = f.value(x)
            r = fx - rng.uniform(0.1, 2.0) * max(fx, 0.1)
            y, _ = project_epigraph(f, PlanePoint(x, r))
            assert 0.0 < y < x

    def test_oracle_agreement(self, smooth_function):
        f = smooth_function
        rng = np.random.default_rng(5)
        hi = 1.5 if math.isinf(f.domain[1]) else f.domain[1]
        for _ in range(4):
            x = rng.uniform(0.05, hi)
            r = f.value(x) - rng.uniform(0.05, 1.5)
            got = project_epigraph(f, PlanePoint(x, r))
            y_orc, _ = epigraph_projection_oracle(f, x, r)
            assert got.x == pytest.approx(y_orc, abs=2e-7)

    def test_mirrored(self):
        f = catalog_get("power_q", 2.0)
        plus = project_epigraph(f, PlanePoint(1.0, -0.3))
        minus = project_epigraph(f, PlanePoint(-1.0, -0.3))
        assert minus.x == -plus.x
        assert minus.r == plus.r


class TestAxisOperators:
    def test_project_A(self):
        assert project_A(PlanePoint(3.0, 7.0)) == (3.0, 0.0)

    def test_reflect_A(self):
        assert reflect_A(PlanePoint(3.0, 7.0)) == (3.0, -7.0)
        fixed = reflect_A(PlanePoint(3.0, 0.0))
        assert fixed.x == 3.0 and fixed.r == 0.0


def _firm_nonexpansive_violation(p, q, px, qx):
    return (px - qx) ** 2 + ((p - px) - (q - qx)) ** 2 - (p - q) ** 2


class TestFirmNonexpansiveness:
    def test_prox_random_pairs(self):
        rng = np.random.default_rng(42)
        for f in catalog_all():
            hi = 2.5 if math.isinf(f.domain[1]) else f.domain[1]
            xs = rng.uniform(-hi, hi, size=(100, 2))
            for x, y in xs:
                viol = _firm_nonexpansive_violation(
                    x, y, prox(f, 1.0, x), prox(f, 1.0, y))
                assert viol <= 1e-9

    def test_epigraph_projection_with_anchor(self):
        # anchored at (0,0), which the projector fixes
        rng = np.random.default_rng(43)
        for f in catalog_all():
            hi = 2.0 if math.isinf(f.domain[1]) else f.domain[1]
            for _ in range(50):
                x = rng.uniform(-hi, hi)
                r = f.value(x) - rng.uniform(0.01, 3.0)
                if not math.isfinite(r):
                    continue
                y, fy = project_epigraph(f, PlanePoint(x, r))
                lhs = y * y + fy * fy + (x - y) ** 2 + (r - fy) ** 2
                assert lhs <= x * x + r * r + 1e-9


class TestThresholdEquivalence:
    def test_abs_threshold_grid(self):
        f = catalog_get("abs")
        for x in np.linspace(0.01, 2.0, 100):
            is_zero = prox(f, 1.0, x) == 0.0
            assert is_zero == (x <= 1.0)

    def test_scaled_threshold(self):
        f = catalog_get("abs")
        for t in (0.5, 2.0):
            for x in (t * 0.999, t, t * 1.001):
                is_zero = prox(f, t, x) == 0.0
                assert is_zero == (x <= t)


class TestProxMonotone:
    def test_monotone_on_grid(self, catalog_function):
        f = catalog_function
        hi = 3.0 if math.isinf(f.domain[1]) else 2.0 * f.domain[1]
        grid = np.linspace(-hi, hi, 81)
        vals = [prox(f, 1.0, x) for x in grid]
        assert all(b - a >= -1e-12 for a, b in zip(vals, vals[1:]))


@settings(max_examples=60, deadline=None)
@given(x=st.floats(-50.0, 50.0), y=st.floats(-50.0, 50.0),
       t=st.floats(0.1, 5.0))
def test_prox_firmly_nonexpansive_property(x, y, t):
    f = catalog_get("exp_abs")
    viol = _firm_nonexpansive_violation(x, y, prox(f, t, x), prox(f, t, y))
    assert viol <= 1e-9


@settings(max_examples=60, deadline=None)
@given(x=st.floats(0.001, 0.99), drop=st.floats(0.01, 5.0))
def test_epigraph_projection_idempotent_property(x, drop):
    f = catalog_get("circle", 1.0)
    pt = project_epigraph(f, PlanePoint(x, f.value(x) - drop))
    again = project_epigraph(f, pt)
    assert again.x == pytest.approx(pt.x, abs=1e-12)
    assert again.r == pytest.approx(pt.r, abs=1e-12)
