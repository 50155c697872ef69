"""Sequence toolkit: Stolz chain, H-transform, sandwich/envelope bounds,
classifier ground truth, predictions, and the product/majorant/ratio checks."""

import math

import numpy as np
import pytest

from slowrate import (
    catalog_get,
    classify_rate,
    envelope_check,
    estimate_r_infinity,
    guler_product,
    linear_rate_bound_check,
    make_recursion_model,
    ppa_superlinear_majorant,
    predict,
    run_dra,
    run_map,
    run_ppa,
    sandwich_check,
    stolz_bounds,
)


def iterate_update(beta0, delta, q, n):
    """beta_{k+1} = beta_k - delta(k) beta_k^q for a callable or constant delta."""
    d = delta if callable(delta) else (lambda k: delta)
    out = [beta0]
    for k in range(n):
        b = out[-1]
        out.append(b - d(k) * b**q)
    return np.array(out)


def iterate_implicit(x0, delta, q, n):
    """x_k = x_{k+1} + delta(k) x_{k+1}^q solved per step by Newton."""
    d = delta if callable(delta) else (lambda k: delta)
    out = [x0]
    for k in range(n):
        x = out[-1]
        dk = d(k)
        y = x
        for _ in range(60):
            res = y + dk * y**q - x
            y_new = y - res / (1.0 + dk * q * y ** (q - 1.0))
            if abs(y_new - y) <= 1e-17 * y:
                y = y_new
                break
            y = y_new
        out.append(y)
    return np.array(out)


class TestStolz:
    def test_cesaro_mean(self):
        n = np.arange(1, 10001, dtype=float)
        b = stolz_bounds(n * (n + 1) / 2.0, n**2)
        for v in b:
            assert v == pytest.approx(0.5, abs=1e-3)

    def test_alternating(self):
        n = np.arange(4096, dtype=float)
        b = stolz_bounds((-1.0) ** np.arange(4096), n + 1.0)
        assert b.diff_liminf == pytest.approx(-2.0)
        assert b.diff_limsup == pytest.approx(2.0)
        assert abs(b.ratio_liminf) < 0.05
        assert abs(b.ratio_limsup) < 0.05

    def test_h_transform_of_map_trace(self):
        # H(x_n)/n for the p=2 trace estimates the product limit 1/2
        t = run_map(catalog_get("power_p_scaled", 2.0), 1.0, 20000)
        model = make_recursion_model(3.0)
        b = stolz_bounds(model.H(t.xs), np.arange(len(t.xs), dtype=float))
        assert b.ratio_liminf == pytest.approx(0.5, rel=0.01)
        assert b.ratio_limsup == pytest.approx(0.5, rel=0.01)

    def test_rejects_short_input(self):
        with pytest.raises(ValueError):
            stolz_bounds(np.arange(8.0), np.arange(8.0) + 1)

    def test_rejects_non_monotone_denominator(self):
        a = np.arange(64.0)
        b = np.ones(64)
        b[10] = 0.5
        with pytest.raises(ValueError):
            stolz_bounds(a, b)


class TestRecursionModel:
    def test_example_values(self):
        m2 = make_recursion_model(2.0)
        assert m2.H(2.0) == pytest.approx(0.5)
        assert m2.H_inv(0.5) == pytest.approx(2.0)
        m1 = make_recursion_model(1.0)
        assert m1.H(1.0) == pytest.approx(0.0)
        assert m1.H_inv(0.0) == pytest.approx(1.0)
        m3 = make_recursion_model(3.0)
        assert m3.H(0.1) == pytest.approx(50.0)

    @pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 3.0, 5.0])
    def test_round_trip(self, q):
        m = make_recursion_model(q)
        # for q = 1 the inverse exp(-t) underflows past t ~ 709, so the
        # round-trip grid stays inside the representable range
        hi = 7e2 if q == 1.0 else 1e6
        for t in np.geomspace(1e-6, hi, 25):
            assert m.H(m.H_inv(t)) == pytest.approx(t, rel=1e-12)

    @pytest.mark.parametrize("q", [1.0, 2.0, 3.0])
    def test_h_increases_as_argument_decreases(self, q):
        m = make_recursion_model(q)
        xs = np.geomspace(1e-6, 10.0, 40)
        h = m.H(xs)
        assert np.all(np.diff(h) < 0.0)

    def test_rejects_small_exponent(self):
        with pytest.raises(ValueError):
            make_recursion_model(0.5)


class TestSandwich:
    def test_constant_delta_update_form(self):
        beta = iterate_update(0.5, 0.1, 2.0, 100_000)
        rep = sandwich_check(beta, make_recursion_model(2.0), form="update")
        assert rep.holds(1e-9)
        assert rep.h_over_n_last == pytest.approx(0.1, rel=0.01)

    def test_constant_delta_implicit_form(self):
        xs = iterate_implicit(0.5, 0.3, 2.0, 50_000)
        rep = sandwich_check(xs, make_recursion_model(2.0), form="implicit")
        assert rep.holds(1e-9)
        assert rep.h_over_n_last == pytest.approx(0.3, rel=0.01)

    def test_map_circle_trace_tail(self):
        # H(x_n)/n tends to the product limit 1/(2 R^2) = 0.5 for R = 1
        # (series oracle: f f'/x^3 = x^{-2} (R - sqrt(R^2-x^2)) / sqrt(R^2-x^2)
        #  -> 1/(2 R^2); the explicit orbit gives H(x_n)/n = (n + 1)/(2 n))
        t = run_map(catalog_get("circle", 1.0), 1.0, 50_000)
        rep = sandwich_check(t.xs, make_recursion_model(3.0), form="implicit")
        assert rep.holds(1e-9)
        assert rep.h_over_n_last == pytest.approx(0.5, rel=0.01)

    def test_rejects_non_decreasing(self):
        with pytest.raises(ValueError):
            sandwich_check(np.ones(10), make_recursion_model(2.0))


class TestEnvelope:
    def test_upper_power_form(self):
        beta = iterate_update(0.5, 1.0, 2.0, 3000)
        rep = envelope_check(beta, rho=1.0, q=2.0, side="upper", eps=0.1)
        assert rep.holds and rep.first_index is not None
        assert rep.first_index <= 100
        assert rep.constant == pytest.approx(1.0 / 0.9)
        assert rep.exponent == 1.0
        # direct iteration oracle: envelope value must dominate pointwise
        n = np.arange(rep.first_index, len(beta))
        assert np.all(beta[n[n > 0]] <= 1.0 / (0.9 * n[n > 0]))

    def test_lower_power_form(self):
        beta = iterate_update(0.5, 1.0, 2.0, 3000)
        rep = envelope_check(beta, rho=1.0, q=2.0, side="lower", eps=0.1)
        assert rep.holds
        assert rep.constant == pytest.approx(1.0 / 1.1)

    def test_geometric_form(self):
        beta = 0.5 ** np.arange(1, 300, dtype=float)
        rep = envelope_check(beta, rho=0.5, q=1.0, side="upper", eps=0.05)
        assert rep.holds and rep.first_index == 0
        assert rep.gamma == pytest.approx(math.exp(-0.45))

    def test_dra_lower_envelope(self):
        # logarithmic DRA orbit admits a c/n lower envelope
        t = run_dra(catalog_get("power_p_scaled", 3.0), 1.0, 20_000)
        xs = t.xs
        rho_tail = (xs[:-1] - xs[1:]) / xs[:-1] ** 2 * (xs[:-1] / xs[1:]) ** 2
        rho_bar = float(np.max(rho_tail[len(rho_tail) // 2:]))
        rep = envelope_check(xs, rho=rho_bar, q=2.0, side="lower", eps=0.05)
        assert rep.holds

    def test_eps_validation(self):
        with pytest.raises(ValueError):
            envelope_check(np.array([1.0, 0.5]), rho=0.5, q=2.0, side="upper", eps=0.7)
        with pytest.raises(ValueError):
            envelope_check(np.array([1.0, 0.5]), rho=0.5, q=2.0, side="lower", eps=0.0)


class TestClassifier:
    def test_geometric(self):
        rep = classify_rate((1.0 / 3.0) ** np.arange(600, dtype=float))
        assert rep.category == "linear"
        assert rep.estimated_ratio_c == pytest.approx(1.0 / 3.0, rel=1e-6)

    def test_double_exponential(self):
        rep = classify_rate(np.array([2.0 ** (-(2.0**k)) for k in range(64)]))
        assert rep.is_superlinear
        assert rep.estimated_order == pytest.approx(2.0, rel=0.02)

    @pytest.mark.parametrize("e", [0.5, 1.0, 2.0])
    def test_inverse_powers(self, e):
        xs = np.arange(1, 100_001, dtype=float) ** (-e)
        rep = classify_rate(xs)
        assert rep.category == "logarithmic"
        assert rep.estimated_exponent == pytest.approx(e, rel=0.02)
        assert rep.estimated_constant == pytest.approx(1.0, rel=0.02)

    def test_finite_trace(self):
        rep = classify_rate(run_ppa(catalog_get("abs"), 2.5, 50).xs)
        assert rep.category == "finite"
        assert rep.diagnostics["zero_index"] == 3

    def test_ppa_cubic_constant(self):
        t = run_ppa(catalog_get("power_q", 3.0), 1.0, 100_000)
        rep = classify_rate(t.xs)
        assert rep.category == "logarithmic"
        assert rep.estimated_constant == pytest.approx(1.0 / 3.0, rel=0.05)

    def test_example27_consistency(self):
        # x_n = x_{n+1} + delta_n x_{n+1}^q with converging delta obeys the
        # closed-form constant at n = 1e5
        for q, dinf in ((2.0, 1.0), (3.0, 0.5)):
            delta = lambda k: dinf * (1.0 + 0.3 / (k + 1.0))
            xs = iterate_implicit(0.8, delta, q, 100_000)
            target = ((q - 1.0) * dinf) ** (-1.0 / (q - 1.0))
            n = len(xs) - 1
            assert xs[-1] * n ** (1.0 / (q - 1.0)) == pytest.approx(target, rel=0.02)

    def test_rejects_short(self):
        with pytest.raises(ValueError):
            classify_rate(0.9 ** np.arange(20, dtype=float))

    def test_rejects_non_monotone(self):
        xs = np.linspace(1.0, 0.5, 100)
        xs[50] = 0.9
        with pytest.raises(ValueError):
            classify_rate(xs)


class TestPredict:
    def test_map_powers(self):
        p = predict("map", catalog_get("power_p_scaled", 2.0))
        assert (p.category, p.exponent, p.constant) == ("logarithmic", 0.5, 1.0)
        p = predict("map", catalog_get("power_p_scaled", 1.5))
        assert (p.exponent, p.constant) == (1.0, 1.5)

    def test_ppa_superlinear(self):
        p = predict("ppa", catalog_get("power_q", 1.5))
        assert p.category == "superlinear"
        assert p.order == pytest.approx(2.0)

    def test_dra_logarithmic_with_estimate(self):
        p = predict("dra", catalog_get("power_p_scaled", 3.0), r_inf_estimate=0.5)
        assert p.category == "logarithmic"
        assert p.exponent == 1.0
        assert p.constant == pytest.approx(2.0)

    def test_dra_circle_rate(self):
        f = catalog_get("circle", 2.0)
        p = predict("dra", f, r_inf_estimate=0.5)
        assert p.category == "linear"
        assert p.rate == pytest.approx(1.0 / (1.0 + 0.5 / 2.0))

    def test_dra_without_estimate_is_unresolved(self):
        p = predict("dra", catalog_get("circle", 1.0))
        assert p.requires_r_infinity and p.rate is None

    def test_map_sublinear_for_flat(self):
        p = predict("map", catalog_get("flat"))
        assert p.category == "sublinear"
        assert p.exponent is None

    def test_unavailable_for_kinks(self):
        assert predict("map", catalog_get("abs")).category == "unavailable"
        assert predict("dra", catalog_get("indicator_zero")).category == "unavailable"

    def test_every_pair_has_a_prediction(self):
        from conftest import catalog_all
        for f in catalog_all():
            for alg in ("ppa", "map", "dra"):
                assert predict(alg, f).category


class TestRInfinity:
    def test_circle_estimate(self):
        t = run_dra(catalog_get("circle", 1.0), 1.0, 100_000)
        r_hat, unc = estimate_r_infinity(t)
        assert r_hat > 0.0
        assert unc < 1e-6

    def test_uncertainty_shrinks_with_budget(self):
        f = catalog_get("power_p_scaled", 2.0)
        t_small = run_dra(f, 1.0, 1000)
        t_big = run_dra(f, 1.0, 1500)
        _, unc_small = estimate_r_infinity(t_small)
        _, unc_big = estimate_r_infinity(t_big)
        assert unc_big <= unc_small

    def test_constant_synthetic(self):
        t = run_dra(catalog_get("power_p_scaled", 2.0), 1.0, 2000)
        t.rs = np.full(len(t.rs), 0.7)
        assert estimate_r_infinity(t) == (0.7, 0.0)

    def test_rejects_map_trace(self):
        t = run_map(catalog_get("circle", 1.0), 1.0, 2000)
        with pytest.raises(ValueError):
            estimate_r_infinity(t)

    def test_rejects_short_budget_trace(self):
        t = run_dra(catalog_get("power_p_scaled", 3.0), 1.0, 100)
        with pytest.raises(ValueError):
            estimate_r_infinity(t)


class TestGulerProduct:
    def test_p2_value_and_slope(self):
        t = run_map(catalog_get("power_p_scaled", 2.0), 1.0, 10_000)
        rep = guler_product(t)
        assert rep.tends_to_zero
        assert rep.final_value == pytest.approx(2.5e-5, rel=0.05)
        assert rep.tail_slope == pytest.approx(-1.0, abs=0.05)

    def test_circle(self):
        t = run_map(catalog_get("circle", 1.0), 1.0, 10_000)
        rep = guler_product(t)
        assert rep.tends_to_zero
        assert rep.tail_slope == pytest.approx(-1.0, abs=0.05)

    def test_p3_slope(self):
        t = run_map(catalog_get("power_p_scaled", 3.0), 1.0, 10_000)
        rep = guler_product(t)
        assert rep.tail_slope == pytest.approx(-0.5, abs=0.05)

    def test_rejects_dra(self):
        t = run_dra(catalog_get("circle", 1.0), 1.0, 100)
        with pytest.raises(ValueError):
            guler_product(t)


class TestSuperlinearMajorant:
    def test_n0_recovers_rho0(self):
        assert ppa_superlinear_majorant(1.5, 0.5, 0) == 0.5

    def test_closed_form_value(self):
        expected = 0.5**4 * (2.0 / 3.0) ** 6
        assert ppa_superlinear_majorant(1.5, 0.5, 2) == pytest.approx(expected, rel=1e-12)

    def test_dominates_ppa_iterates(self):
        t = run_ppa(catalog_get("power_q", 1.5), 0.5, 60)
        for n in range(1, len(t.xs)):
            assert t.xs[n] < ppa_superlinear_majorant(1.5, 0.5, n)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            ppa_superlinear_majorant(2.5, 0.5, 1)
        with pytest.raises(ValueError):
            ppa_superlinear_majorant(1.5, 0.7, 1)


class TestLinearRateBound:
    def test_square_refined_bound(self):
        t = run_ppa(catalog_get("power_q", 2.0), 1.0, 200)
        rep = linear_rate_bound_check(t, lam=1.0, alpha0=0.5)
        assert rep.holds and rep.first_index == 0
        assert rep.bound == pytest.approx(1.0 / math.sqrt(7.0))

    def test_square_basic_variant(self):
        t = run_ppa(catalog_get("power_q", 2.0), 1.0, 200)
        rep = linear_rate_bound_check(t, lam=1.0, alpha0=0.5, variant="basic")
        assert rep.holds
        assert rep.bound == pytest.approx(1.0 / math.sqrt(5.0))

    def test_false_lambda_fails(self):
        t = run_ppa(catalog_get("power_q", 2.0), 1.0, 200)
        rep = linear_rate_bound_check(t, lam=10.0, alpha0=0.1)
        assert not rep.holds and rep.first_index is None

    def test_alpha0_interval_enforced(self):
        t = run_ppa(catalog_get("power_q", 2.0), 1.0, 50)
        with pytest.raises(ValueError):
            linear_rate_bound_check(t, lam=1.0, alpha0=2.0)
