"""Floating-point cross checks.

The numeric side is deliberately built from its own matrix code and its
own averages, and nothing computed here flows back into the exact
pipeline; these tests only compare the two sides after the fact.
"""
import numpy as np
import pytest
from fractions import Fraction

from wrescalc.flat import (flat_bilinear_from_symbol_product,
                           pair_trace_closed_form)
from wrescalc.ibp import check_identity_vi, operator_from_table, table_to_jet_poly
from wrescalc.oracle import (NumericConfig, mc_sphere_integral,
                             numeric_psi, numeric_reflection, psi_reference,
                             random_jet_eval, random_rational_assignments)
from wrescalc.sphere import sphere_monomial_average

CFG = NumericConfig()


def test_mc_reference_values():
    est, se = mc_sphere_integral((2, 0, 0, 0), 4, CFG)
    assert abs(est - 0.25) <= 4 * se
    est, se = mc_sphere_integral((4, 0, 0, 0), 4, CFG)
    assert abs(est - 0.125) <= 4 * se
    est, se = mc_sphere_integral((1, 0, 0, 0), 4, CFG)
    assert abs(est) <= 4 * se


def test_mc_matches_exact_average_grid():
    for n in (2, 4, 6):
        for alpha in [(2,) + (0,) * (n - 1), (2, 2) + (0,) * (n - 2),
                      (4,) + (0,) * (n - 1), (1, 1) + (0,) * (n - 2)]:
            exact = float(sphere_monomial_average(n, alpha))
            est, se = mc_sphere_integral(alpha, n, CFG)
            assert abs(est - exact) <= 4 * se, (n, alpha)


def test_mc_is_deterministic():
    a = mc_sphere_integral((2, 0), 2, CFG)
    b = mc_sphere_integral((2, 0), 2, CFG)
    assert a == b


def test_mc_rejects_bad_length():
    with pytest.raises(ValueError):
        mc_sphere_integral((2, 0), 4, CFG)


def test_numeric_psi_reference_points():
    e1 = np.array([1.0, 0, 0, 0])
    e2 = np.array([0, 1.0, 0, 0])
    assert numeric_psi(e1, e1, 4, 2) == pytest.approx(6.0)
    assert numeric_psi(e1, e2, 4, 2) == pytest.approx(-2.0)
    f1 = np.array([1.0, 0, 0, 0, 0, 0])
    f2 = np.array([0, 0, 1.0, 0, 0, 0])
    assert numeric_psi(f1, f2, 6, 3) == pytest.approx(-4.0)


def test_numeric_psi_rejects_zero_covector():
    with pytest.raises(ValueError):
        numeric_psi(np.zeros(4), np.ones(4), 4, 2)


def test_reflection_is_numerically_involutive():
    rng = np.random.default_rng(7)
    for n, m in ((4, 2), (6, 3), (6, 2)):
        xi = rng.standard_normal(n)
        F = numeric_reflection(xi, m)
        assert np.allclose(F @ F, np.eye(F.shape[0]), atol=1e-12)


def test_psi_closed_form_random_pairs():
    rng = np.random.default_rng(20260815)
    for n in (2, 4, 6, 8):
        for m in range(1, n):
            a, b = pair_trace_closed_form(n, m)
            assert (a, b) == (int(psi_reference_coeff(n, m)[0]),
                              int(psi_reference_coeff(n, m)[1]))
            for _ in range(25):
                xi = rng.standard_normal(n)
                eta = rng.standard_normal(n)
                ref = psi_reference(xi, eta, n, m)
                got = numeric_psi(xi, eta, n, m)
                assert abs(got - ref) <= 1e-9 * max(1.0, abs(ref))


def psi_reference_coeff(n, m):
    # read (a, b) off the oracle's closed form at aligned / orthogonal pairs
    e1 = np.zeros(n)
    e1[0] = 1.0
    e2 = np.zeros(n)
    e2[1] = 1.0
    b = psi_reference(e1, e2, n, m)
    a = psi_reference(e1, e1, n, m) - b
    return round(a), round(b)


def test_random_jet_eval_kills_true_identity():
    table = flat_bilinear_from_symbol_product(4)
    op, _w = operator_from_table(table)
    ok, expr = check_identity_vi(op, table_to_jet_poly(table))
    assert ok
    gens = sorted({g for (_e, gg), _c in expr.terms.items() for g, _k in gg})
    # expr is the zero polynomial; a nonzero combination must not be
    vals = random_rational_assignments(gens, seed=3)
    assert random_jet_eval(expr, vals) == 0.0
    probe = table_to_jet_poly(table)
    pgens = sorted({g for (_e, gg), _c in probe.terms.items()
                    for g, _k in gg})
    nonzero = 0
    for seed in range(50):
        vals = random_rational_assignments(pgens, seed=seed)
        if abs(random_jet_eval(probe, vals)) > 1e-9:
            nonzero += 1
    assert nonzero >= 45


def test_random_jet_eval_requires_full_assignment():
    table = flat_bilinear_from_symbol_product(2)
    poly = table_to_jet_poly(table)
    with pytest.raises(ValueError):
        random_jet_eval(poly, {})
