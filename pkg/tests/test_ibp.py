"""Parts integration, operator extraction, and the identity suite."""
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wrescalc.flat import (BilinearCoeffTable, flat_bilinear_from_symbol_product,
                           table_from_jet_poly)
from wrescalc.ibp import (DecompositionError, OperatorExpr, audit_homogeneity,
                          check_cocycle, check_identity_vi, check_selfadjoint,
                          divergence, extract_Sn_form, ibp_to_operator,
                          jet_linear_in, jet_rename, laplacian_power_jets,
                          operator_from_table, strip_slot, substitute_product,
                          table_to_jet_poly)
from wrescalc.multiindex import zero_index
from wrescalc.polyring import MultiPoly, jet_gen


def jp(n, name, orders, coeff=1):
    return MultiPoly.from_gen(n, jet_gen(name, tuple(orders)), coeff)


def table(n):
    return flat_bilinear_from_symbol_product(n)


def test_one_step_parts():
    # <df, dh> strips to minus the raw second-derivative trace
    n = 2
    B = jp(n, "f", (1, 0)) * jp(n, "h", (1, 0)) + \
        jp(n, "f", (0, 1)) * jp(n, "h", (0, 1))
    P, wit = ibp_to_operator(B, n)
    assert P.poly == -laplacian_power_jets(n, 1)
    # witness slot j holds f h_{;j}
    assert wit[0] == jp(n, "f", (0, 0)) * jp(n, "h", (1, 0))


def test_strip_certificate_reconstructs_input():
    n = 2
    B = table_to_jet_poly(table(4))
    P, wit = ibp_to_operator(B, 4)
    f0 = jp(4, "f", zero_index(4))
    assert (f0 * P.poly + divergence(wit) - B).is_zero()


def test_strip_rejects_nonlinear_slot():
    n = 2
    bad = jp(n, "f", (1, 0)) * jp(n, "f", (0, 1)) * jp(n, "h", (1, 1))
    with pytest.raises(ValueError):
        strip_slot(bad, n, "f")


def test_ibp_rejects_non_bilinear():
    n = 2
    with pytest.raises(ValueError):
        ibp_to_operator(jp(n, "f", (1, 0)), n)


def test_table_poly_round_trip():
    t = table(4)
    assert table_from_jet_poly(table_to_jet_poly(t), 4) == t


def test_substitute_product_commutes_with_derivative():
    n = 2
    p = jp(n, "u", (2, 1), Fraction(3, 2)) + jp(n, "u", (1, 0)) * jp(n, "k", (1, 1))
    for j in range(n):
        left = substitute_product(p, "u", "a", "b").diff_jets(j)
        right = substitute_product(p.diff_jets(j), "u", "a", "b")
        assert (left - right).is_zero()


def test_substitute_product_binomials():
    n = 2
    got = substitute_product(jp(n, "u", (2, 0)), "u", "a", "b")
    want = (jp(n, "a", (2, 0)) * jp(n, "b", (0, 0))
            + jp(n, "a", (1, 0)) * jp(n, "b", (1, 0)) * 2
            + jp(n, "a", (0, 0)) * jp(n, "b", (2, 0)))
    assert (got - want).is_zero()


def test_jet_rename_round_trip():
    n = 2
    p = jp(n, "f", (1, 0)) * jp(n, "h", (0, 2), Fraction(-7, 3))
    assert jet_rename(jet_rename(p, "f", "g"), "g", "f") == p
    assert not jet_linear_in(jet_rename(p, "f", "h"), "h")


@pytest.mark.parametrize("n,want", [(2, -2), (4, 2), (6, -2)])
def test_leading_coefficients_engine_values(n, want):
    # n=6 is the engine value; the published constant is -4 and the gap is
    # the same global factor -2 that separates the stored six dimensional
    # table from the classical display (see the acceptance suite).
    P, _ = operator_from_table(table(n))
    assert P.leading_coefficient() == want


def test_leading_coefficient_rejects_impure_top():
    n = 2
    P = OperatorExpr(n, "h", jp(n, "h", (2, 0)))
    with pytest.raises(ValueError):
        P.leading_coefficient()


@pytest.mark.parametrize("n", [2, 4, 6])
def test_identity_vi_flat(n):
    t = table(n)
    P, _ = operator_from_table(t)
    ok, residual = check_identity_vi(P, table_to_jet_poly(t))
    assert ok and residual.is_zero()


def test_identity_vi_detects_perturbation():
    t = table(4)
    P, _ = operator_from_table(t)
    B = table_to_jet_poly(t) + jp(4, "f", (1, 0, 0, 0)) * jp(4, "h", (1, 0, 0, 0))
    ok, residual = check_identity_vi(P, B)
    assert not ok and not residual.is_zero()


@pytest.mark.parametrize("n", [2, 4, 6])
def test_selfadjoint_flat(n):
    P, _ = operator_from_table(table(n))
    ok, witness, defect = check_selfadjoint(P)
    assert ok and defect.is_zero()
    # the witness really carries the difference
    f0 = jp(n, "f", zero_index(n))
    h0 = jp(n, "h", zero_index(n))
    expr = f0 * P.poly - h0 * P.renamed("f")
    assert (expr - divergence(witness)).is_zero()


def test_selfadjoint_counterexample_first_order():
    # h -> <dk, dh> with a variable coefficient field k is not symmetric
    n = 2
    poly = sum((jp(n, "k", tuple(int(i == j) for i in range(n)))
                * jp(n, "h", tuple(int(i == j) for i in range(n)))
                for j in range(n)), MultiPoly.zero(n))
    ok, _w, defect = check_selfadjoint(OperatorExpr(n, "h", poly))
    assert not ok and not defect.is_zero()


@pytest.mark.parametrize("n", [2, 4])
def test_cocycle_flat(n):
    ok, _w, defect = check_cocycle(table_to_jet_poly(table(n)), n)
    assert ok and defect.is_zero()


def test_cocycle_counterexample_asymmetric_perturbation():
    # an undifferentiated first slot against a second derivative breaks
    # the coboundary property
    n = 2
    B = jp(n, "f", (0, 0)) * jp(n, "h", (2, 0))
    ok, _w, defect = check_cocycle(B, n)
    assert not ok and not defect.is_zero()


def test_cocycle_product_term_is_still_a_cocycle():
    # adding f h to the bilinear form leaves the test passing: that term
    # is the coboundary of the pointwise pairing, so it cannot serve as a
    # negative control
    n = 2
    B = table_to_jet_poly(table(n)) + jp(n, "f", (0, 0)) * jp(n, "h", (0, 0))
    ok, _w, defect = check_cocycle(B, n)
    assert ok and defect.is_zero()


@pytest.mark.parametrize("n", [2, 4, 6])
def test_divergence_form_flat(n):
    P, _ = operator_from_table(table(n))
    rep = extract_Sn_form(P)
    assert rep.ok and rep.defect.is_zero()
    assert (divergence(rep.witness) - P.poly).is_zero()
    assert rep.s_leading == Fraction(2)


def test_divergence_form_rejects_zeroth_order():
    n = 2
    P, _ = operator_from_table(table(n))
    bumped = OperatorExpr(n, "h", P.poly + jp(n, "h", (0, 0)))
    with pytest.raises(DecompositionError):
        extract_Sn_form(bumped)


def test_homogeneity_audit():
    for n in (2, 4, 6):
        audit_homogeneity(table_to_jet_poly(table(n)), n)
    with pytest.raises(AssertionError):
        audit_homogeneity(jp(2, "f", (1, 0)) * jp(2, "h", (1, 1)), 2)


@st.composite
def bilinear_poly(draw):
    n = 2
    terms = draw(st.lists(st.tuples(
        st.tuples(st.integers(0, 2), st.integers(0, 2)),
        st.tuples(st.integers(0, 2), st.integers(0, 2)),
        st.fractions(min_value=-4, max_value=4, max_denominator=5)),
        min_size=1, max_size=5))
    acc = MultiPoly.zero(n)
    for beta, gamma, c in terms:
        if c == 0:
            continue
        acc = acc + jp(n, "f", beta, c) * jp(n, "h", gamma)
    return acc


@given(bilinear_poly())
def test_strip_certificate_random(B):
    if B.is_zero():
        return
    core, wit = strip_slot(B, 2, "f")
    f0 = jp(2, "f", (0, 0))
    assert (f0 * core + divergence(wit) - B).is_zero()
    for g in core.gens_used():
        assert g[1] != "f"
