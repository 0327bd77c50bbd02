"""Scalars, multi-indices and the sparse polynomial ring."""
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wrescalc.multiindex import (enumerate_multiindices, mi_add, mi_binomial,
                                 mi_degree, mi_factorial, mi_leq, mi_sub,
                                 sub_indices, taylor_coefficient, unit_index,
                                 zero_index)
from wrescalc.polyring import MultiPoly, jet_gen, merge_gens
from wrescalc.rationals import QI, QI_I, QI_ONE, QI_ZERO


# ---------------------------------------------------------------------------
# Gaussian rationals


def test_qi_field_ops():
    a = QI(Fraction(1, 2), Fraction(-3, 4))
    b = QI(2, 5)
    assert a + b == QI(Fraction(5, 2), Fraction(17, 4))
    assert a - a == QI_ZERO
    assert (a * b) / b == a
    assert 1 / QI_I == QI(0, -1)
    assert QI_I * QI_I == -1


def test_qi_power_cycles():
    assert [QI.i_power(k) for k in range(4)] == [QI(1), QI(0, 1), QI(-1), QI(0, -1)]
    for k in range(12):
        assert QI.i_power(k) * QI.minus_i_power(k) == QI_ONE
    # (-i)^2 = -1 is the sign carried by every second coordinate derivative
    assert QI.minus_i_power(2) == -1
    assert QI.minus_i_power(4) == 1


def test_qi_real_fraction_guard():
    assert QI(Fraction(7, 3)).real_fraction() == Fraction(7, 3)
    with pytest.raises(ValueError):
        QI(1, 1).real_fraction()


def test_qi_immutable_hashable():
    a = QI(1, 2)
    with pytest.raises(AttributeError):
        a.re = Fraction(0)
    assert len({QI(1, 2), QI(1, 2), QI(2, 1)}) == 2


qi_st = st.builds(
    QI,
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
)


@given(qi_st, qi_st, qi_st)
def test_qi_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


# ---------------------------------------------------------------------------
# multi-indices


def test_enumeration_order_and_count():
    assert list(enumerate_multiindices(2, 2)) == [(2, 0), (1, 1), (0, 2)]
    assert len(list(enumerate_multiindices(4, 3))) == comb(6, 3)
    assert list(enumerate_multiindices(3, 0)) == [(0, 0, 0)]


def test_enumeration_exhaustive_unique():
    seen = list(enumerate_multiindices(3, 4))
    assert len(seen) == len(set(seen))
    assert all(mi_degree(a) == 4 for a in seen)


def test_mi_arithmetic():
    a, b = (2, 0, 1), (1, 1, 0)
    assert mi_add(a, b) == (3, 1, 1)
    assert mi_sub(mi_add(a, b), b) == a
    with pytest.raises(ValueError):
        mi_sub(b, a)
    assert mi_leq(b, mi_add(a, b))
    assert not mi_leq(a, b)
    assert mi_factorial((3, 2, 0)) == 12
    assert mi_binomial((3, 2), (1, 2)) == 3
    assert mi_binomial((1, 0), (0, 1)) == 0
    assert taylor_coefficient((2, 2)) == Fraction(1, 4)
    assert unit_index(3, 1) == (0, 1, 0)
    assert zero_index(2) == (0, 0)


def test_sub_indices_count():
    a = (2, 1, 0)
    subs = list(sub_indices(a))
    assert len(subs) == 6
    assert len(set(subs)) == 6
    assert all(mi_leq(s, a) for s in subs)


# ---------------------------------------------------------------------------
# polynomials

NV = 3


def _poly_from(terms):
    acc = MultiPoly.zero(NV)
    for exps, c in terms:
        acc = acc + MultiPoly.monomial(NV, exps, coeff=c)
    return acc


exps_st = st.tuples(*[st.integers(min_value=0, max_value=3)] * NV)
poly_st = st.builds(
    _poly_from,
    st.lists(st.tuples(exps_st, qi_st), min_size=0, max_size=5),
)


@given(poly_st, poly_st, poly_st)
def test_poly_ring_axioms(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p + MultiPoly.zero(NV) == p


@given(poly_st, poly_st, st.integers(min_value=0, max_value=NV - 1))
def test_poly_leibniz(p, q, j):
    lhs = (p * q).diff_var(j)
    rhs = p.diff_var(j) * q + p * q.diff_var(j)
    assert lhs == rhs


@given(poly_st)
def test_poly_mixed_partials_commute(p):
    assert p.diff_var(0).diff_var(1) == p.diff_var(1).diff_var(0)


def test_poly_no_zero_terms_stored():
    p = MultiPoly.var(NV, 0) - MultiPoly.var(NV, 0)
    assert p.is_zero() and len(p.terms) == 0
    q = _poly_from([((1, 0, 0), QI(1)), ((1, 0, 0), QI(-1))])
    assert q.is_zero()


def test_jet_generator_derivative():
    f0 = jet_gen("f", (0, 0, 0))
    p = MultiPoly.from_gen(NV, f0)
    d = p.diff_jets(1)
    assert d == MultiPoly.from_gen(NV, jet_gen("f", (0, 1, 0)))
    # positional derivative sees the jet as a constant
    assert p.diff_var(1).is_zero()


def test_jet_product_rule():
    f = MultiPoly.from_gen(NV, jet_gen("f", (0, 0, 0)))
    h = MultiPoly.from_gen(NV, jet_gen("h", (0, 0, 0)))
    d = (f * h).diff_jets(0)
    want = (MultiPoly.from_gen(NV, jet_gen("f", (1, 0, 0))) * h +
            f * MultiPoly.from_gen(NV, jet_gen("h", (1, 0, 0))))
    assert d == want


def test_jet_power_rule():
    f = MultiPoly.from_gen(NV, jet_gen("f", (0, 0, 0)))
    d = (f * f).diff_jets(2)
    f1 = MultiPoly.from_gen(NV, jet_gen("f", (0, 0, 1)))
    assert d == 2 * (f1 * f)


def test_merge_positions_diagonal():
    # xi_0 * eta_0 with eta folded onto xi becomes xi_0^2
    p = MultiPoly.var(2, 0) * MultiPoly.var(2, 1)
    q = p.merge_positions((1,), (0,))
    assert q == MultiPoly.var(2, 0, 2)


def test_extend_vars_offset():
    p = MultiPoly.var(2, 1)
    q = p.extend_vars(4, offset=1)
    assert q == MultiPoly.var(4, 2)


def test_pow_matches_repeated_mul():
    p = MultiPoly.var(NV, 0) + MultiPoly.var(NV, 1) * QI(0, 1)
    assert p ** 3 == p * p * p
    assert p ** 0 == MultiPoly.const(NV, 1)


def test_truncate_and_zero_positions():
    p = (MultiPoly.var(3, 0, 2) * MultiPoly.var(3, 2) +
         MultiPoly.var(3, 1) + MultiPoly.const(3, 5))
    assert p.truncate_positions((0, 2), 0) == MultiPoly.var(3, 1) + 5
    assert p.set_positions_zero((1,)) == (MultiPoly.var(3, 0, 2) *
                                          MultiPoly.var(3, 2) + 5)


def test_merge_gens_sorted_and_counted():
    g1 = ((jet_gen("f", (1, 0)), 1),)
    g2 = ((jet_gen("f", (1, 0)), 2), (jet_gen("h", (0, 1)), 1),)
    merged = dict(merge_gens(g1, g2))
    assert merged[jet_gen("f", (1, 0))] == 3
    assert merged[jet_gen("h", (0, 1))] == 1
