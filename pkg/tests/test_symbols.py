"""Graded symbol calculus: composition, commutators, truncation guards."""
import pytest

from wrescalc.forms import FormMatrix
from wrescalc.multiindex import zero_index
from wrescalc.polyring import MultiPoly, jet_gen
from wrescalc.rationals import QI
from wrescalc.symbols import (GradedSymbol, HomogSymbol, SymbolContext,
                              TruncationError, commutator_with_function,
                              compose, flat_context, multiply_by_function)
from wrescalc.flat import reflection_symbol


def _mul_by_jet_function(sym_ctx, dim, fname):
    """Multiplication operator as a graded symbol: a single degree-0
    component carrying the function's base jet; coordinate derivatives
    reach the deeper jets through the generator calculus."""
    f = MultiPoly.from_gen(sym_ctx.nv, jet_gen(fname, zero_index(sym_ctx.n)))
    mat = FormMatrix.identity(dim, sym_ctx.nv).scale_poly(f)
    comp = HomogSymbol(sym_ctx, mat, 0, 0)
    return GradedSymbol(sym_ctx, {0: comp}, top=0, floor=0, exact_below=True)


def _comps_equal(a: GradedSymbol, b: GradedSymbol, down_to: int) -> bool:
    for d in range(max(a.top, b.top), down_to - 1, -1):
        ca = a.comps.get(d)
        cb = b.comps.get(d)
        if ca is None and cb is None:
            continue
        if ca is None:
            if not cb.is_zero():
                return False
            continue
        if cb is None:
            if not ca.is_zero():
                return False
            continue
        if not ca.equals(cb):
            return False
    return True


def test_reflection_squares_to_identity_componentwise():
    s = reflection_symbol(4)
    h0 = s.comps[0]
    sq = h0.mul(h0)
    ident = HomogSymbol.identity(s.ctx, h0.rows)
    assert sq.equals(ident)
    assert sq.denom_pow == 2 and sq.degree == 0


def test_compose_reflection_with_itself_is_identity():
    s = reflection_symbol(2)
    sq = compose(s, s, floor=-3)
    assert set(sq.comps) == {0}
    assert sq.comps[0].equals(HomogSymbol.identity(s.ctx, 2))


def test_compose_with_multiplication_operator():
    # sigma(f o S) = f sigma(S): no xi-derivatives of f exist to spend
    s = reflection_symbol(2)
    fmul = _mul_by_jet_function(s.ctx, 2, "f")
    left = compose(fmul, s, floor=-2)
    want = multiply_by_function(s, "f")
    assert _comps_equal(left, want, -2)


def test_commutator_matches_composed_difference():
    s = reflection_symbol(2)
    fmul = _mul_by_jet_function(s.ctx, 2, "f")
    direct = commutator_with_function(s, "f", floor=-2)
    via_compose = compose(s, fmul, floor=-2)
    neg = compose(fmul, s, floor=-2)
    diff_comps = {}
    for d in set(via_compose.comps) | set(neg.comps):
        ca = via_compose.comps.get(d)
        cb = neg.comps.get(d)
        if ca is None:
            diff_comps[d] = cb.scale(-1)
        elif cb is None:
            diff_comps[d] = ca
        else:
            diff_comps[d] = ca.sub(cb)
    diff = GradedSymbol(s.ctx, diff_comps, top=0, floor=-2)
    assert _comps_equal(direct, diff, -2)
    # leading order cancels in the commutator
    assert 0 not in direct.comps or direct.comps[0].is_zero()


def test_compose_truncation_soundness():
    s = reflection_symbol(2)
    fmul = _mul_by_jet_function(s.ctx, 2, "f")
    shallow = compose(s, fmul, floor=-1)
    deep = compose(s, fmul, floor=-3)
    assert _comps_equal(shallow, deep, -1)


def test_dxi_drops_degree_and_stays_homogeneous():
    s = reflection_symbol(4)
    h = s.comps[0]
    d1 = h.dxi(0)
    d2 = d1.dxi(2)
    assert (d1.degree, d2.degree) == (-1, -2)
    d1.check_homogeneity()
    d2.check_homogeneity()


def test_d_coords_carries_minus_i_powers():
    ctx = flat_context(2)
    f = MultiPoly.from_gen(2, jet_gen("f", (0, 0)))
    h = HomogSymbol(ctx, FormMatrix.identity(1, 2).scale_poly(f), 0, 0)
    one_step = h.d_coords((1, 0))
    want1 = MultiPoly.from_gen(2, jet_gen("f", (1, 0))) * QI(0, -1)
    assert one_step.mat.get(0, 0) == want1
    two_step = h.d_coords((2, 0))
    want2 = MultiPoly.from_gen(2, jet_gen("f", (2, 0))) * QI(-1)
    assert two_step.mat.get(0, 0) == want2


def test_add_aligns_denominators():
    s = reflection_symbol(4)
    h0 = s.comps[0]
    sq = h0.mul(h0)                       # identity at denominator power 2
    ident = HomogSymbol.identity(s.ctx, h0.rows)
    total = sq.add(ident)
    assert total.equals(ident.scale(2))


def test_jet_order_guards():
    n = 2
    norm = MultiPoly.var(2 * n, 0, 2) + MultiPoly.var(2 * n, 1, 2)
    ctx = SymbolContext(n=n, nv=2 * n, xi=(0, 1), x=(2, 3), norm_sq=norm)
    h = HomogSymbol(ctx, FormMatrix.identity(1, ctx.nv), 0, 0, jet_order=0)
    with pytest.raises(TruncationError):
        h.dx(0)
    # xi-derivatives never consume jet budget
    h.dxi(0)


def test_graded_floor_guard():
    base = reflection_symbol(2)
    s = compose(base, base, floor=-1)
    assert s.component(-1) is None
    with pytest.raises(TruncationError):
        s.component(-2)
    exact = reflection_symbol(2)
    assert exact.component(-5) is None    # exactly zero below the floor


def test_compose_floor_guard_raises():
    s = reflection_symbol(2)
    shallow = compose(s, s, floor=0)      # retains nothing below 0
    with pytest.raises(TruncationError):
        compose(shallow, shallow, floor=-2)
