"""Covariant string calculus against exact metric models.

Every rewriting rule is checked by evaluating both sides on random
polynomial metrics, where curvature and covariant jets can be computed
directly from the coefficients with no symbolic machinery involved.
"""
import random
from fractions import Fraction
from itertools import product as iproduct

import pytest

from wrescalc.covariant import (CovCalc, cov_check_identity_vi,
                                cov_check_selfadjoint, cov_derivative,
                                cov_divergence, cov_jet, cov_monomial_level,
                                cov_rename, cov_strip_slot,
                                cov_substitute_product, curv_gen)
from wrescalc.geometry import (cov_jets_in_partials, curvature_normal_metric,
                               formal_scalar, partial_jets_in_cov,
                               random_metric_model, substitute_gens)
from wrescalc.ibp import DecompositionError
from wrescalc.covariant import cov_extract_divergence_form
from wrescalc.multiindex import enumerate_up_to
from wrescalc.polyring import MultiPoly, jet_gen, poly_sum

N = 4


def cjp(name, string=(), coeff=1, n=N):
    return MultiPoly.from_gen(n, cov_jet(name, string), coeff)


def crp(body, string=(), n=N):
    return MultiPoly.from_gen(n, curv_gen(body, string))


def rand_scalar(n, rng, degree):
    acc = []
    for b in enumerate_up_to(n, degree):
        acc.append(MultiPoly.monomial(n, tuple(b), (),
                                      Fraction(rng.randint(-5, 5),
                                               rng.randint(1, 3))))
    return poly_sum(n, acc)


def origin(p):
    return p.set_positions_zero(range(p.nv)).coefficient(
        (0,) * p.nv).real_fraction()


@pytest.fixture(scope="module")
def calc():
    return CovCalc(N)


@pytest.fixture(scope="module")
def world():
    """Degree-3 random metric with the oracle jet tables built once."""
    rng = random.Random(3)
    model = random_metric_model(N, rng, degree=3)
    hpoly = rand_scalar(N, rng, 6)
    fpoly = rand_scalar(N, rng, 6)
    rv = model.riemann_cov_jets(2)
    hj = model.scalar_cov_jets(hpoly, 4)
    fj = model.scalar_cov_jets(fpoly, 4)

    def ev(p):
        def fn(g):
            if g[0] == "crv":
                return rv[g]
            if g[0] == "cjet" and g[1] == "h":
                return hj[g[2]]
            if g[0] == "cjet" and g[1] == "f":
                return fj[g[2]]
            return None
        out = substitute_gens(p, fn)
        assert not any(g[0] in ("crv", "cjet") for g in out.gens_used())
        return origin(out)

    return model, rv, hj, fj, ev, hpoly, fpoly


# -- oracle internals --------------------------------------------------------


def test_lowered_curvature_symmetry_fill_matches_raw(world):
    model = world[0]
    for c in iproduct(range(N), repeat=4):
        raw = origin(model._riemann_low_raw(*c))
        assert origin(model.riemann_low(*c)) == raw


def test_curvature_jets_satisfy_differential_cycle(world):
    rv = world[1]
    for i, j, k, l, m in iproduct(range(N), repeat=5):
        s = (origin(rv[curv_gen((i, j, k, l), (m,))])
             + origin(rv[curv_gen((i, j, l, m), (k,))])
             + origin(rv[curv_gen((i, j, m, k), (l,))]))
        assert s == 0


def test_curvature_jet_extension_matches_connection_formula(world):
    # rank-5 value at 0 equals d(rank-4 field) minus connection terms
    model, rv = world[0], world[1]
    for i, j, k, l, m in iproduct(range(N), repeat=5):
        body = (i, j, k, l)
        acc = origin(model.riemann_low(*body).diff_var(m))
        for q in range(4):
            for p in range(N):
                g0 = origin(model.christoffel(p, min(m, body[q]),
                                              max(m, body[q])))
                if g0:
                    nb = body[:q] + (p,) + body[q + 1:]
                    acc -= g0 * origin(model.riemann_low(*nb))
        assert acc == origin(rv[curv_gen(body, (m,))])


def test_curvature_jets_satisfy_second_exchange_rule(world):
    rv = world[1]
    rng = random.Random(0)
    for _ in range(220):
        body = tuple(rng.randrange(N) for _ in range(4))
        a, b = rng.randrange(N), rng.randrange(N)
        lhs = (origin(rv[curv_gen(body, (a, b))])
               - origin(rv[curv_gen(body, (b, a))]))
        rhs = Fraction(0)
        for q in range(4):
            for m in range(N):
                fac = origin(rv[curv_gen((m, body[q], a, b))])
                if fac:
                    rhs += fac * origin(
                        rv[curv_gen(body[:q] + (m,) + body[q + 1:])])
        assert lhs == rhs


def test_scalar_jet_chain_consistent_componentwise(world):
    model, hj = world[0], world[2]
    hpoly = world[5]
    fields = {(): model._trunc(hpoly, 5)}
    for r in range(4):
        fields.update(model.cov_extend(
            {c: v for c, v in fields.items() if len(c) == r}, r, 4 - r))
    for c, v in hj.items():
        if not c:
            continue
        base, a = c[:-1], c[-1]
        acc = origin(fields[base].diff_var(a))
        for q in range(len(base)):
            for m in range(N):
                g0 = origin(model.christoffel(m, min(a, base[q]),
                                              max(a, base[q])))
                if g0:
                    acc -= g0 * origin(hj[base[:q] + (m,) + base[q + 1:]])
        assert acc == origin(v)


# -- canonical forms ---------------------------------------------------------


def test_second_derivatives_commute_on_scalars(calc):
    assert (calc.canonical_gen(cov_jet("f", (1, 0)))
            - cjp("f", (0, 1))).is_zero()


def test_canonical_scalar_strings_match_oracle(calc, world):
    ev, hj = world[4], world[2]
    for s in iproduct(range(N), repeat=4):
        assert ev(calc.canonical_gen(cov_jet("h", s))) == origin(hj[s])


def test_canonical_curvature_strings_match_oracle(calc, world):
    ev, rv = world[4], world[1]
    rng = random.Random(7)
    for _ in range(120):
        body = tuple(rng.randrange(N) for _ in range(4))
        string = tuple(rng.randrange(N)
                       for _ in range(rng.randint(0, 2)))
        g = curv_gen(body, string)
        assert ev(calc.canonical_gen(g)) == origin(rv[g])


def test_canonicalize_is_idempotent_and_value_preserving(calc, world):
    ev = world[4]
    p = (cjp("h", (2, 0, 1)) * crp((1, 0, 3, 2), (1, 0))
         + cjp("h", (3, 3)) * cjp("f", (1,)) * crp((2, 1, 2, 1))
         - cjp("f", (0, 2, 1, 1), coeff=Fraction(5, 3)))
    q = calc.canonicalize(p)
    assert (calc.canonicalize(q) - q).is_zero()
    assert ev(q) == ev(p)


def test_independent_curvature_component_count(calc):
    # the classical dimension n^2 (n^2 - 1) / 12 of the span
    def span_dim(cc, n):
        rows = []
        for body in iproduct(range(n), repeat=4):
            p = cc.canonical_gen(curv_gen(body))
            row = {}
            for (_e, gens), c in p.terms.items():
                row[gens] = row.get(gens, Fraction(0)) + c.real_fraction()
            rows.append(row)
        pivots = {}
        for row in rows:
            row = dict(row)
            while row:
                lead = max(row)
                if lead in pivots:
                    fac = row[lead]
                    prow = pivots[lead]
                    for k, v in prow.items():
                        row[k] = row.get(k, Fraction(0)) - fac * v
                    row = {k: v for k, v in row.items() if v}
                else:
                    inv = Fraction(1) / row[lead]
                    pivots[lead] = {k: v * inv for k, v in row.items()}
                    break
        return len(pivots)

    assert span_dim(calc, 4) == 20
    assert span_dim(CovCalc(6), 6) == 105


def test_trace_of_trace_adjusted_ricci_is_normalized_scalar(calc):
    tr = poly_sum(N, [calc.schouten_component(i, i) for i in range(N)])
    assert (tr - calc.normalized_scalar()).is_zero()


def test_trace_free_part_has_no_traces(calc):
    for j, l in ((0, 0), (0, 1), (2, 3), (1, 1)):
        tr = poly_sum(N, [calc.weyl_component(i, j, i, l)
                          for i in range(N)])
        assert calc.canonicalize(tr).is_zero()


def test_trace_free_part_pair_symmetries(calc):
    for idx in ((0, 1, 2, 3), (1, 3, 0, 2), (0, 2, 1, 2)):
        i, j, k, l = idx
        w = calc.weyl_component(i, j, k, l)
        assert (calc.weyl_component(k, l, i, j) - w).is_zero()
        assert (calc.weyl_component(j, i, k, l) + w).is_zero()


# -- derivations and strips --------------------------------------------------


def test_total_derivative_is_a_derivation(calc):
    p = cjp("h", (0, 1)) * crp((0, 1, 0, 1))
    q = cjp("f", (2,)) + cjp("h", (3,)) * Fraction(2, 5)
    lhs = cov_derivative(p * q, 2)
    rhs = cov_derivative(p, 2) * q + p * cov_derivative(q, 2)
    assert (lhs - rhs).is_zero()


def test_monomial_level_counts_derivatives():
    gens = ((cov_jet("h", (0, 1)), 1), (curv_gen((0, 1, 0, 1), (2,)), 1))
    assert cov_monomial_level(gens) == 2 + 3


def test_strip_certificate_reconstructs_input():
    B = cjp("f", (1, 0)) * cjp("h", (1,)) * crp((0, 2, 0, 2))
    core, wit = cov_strip_slot(B, N, "f")
    back = cjp("f") * core + cov_divergence(wit)
    assert (back - B).is_zero()


def test_strip_rejects_nonlinear_slot():
    bad = cjp("f", (1,)) * cjp("f", (0,))
    with pytest.raises(ValueError):
        cov_strip_slot(bad, N, "f")


def test_product_jets_split_over_subdivisions():
    p = cjp("u", (0, 1))
    out = cov_substitute_product(p, "u", "f", "h")
    want = (cjp("f", (0, 1)) * cjp("h") + cjp("f") * cjp("h", (0, 1))
            + cjp("f", (0,)) * cjp("h", (1,))
            + cjp("f", (1,)) * cjp("h", (0,)))
    assert (out - want).is_zero()


def test_laplacian_product_rule_identity(calc):
    P = poly_sum(N, [cjp("h", (i, i)) for i in range(N)])
    B = poly_sum(N, [cjp("f", (i,)) * cjp("h", (i,)) for i in range(N)])
    ok, residual = cov_check_identity_vi(calc, P, -B)
    assert ok, residual.terms_sorted()


# -- adjointness through exact divergences -----------------------------------


def test_squared_laplacian_strips_to_literally_zero_defect():
    P = poly_sum(N, [cjp("h", (i, i, j, j))
                     for i in range(N) for j in range(N)])
    expr = cjp("f") * P - cjp("h") * cov_rename(P, "h", "f")
    core, _w = cov_strip_slot(expr, N, "f")
    assert core.is_zero()


def test_ricci_divergence_operator_is_selfadjoint(calc, world):
    ev = world[4]
    parts = []
    for j in range(N):
        inner = poly_sum(N, [
            poly_sum(N, [crp((k, i, k, j)) for k in range(N)])
            * cjp("h", (i,)) for i in range(N)])
        parts.append(cov_derivative(inner, j))
    P = poly_sum(N, parts)
    ok, _wit, defect = cov_check_selfadjoint(calc, P)
    assert ok
    assert ev(defect) == 0


def test_curvature_times_laplacian_is_not_selfadjoint(calc, world):
    ev = world[4]
    J = poly_sum(N, [crp((k, i, k, i))
                     for k in range(N) for i in range(N)]) * Fraction(
                         1, 2 * (N - 1))
    P = J * poly_sum(N, [cjp("h", (i, i)) for i in range(N)])
    ok, _wit, defect = cov_check_selfadjoint(calc, P)
    assert not ok
    assert ev(defect) != 0


def test_divergence_form_extraction_flags_zeroth_order(calc):
    P = cjp("h") * crp((0, 1, 0, 1))
    with pytest.raises(DecompositionError):
        cov_extract_divergence_form(calc, P)


# -- coordinate exchange -----------------------------------------------------


def test_partial_and_covariant_jets_invert_each_other(world):
    model = world[0]
    cov = cov_jets_in_partials(model, "f", 3)
    back = partial_jets_in_cov(model, "f", 3)

    def fn(g):
        if g[0] == "cjet" and g[1] == "f":
            return cov[g[2]]
        return None

    for beta, expr in back.items():
        out = substitute_gens(expr, fn)
        want = MultiPoly.from_gen(N, jet_gen("f", beta))
        assert origin(out - want) == 0
        diff = out - want
        for (_e, gens), c in diff.terms.items():
            if any(g[0] == "jet" for g in gens):
                assert c.is_zero()


def test_curvature_quadratic_model_round_trip():
    # the constructor itself asserts the round trip; cover it at n = 3
    curvature_normal_metric(CovCalc(3))


# -- six-dimensional regression ---------------------------------------------


def test_gradient_pairing_against_trace_free_curvature_reduces():
    """A third-order pairing against the trace-free curvature equals its
    lower-order reduction with one trace-adjusted factor and a quadratic
    term; exact at n = 6."""
    n6 = 6
    m6 = CovCalc(n6)
    W = {}
    for idx in iproduct(range(n6), repeat=4):
        W[idx] = m6.weyl_component(*idx)
    f1 = {i: MultiPoly.from_gen(n6, cov_jet("f", (i,))) for i in range(n6)}
    h1 = {i: MultiPoly.from_gen(n6, cov_jet("h", (i,))) for i in range(n6)}

    lhs_terms = []
    for i, j, k, l in iproduct(range(n6), repeat=4):
        w = W[(i, j, k, l)]
        if w.is_zero():
            continue
        lhs_terms.append(f1[i] * m6.canonical_gen(cov_jet("h", (j, k, l))) * w)
    lhs = poly_sum(n6, lhs_terms)

    rhs_terms = []
    for i, k, j, l in iproduct(range(n6), repeat=4):
        w = W[(i, k, j, l)]
        if w.is_zero():
            continue
        rhs_terms.append(f1[i] * h1[j] * m6.schouten_component(k, l) * w)
    for i, k, l, m in iproduct(range(n6), repeat=4):
        w = W[(i, k, l, m)]
        if w.is_zero():
            continue
        for j in range(n6):
            w2 = W[(j, k, l, m)]
            if not w2.is_zero():
                rhs_terms.append(f1[i] * h1[j] * w * w2 * Fraction(1, 2))
    rhs = poly_sum(n6, rhs_terms)
    assert m6.canonicalize(lhs - rhs).is_zero()
