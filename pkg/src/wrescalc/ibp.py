"""Integration by parts on formal jet polynomials.

Everything here works on MultiPoly expressions whose positional variables
are unused: a monomial is a product of jet generators (derivatives of
named scalars and, in curved work, curvature components) with a rational
coefficient.  The total coordinate derivative is diff_jets, which applies
the product rule and deepens one jet at a time.

The central move rewrites  c * u_beta * G  as a divergence plus a term
where the derivative landed on G instead.  Repeating it strips a chosen
slot bare and certifies the result with an explicit witness, which is the
whole story behind operator extraction, formal self-adjointness, the
cocycle test and the divergence-form decomposition.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .flat import BilinearCoeffTable
from .multiindex import (enumerate_multiindices, mi_add, mi_binomial,
                         mi_degree, sub_indices, unit_index, zero_index)
from .polyring import MultiPoly, jet_gen, poly_sum

Normalizer = Callable[[MultiPoly], MultiPoly]


class DecompositionError(ValueError):
    """The expression cannot have the requested divergence structure."""


# ---------------------------------------------------------------------------
# jet polynomial helpers


def table_to_jet_poly(table: BilinearCoeffTable, fname: str = "f",
                      hname: str = "h") -> MultiPoly:
    n = table.n
    out = []
    for (beta, gamma), v in table.coeffs.items():
        mono = MultiPoly.from_gen(n, jet_gen(fname, beta), v)
        out.append(mono * MultiPoly.from_gen(n, jet_gen(hname, gamma)))
    return poly_sum(n, out)


def total_derivative(p: MultiPoly, j: int) -> MultiPoly:
    return p.diff_jets(j)


def divergence(parts: Sequence[MultiPoly]) -> MultiPoly:
    nv = parts[0].nv
    return poly_sum(nv, [p.diff_jets(j) for j, p in enumerate(parts)])


def jet_rename(p: MultiPoly, old: str, new: str) -> MultiPoly:
    acc = MultiPoly.zero(p.nv)
    for (exps, gens), c in p.terms.items():
        renamed = tuple(
            (("jet", new, g[2]) if g[0] == "jet" and g[1] == old else g, k)
            for g, k in gens)
        acc = acc + MultiPoly.monomial(p.nv, exps, _sorted_gens(renamed), c)
    return acc


def _sorted_gens(gens):
    from .polyring import merge_gens
    out = ()
    for g, k in gens:
        out = merge_gens(out, ((g, k),))
    return out


def _slot_jet(gens, name):
    """The unique jet of `name` in a monomial, or None."""
    found = None
    for g, k in gens:
        if g[0] == "jet" and g[1] == name:
            if found is not None or k != 1:
                raise ValueError(f"monomial not linear in jets of {name!r}")
            found = g
    return found


def jet_linear_in(p: MultiPoly, name: str) -> bool:
    try:
        for (_e, gens), _c in p.terms.items():
            if _slot_jet(gens, name) is None:
                return False
    except ValueError:
        return False
    return True


def substitute_product(p: MultiPoly, name: str, aname: str,
                       bname: str) -> MultiPoly:
    """Replace every jet of `name` by the Leibniz expansion of the product
    of two fresh scalars: u_gamma -> sum binom(gamma, beta) a_beta b_{gamma-beta}."""
    nv = p.nv
    out = []
    for (exps, gens), c in p.terms.items():
        target = _slot_jet(gens, name)
        rest = tuple((g, k) for g, k in gens if g is not target)
        base = MultiPoly.monomial(nv, exps, rest, c)
        if target is None:
            out.append(base)
            continue
        gamma = target[2]
        split = []
        for beta in sub_indices(gamma):
            w = mi_binomial(gamma, beta)
            mono = MultiPoly.from_gen(nv, jet_gen(aname, beta), w)
            split.append(mono * MultiPoly.from_gen(
                nv, jet_gen(bname, tuple(x - y for x, y in zip(gamma, beta)))))
        out.append(base * poly_sum(nv, split))
    return poly_sum(nv, out)


def _assert_pure_jets(p: MultiPoly) -> None:
    for (exps, _g) in p.terms:
        if any(exps):
            raise ValueError("positional variables in a jet expression")


# ---------------------------------------------------------------------------
# the stripping move


def strip_slot(p: MultiPoly, n: int, name: str):
    """Write p = u_0 * core + divergence(witness), u the named scalar.

    Requires p linear in jets of u.  Each pass takes every monomial
    c * u_beta * G with |beta| >= 1, moves the first derivative of beta
    off u, credits c * u_{beta - e_j} * G to witness slot j and keeps the
    counter-term -c * u_{beta - e_j} * D_j G.  The total order of u-jets
    drops by one per pass, so n passes suffice.
    """
    _assert_pure_jets(p)
    witness = [MultiPoly.zero(p.nv) for _ in range(n)]
    bare = []
    work = p
    while not work.is_zero():
        moved = []
        for (exps, gens), c in work.terms_sorted():
            target = _slot_jet(gens, name)
            if target is None:
                raise ValueError(f"monomial without a jet of {name!r}")
            beta = target[2]
            if not any(beta):
                bare.append(MultiPoly.monomial(p.nv, exps, gens, c))
                continue
            j = next(i for i, e in enumerate(beta) if e)
            lower = jet_gen(name, tuple(e - (1 if i == j else 0)
                                        for i, e in enumerate(beta)))
            rest = tuple((g, k) for g, k in gens if g is not target)
            lowered = MultiPoly.monomial(
                p.nv, exps, _sorted_gens(rest + ((lower, 1),)), c)
            witness[j] = witness[j] + lowered
            u_part = MultiPoly.from_gen(p.nv, lower, c)
            moved.append(-(u_part * MultiPoly.monomial(p.nv, exps, rest).diff_jets(j)))
        work = poly_sum(p.nv, moved)
    bare_total = poly_sum(p.nv, bare)
    core = _drop_bare_factor(bare_total, name)
    check = (MultiPoly.from_gen(p.nv, jet_gen(name, zero_index(n))) * core
             + divergence(witness))
    if not (check - p).is_zero():
        raise AssertionError("stripping certificate failed")
    return core, tuple(witness)


def _drop_bare_factor(p: MultiPoly, name: str) -> MultiPoly:
    acc = MultiPoly.zero(p.nv)
    for (exps, gens), c in p.terms.items():
        rest = []
        seen = False
        for g, k in gens:
            if g[0] == "jet" and g[1] == name:
                if any(g[2]) or k != 1:
                    raise AssertionError("slot not fully stripped")
                seen = True
            else:
                rest.append((g, k))
        if not seen:
            raise AssertionError("slot factor missing")
        acc = acc + MultiPoly.monomial(p.nv, exps, _sorted_gens(tuple(rest)), c)
    return acc


# ---------------------------------------------------------------------------
# operators


def laplacian_power_jets(n: int, k: int, name: str = "h") -> MultiPoly:
    """(sum_i d_i^2)^k applied to the named scalar, as a jet polynomial."""
    out = []
    for mu in enumerate_multiindices(n, k):
        w = Fraction(factorial(k), 1)
        for e in mu:
            w /= factorial(e)
        out.append(MultiPoly.from_gen(
            n, jet_gen(name, tuple(2 * e for e in mu)), w))
    return poly_sum(n, out)


@dataclass(frozen=True)
class OperatorExpr:
    """A linear differential operator acting on one named scalar, stored
    as a jet polynomial (coefficients may involve curvature generators)."""

    n: int
    hname: str
    poly: MultiPoly

    def apply_to_product(self, aname: str, bname: str) -> MultiPoly:
        return substitute_product(self.poly, self.hname, aname, bname)

    def renamed(self, new: str) -> MultiPoly:
        return jet_rename(self.poly, self.hname, new)

    def order_part(self, k: int) -> MultiPoly:
        def pick(key):
            _e, gens = key
            for g, kk in gens:
                if g[0] == "jet" and g[1] == self.hname:
                    return mi_degree(g[2]) * kk == k
            return False
        return self.poly.select(pick)

    def leading_coefficient(self) -> Fraction:
        """Coefficient of the half-dimension power of the Laplacian
        delta d, whose flat expansion is (-1)^{n/2} (sum_i d_i^2)^{n/2}."""
        n = self.n
        top = self.order_part(n)
        spike = self.poly.coefficient(
            (0,) * self.poly.nv,
            ((jet_gen(self.hname, (n,) + (0,) * (n - 1)), 1),)).real_fraction()
        model = laplacian_power_jets(n, n // 2, self.hname) * spike
        if not (top - model).is_zero():
            raise ValueError("top order is not a pure Laplacian power")
        return spike * (-1) ** (n // 2)


def ibp_to_operator(B: MultiPoly, n: int, fname: str = "f",
                    hname: str = "h"):
    """Strip the first slot of a bilinear jet expression.

    Returns (P, witness) with B = f_0 * P(h) + divergence(witness); the
    certificate is checked internally before returning.
    """
    if not (jet_linear_in(B, fname) and jet_linear_in(B, hname)):
        raise ValueError("input is not bilinear in the two scalars")
    core, witness = strip_slot(B, n, fname)
    return OperatorExpr(n, hname, core), witness


def operator_from_table(table: BilinearCoeffTable, fname: str = "f",
                        hname: str = "h"):
    return ibp_to_operator(table_to_jet_poly(table, fname, hname),
                           table.n, fname, hname)


# ---------------------------------------------------------------------------
# verification suites


def check_identity_vi(P: OperatorExpr, B: MultiPoly):
    """P(fh) - f P(h) - h P(f) + 2 B must vanish identically (no parts)."""
    n = P.n
    f0 = MultiPoly.from_gen(B.nv, jet_gen("f", zero_index(n)))
    h0 = MultiPoly.from_gen(B.nv, jet_gen(P.hname, zero_index(n)))
    expr = (P.apply_to_product("f", P.hname)
            - f0 * P.poly - h0 * P.renamed("f") + B * 2)
    return expr.is_zero(), expr


def check_selfadjoint(P: OperatorExpr, normalize: Normalizer | None = None):
    """f P(h) - h P(f) must be a total divergence.  Strips f bare; what is
    left multiplying f_0 is the adjoint defect, which a curved caller may
    still need to normalize with curvature identities."""
    n = P.n
    f0 = MultiPoly.from_gen(P.poly.nv, jet_gen("f", zero_index(n)))
    h0 = MultiPoly.from_gen(P.poly.nv, jet_gen(P.hname, zero_index(n)))
    expr = f0 * P.poly - h0 * P.renamed("f")
    defect, witness = strip_slot(expr, n, "f")
    if normalize is not None:
        defect = normalize(defect)
    return defect.is_zero(), witness, defect


def check_cocycle(B: MultiPoly, n: int, fname: str = "f", hname: str = "h",
                  normalize: Normalizer | None = None):
    """Coboundary test for the trilinear form  a0 B(a1, a2).

    The alternating sum over the four product insertions,

        (a0 a1) B(a2, a3) - a0 B(a1 a2, a3)
            + a0 B(a1, a2 a3) - (a3 a0) B(a1, a2),

    must be a total divergence; stripping a0 bare must leave nothing.
    """
    nv = B.nv
    j0 = MultiPoly.from_gen(nv, jet_gen("a0", zero_index(n)))
    j1 = MultiPoly.from_gen(nv, jet_gen("a1", zero_index(n)))
    j3 = MultiPoly.from_gen(nv, jet_gen("a3", zero_index(n)))
    term_a = j0 * j1 * jet_rename(jet_rename(B, fname, "a2"), hname, "a3")
    term_b = j0 * substitute_product(jet_rename(B, hname, "a3"),
                                     fname, "a1", "a2")
    term_c = j0 * substitute_product(jet_rename(B, fname, "a1"),
                                     hname, "a2", "a3")
    term_d = j3 * j0 * jet_rename(jet_rename(B, fname, "a1"), hname, "a2")
    expr = term_a - term_b + term_c - term_d
    defect, witness = strip_slot(expr, n, "a0")
    if normalize is not None:
        defect = normalize(defect)
    return defect.is_zero(), witness, defect


@dataclass(frozen=True)
class SnReport:
    ok: bool
    witness: tuple
    defect: MultiPoly
    s_leading: Fraction | None


def extract_Sn_form(P: OperatorExpr, normalize: Normalizer | None = None) -> SnReport:
    """Exhibit P(h) itself as a total divergence with no zeroth-order term.

    Success means P annihilates constants and lands in exact divergences,
    which is the jet-level content of a factorization through d on the
    right and a divergence on the left.  The reported leading number is
    read off the first witness slot against the pure power
    (sum_i d_i^2)^{n/2 - 1} d_1 h.
    """
    n = P.n
    zero = zero_index(n)
    for (_e, gens), _c in P.poly.terms.items():
        for g, _k in gens:
            if g[0] == "jet" and g[1] == P.hname and g[2] == zero:
                raise DecompositionError("operator has a zeroth-order term")
    defect, witness = strip_slot(P.poly, n, P.hname)
    if normalize is not None:
        defect = normalize(defect)
    ok = defect.is_zero()
    s_leading = None
    if ok:
        spike = witness[0].coefficient(
            (0,) * P.poly.nv,
            ((jet_gen(P.hname, (n - 1,) + (0,) * (n - 1)), 1),))
        s_leading = spike.real_fraction()
    return SnReport(ok, witness, defect, s_leading)


# ---------------------------------------------------------------------------
# homogeneity audit


def monomial_level(gens, curvature_prefix: str = "R") -> int:
    """Derivative-counting level: a jet of a scalar counts its order, a
    curvature component counts two plus its derivative order."""
    total = 0
    for g, k in gens:
        if g[0] != "jet":
            continue
        w = mi_degree(g[2])
        if g[1].startswith(curvature_prefix + "|"):
            w += 2
        total += w * k
    return total


def audit_homogeneity(p: MultiPoly, n: int) -> None:
    for (exps, gens), _c in p.terms.items():
        lvl = monomial_level(gens)
        if lvl != n:
            raise AssertionError(f"monomial level {lvl} != {n}: {gens}")
