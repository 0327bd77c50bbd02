"""Pointwise covariant jet calculus with ordered derivative strings.

Generators name covariant derivatives at a fixed base point.  A scalar jet
("cjet", name, string) is a component of the iterated covariant derivative
with the first string entry innermost; a curvature generator
("crv", body, string) is a component of the derivatives of the curvature
tensor, four body slots plus the string.  The total derivative appends one
direction at the end of a string, which makes it a plain derivation with
no combinatorial bookkeeping, and contractions are written against the
base-point metric, so repeated concrete indices sum with unit weights.

Nothing assumes the strings are sorted.  Canonicalization brings every
generator to a normal form: derivative strings ascending, with each
adjacent exchange inserting the commutator's curvature correction;
curvature bodies ordered by the antisymmetry and pair-swap symmetries; and
the cyclic and differential curvature identities eliminated by an exact
linear solve per index multiset.  Every rewrite is an identity of tensors,
so canonicalization preserves the value of an expression under any exact
metric model; the test suite checks that against randomly generated
models rather than trusting the signs written here.

One discipline matters for the integration-by-parts helpers.  A rewrite
of a single generator is only a component identity; its curvature
corrections carry fixed index values and do not assemble into complete
contractions.  Component identities are safe inside a value check or a
normal-form comparison, but a stripping certificate treats repeated
indices as contractions when it discards the divergence part, so the
expression handed to a strip must be index-complete: built from full sums
over its repeated indices, never from generators rewritten one at a time.
Operators produced by the symbol traces are of that shape already.  Strip
first, canonicalize the leftover core only.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations

from .ibp import DecompositionError
from .polyring import MultiPoly, merge_gens, poly_sum
from .rationals import QI

# ---------------------------------------------------------------------------
# generators


def cov_jet(name: str, string=()) -> tuple:
    return ("cjet", name, tuple(string))


def curv_gen(body, string=()) -> tuple:
    return ("crv", tuple(body), tuple(string))


def is_cov_jet(gen) -> bool:
    return gen[0] == "cjet"


def is_curv_gen(gen) -> bool:
    return gen[0] == "crv"


def cov_derivative(p: MultiPoly, j: int) -> MultiPoly:
    """Total covariant derivative in direction j.

    Product rule over the covariant generators of each monomial; any other
    generator is a constant at the base point.
    """
    acc: dict = {}
    for (exps, gens), c in p.terms.items():
        for idx, (g, k) in enumerate(gens):
            if g[0] in ("cjet", "rho"):
                deeper = (g[0], g[1], g[2] + (j,))
            elif g[0] == "crv":
                deeper = ("crv", g[1], g[2] + (j,))
            else:
                continue
            rest = list(gens)
            if k == 1:
                del rest[idx]
            else:
                rest[idx] = (g, k - 1)
            key = (exps, merge_gens(tuple(rest), ((deeper, 1),)))
            v = c * k
            s = acc.get(key)
            acc[key] = v if s is None else s + v
    return MultiPoly(p.nv, {k: v for k, v in acc.items() if not v.is_zero()},
                     _own=True)


def cov_divergence(parts) -> MultiPoly:
    nv = parts[0].nv
    return poly_sum(nv, [cov_derivative(p, j) for j, p in enumerate(parts)])


def cov_rename(p: MultiPoly, old: str, new: str) -> MultiPoly:
    acc: dict = {}
    for (exps, gens), c in p.terms.items():
        renamed = ()
        for g, k in gens:
            if g[0] == "cjet" and g[1] == old:
                g = ("cjet", new, g[2])
            renamed = merge_gens(renamed, ((g, k),))
        key = (exps, renamed)
        s = acc.get(key)
        acc[key] = c if s is None else s + c
    return MultiPoly(p.nv, {k: v for k, v in acc.items() if not v.is_zero()},
                     _own=True)


def cov_monomial_level(gens) -> int:
    """Two per curvature factor plus every derivative, any generator kind."""
    total = 0
    for g, k in gens:
        if g[0] == "cjet":
            w = len(g[2])
        elif g[0] in ("crv", "rho"):
            w = 2 + len(g[2])
        else:
            continue
        total += w * k
    return total


def audit_cov_homogeneity(p: MultiPoly, n: int) -> None:
    for (_e, gens), _c in p.terms.items():
        lvl = cov_monomial_level(gens)
        if lvl != n:
            raise AssertionError(f"monomial level {lvl} != {n}: {gens}")


# ---------------------------------------------------------------------------
# canonical forms


def _first_descent(t):
    for q in range(len(t) - 1):
        if t[q] > t[q + 1]:
            return q
    return None


def _body_sign_normal(body):
    """Order the four body slots by the sign symmetries.

    Returns (sign, body); sign 0 when a pair repeats an index.
    """
    i, j, k, l = body
    sign = 1
    if i == j or k == l:
        return 0, body
    if i > j:
        i, j = j, i
        sign = -sign
    if k > l:
        k, l = l, k
        sign = -sign
    if (k, l) < (i, j):
        i, j, k, l = k, l, i, j
    return sign, (i, j, k, l)


class CovCalc:
    """Canonical forms for one dimension, with caching.

    The optional riemann argument replaces the free curvature generators in
    commutator corrections by an arbitrary component expression; the
    conformally flat engine passes the trace-adjusted rank-two expansion
    there so no free four-index generator ever appears.
    """

    def __init__(self, n: int, riemann=None):
        self.n = n
        self._riemann = riemann
        self._canon: dict = {}
        self._elim: dict = {}

    def riemann_component(self, i: int, j: int, k: int, l: int) -> MultiPoly:
        if self._riemann is not None:
            return self._riemann(i, j, k, l)
        return MultiPoly.from_gen(self.n, curv_gen((i, j, k, l)))

    # -- generator normal forms -----------------------------------------

    def canonical_gen(self, gen) -> MultiPoly:
        got = self._canon.get(gen)
        if got is not None:
            return got
        kind = gen[0]
        if kind == "cjet":
            out = self._canon_cjet(gen)
        elif kind == "crv":
            out = self._canon_crv(gen)
        elif kind == "rho":
            pair = gen[1]
            if pair[0] > pair[1]:
                out = MultiPoly.from_gen(self.n,
                                         ("rho", (pair[1], pair[0]), gen[2]))
            else:
                out = MultiPoly.from_gen(self.n, gen)
        else:
            out = MultiPoly.from_gen(self.n, gen)
        self._canon[gen] = out
        return out

    def canonicalize(self, p: MultiPoly) -> MultiPoly:
        acc = []
        for (exps, gens), c in p.terms.items():
            term = MultiPoly.monomial(p.nv, exps, (), c)
            for g, k in gens:
                cg = self.canonical_gen(g)
                for _ in range(k):
                    term = term * cg
            acc.append(term)
        return poly_sum(p.nv, acc)

    def _swap_correction(self, slots, rebuild, a, b, suffix) -> MultiPoly:
        """Difference of the two orders of adjacent derivatives a (inner)
        and b (outer) past the given inner slots, then the remaining outer
        derivatives applied on top."""
        acc = MultiPoly.zero(self.n)
        for s, v in enumerate(slots):
            for m in range(self.n):
                factor = self.riemann_component(m, v, a, b)
                if factor.is_zero():
                    continue
                acc = acc + factor * rebuild(s, m)
        for j in suffix:
            acc = cov_derivative(acc, j)
        return acc

    def _canon_cjet(self, gen) -> MultiPoly:
        name, string = gen[1], gen[2]
        q = _first_descent(string)
        if q is None:
            return MultiPoly.from_gen(self.n, gen)
        a, b = string[q], string[q + 1]
        prefix = string[:q]
        swapped = ("cjet", name, prefix + (b, a) + string[q + 2:])

        def rebuild(s, m):
            return MultiPoly.from_gen(
                self.n, ("cjet", name, prefix[:s] + (m,) + prefix[s + 1:]))

        corr = self._swap_correction(prefix, rebuild, a, b, string[q + 2:])
        return self.canonicalize(MultiPoly.from_gen(self.n, swapped) + corr)

    def _canon_crv(self, gen) -> MultiPoly:
        body, string = gen[1], gen[2]
        sgn, nbody = _body_sign_normal(body)
        if sgn == 0:
            return MultiPoly.zero(self.n)
        if nbody != body:
            return self.canonical_gen(("crv", nbody, string)) * sgn
        q = _first_descent(string)
        if q is not None:
            a, b = string[q], string[q + 1]
            prefix = string[:q]
            swapped = ("crv", body, prefix + (b, a) + string[q + 2:])

            def rebuild(s, m):
                if s < 4:
                    nb = body[:s] + (m,) + body[s + 1:]
                    return MultiPoly.from_gen(self.n, ("crv", nb, prefix))
                t = s - 4
                np_ = prefix[:t] + (m,) + prefix[t + 1:]
                return MultiPoly.from_gen(self.n, ("crv", body, np_))

            corr = self._swap_correction(body + prefix, rebuild, a, b,
                                         string[q + 2:])
            return self.canonicalize(MultiPoly.from_gen(self.n, swapped) + corr)
        sub = self._elim_map(tuple(sorted(body + string)), len(string))
        got = sub.get(gen)
        if got is None:
            return MultiPoly.from_gen(self.n, gen)
        return got

    # -- linear identity layer ------------------------------------------

    def _elim_map(self, multiset, p) -> dict:
        """Reduction of same-multiset curvature generators by the cyclic
        identity and, for derivative strings, the differential one.

        Solved once per (sorted index multiset, string length) by exact
        elimination; pivots are the lexicographically largest generators,
        so the surviving basis is the smallest ones.
        """
        key = (multiset, p)
        got = self._elim.get(key)
        if got is not None:
            return got
        if p > 2:
            raise NotImplementedError(
                "curvature derivative strings beyond length 2")
        n = self.n
        zero = MultiPoly.zero(n)
        rows = []

        def add_term(row, inhom, body, string, coeff):
            sgn, nb = _body_sign_normal(body)
            if sgn == 0:
                return inhom
            c = Fraction(coeff * sgn)
            qd = _first_descent(string)
            if qd is None:
                var = ("crv", nb, string)
                row[var] = row.get(var, Fraction(0)) + c
                return inhom
            # strings here have length two at most, so the descent is at
            # the front and the commutator slots are the body alone
            a, b = string[0], string[1]
            var = ("crv", nb, (b, a))
            row[var] = row.get(var, Fraction(0)) + c
            corr = zero
            for s in range(4):
                for m in range(n):
                    corr = corr + (
                        MultiPoly.from_gen(n, curv_gen((m, nb[s], a, b))) *
                        MultiPoly.from_gen(
                            n, curv_gen(nb[:s] + (m,) + nb[s + 1:])))
            return inhom + corr * c

        for pm in sorted(set(permutations(multiset))):
            i, j, k, l = pm[:4]
            rest = tuple(sorted(pm[4:]))
            row, inhom = {}, zero
            inhom = add_term(row, inhom, (i, j, k, l), rest, 1)
            inhom = add_term(row, inhom, (i, k, l, j), rest, 1)
            inhom = add_term(row, inhom, (i, l, j, k), rest, 1)
            if row or not inhom.is_zero():
                rows.append((row, inhom))
            if p >= 1:
                m = pm[4]
                outer = tuple(pm[5:])
                row, inhom = {}, zero
                inhom = add_term(row, inhom, (i, j, k, l), (m,) + outer, 1)
                inhom = add_term(row, inhom, (i, j, l, m), (k,) + outer, 1)
                inhom = add_term(row, inhom, (i, j, m, k), (l,) + outer, 1)
                if row or not inhom.is_zero():
                    rows.append((row, inhom))

        variables = sorted({v for row, _h in rows for v in row})
        col = {v: q for q, v in enumerate(variables)}
        mat = []
        for row, inhom in rows:
            vec = [Fraction(0)] * len(variables)
            for v, c in row.items():
                vec[col[v]] = c
            mat.append((vec, self.canonicalize(inhom)))

        pivots = {}
        for c_idx in range(len(variables) - 1, -1, -1):
            sel = None
            for r_idx, (vec, _h) in enumerate(mat):
                if r_idx in pivots.values():
                    continue
                if vec[c_idx] != 0 and all(vec[q] == 0
                                           for q in pivots):
                    sel = r_idx
                    break
            if sel is None:
                continue
            vec, inhom = mat[sel]
            pv = vec[c_idx]
            vec = [x / pv for x in vec]
            inhom = inhom * (Fraction(1) / pv)
            mat[sel] = (vec, inhom)
            for r_idx in range(len(mat)):
                if r_idx == sel:
                    continue
                ov, oh = mat[r_idx]
                f = ov[c_idx]
                if f == 0:
                    continue
                nv_ = [x - f * y for x, y in zip(ov, vec)]
                mat[r_idx] = (nv_, oh - inhom * f)
            pivots[c_idx] = sel

        for r_idx, (vec, inhom) in enumerate(mat):
            if all(x == 0 for x in vec) and not inhom.is_zero():
                raise AssertionError(
                    "inconsistent curvature identity rows; a commutator "
                    "sign is wrong")

        sub: dict = {}
        for c_idx, r_idx in pivots.items():
            vec, inhom = mat[r_idx]
            expr = -inhom
            for q, x in enumerate(vec):
                if q == c_idx or x == 0:
                    continue
                expr = expr - MultiPoly.from_gen(n, variables[q]) * x
            sub[variables[c_idx]] = expr
        self._elim[key] = sub
        return sub

    # -- derived curvature components -----------------------------------

    def ricci_component(self, i: int, j: int) -> MultiPoly:
        return poly_sum(self.n, [self.canonical_gen(curv_gen((k, i, k, j)))
                                 for k in range(self.n)])

    def scalar_curvature(self) -> MultiPoly:
        return poly_sum(self.n, [self.ricci_component(i, i)
                                 for i in range(self.n)])

    def normalized_scalar(self) -> MultiPoly:
        """Scalar curvature divided by 2(n-1)."""
        return self.scalar_curvature() * Fraction(1, 2 * (self.n - 1))

    def schouten_component(self, i: int, j: int) -> MultiPoly:
        out = self.ricci_component(i, j)
        if i == j:
            out = out - self.normalized_scalar()
        return out * Fraction(1, self.n - 2)

    def weyl_component(self, i: int, j: int, k: int, l: int) -> MultiPoly:
        """Trace-free part of the curvature, all indices down."""

        def d(a, b):
            return 1 if a == b else 0

        out = self.canonical_gen(curv_gen((i, j, k, l)))
        if d(i, l):
            out = out + self.schouten_component(j, k)
        if d(i, k):
            out = out - self.schouten_component(j, l)
        if d(j, k):
            out = out + self.schouten_component(i, l)
        if d(j, l):
            out = out - self.schouten_component(i, k)
        return out


# ---------------------------------------------------------------------------
# slot moves (the covariant mirror of the flat jet engine)


def _cov_slot(gens, name):
    found = None
    for g, k in gens:
        if g[0] == "cjet" and g[1] == name:
            if found is not None or k != 1:
                raise ValueError(f"monomial not linear in jets of {name!r}")
            found = g
    return found


def cov_jet_linear_in(p: MultiPoly, name: str) -> bool:
    try:
        for (_e, gens), _c in p.terms.items():
            if _cov_slot(gens, name) is None:
                return False
    except ValueError:
        return False
    return True


def cov_strip_slot(p: MultiPoly, n: int, name: str):
    """Write p = u_() * core + divergence(witness), u the named scalar.

    The outermost derivative of every jet of u moves into the witness; the
    certificate is exact at the generator level, before any
    canonicalization, because the move is the product rule verbatim.
    """
    witness = [MultiPoly.zero(p.nv) for _ in range(n)]
    bare = []
    work = p
    while not work.is_zero():
        moved = []
        for (exps, gens), c in work.terms_sorted():
            target = _cov_slot(gens, name)
            if target is None:
                raise ValueError(f"monomial without a jet of {name!r}")
            string = target[2]
            if not string:
                bare.append(MultiPoly.monomial(p.nv, exps, gens, c))
                continue
            j = string[-1]
            lower = ("cjet", name, string[:-1])
            rest = tuple((g, k) for g, k in gens if g is not target)
            lowered = MultiPoly.monomial(
                p.nv, exps, merge_gens(rest, ((lower, 1),)), c)
            witness[j] = witness[j] + lowered
            u_part = MultiPoly.from_gen(p.nv, lower, c)
            moved.append(-(u_part * cov_derivative(
                MultiPoly.monomial(p.nv, exps, rest), j)))
        work = poly_sum(p.nv, moved)
    bare_total = poly_sum(p.nv, bare)
    core = _drop_bare_cov_factor(bare_total, name)
    check = (MultiPoly.from_gen(p.nv, cov_jet(name)) * core
             + cov_divergence(witness))
    if not (check - p).is_zero():
        raise AssertionError("stripping certificate failed")
    return core, tuple(witness)


def _drop_bare_cov_factor(p: MultiPoly, name: str) -> MultiPoly:
    acc = MultiPoly.zero(p.nv)
    for (exps, gens), c in p.terms.items():
        rest = []
        seen = False
        for g, k in gens:
            if g[0] == "cjet" and g[1] == name:
                if g[2] or k != 1:
                    raise AssertionError("slot not fully stripped")
                seen = True
            else:
                rest.append((g, k))
        if not seen:
            raise AssertionError("slot factor missing")
        out = ()
        for g, k in rest:
            out = merge_gens(out, ((g, k),))
        acc = acc + MultiPoly.monomial(p.nv, exps, out, c)
    return acc


def cov_substitute_product(p: MultiPoly, name: str, aname: str,
                           bname: str) -> MultiPoly:
    """Jets of `name` become jets of a product: the derivation property
    splits an ordered string over all order-preserving subdivisions."""
    nv = p.nv
    out = []
    for (exps, gens), c in p.terms.items():
        target = _cov_slot(gens, name)
        rest = tuple((g, k) for g, k in gens if g is not target)
        base = MultiPoly.monomial(nv, exps, rest, c)
        if target is None:
            out.append(base)
            continue
        string = target[2]
        pieces = []
        for mask in range(1 << len(string)):
            left = tuple(v for q, v in enumerate(string) if mask >> q & 1)
            right = tuple(v for q, v in enumerate(string)
                          if not (mask >> q & 1))
            pieces.append(MultiPoly.from_gen(nv, cov_jet(aname, left)) *
                          MultiPoly.from_gen(nv, cov_jet(bname, right)))
        out.append(base * poly_sum(nv, pieces))
    return poly_sum(nv, out)


# ---------------------------------------------------------------------------
# verification mirrors


def cov_ibp_to_operator(calc: CovCalc, B: MultiPoly, fname: str = "f",
                        hname: str = "h"):
    """Strip the first slot: B = f * (operator acting on h) + divergence.

    The operator comes back unreduced so it can feed another strip; see
    the module notes on index completeness.
    """
    if not (cov_jet_linear_in(B, fname) and cov_jet_linear_in(B, hname)):
        raise ValueError("input is not bilinear in the two scalars")
    core, witness = cov_strip_slot(B, calc.n, fname)
    return core, witness


def cov_check_identity_vi(calc: CovCalc, P: MultiPoly, B: MultiPoly,
                          fname: str = "f", hname: str = "h"):
    nv = P.nv
    f0 = MultiPoly.from_gen(nv, cov_jet(fname))
    h0 = MultiPoly.from_gen(nv, cov_jet(hname))
    expr = (cov_substitute_product(P, hname, fname, hname)
            - f0 * P - h0 * cov_rename(P, hname, fname) + B * 2)
    expr = calc.canonicalize(expr)
    return expr.is_zero(), expr


def cov_check_selfadjoint(calc: CovCalc, P: MultiPoly, fname: str = "f",
                          hname: str = "h"):
    nv = P.nv
    f0 = MultiPoly.from_gen(nv, cov_jet(fname))
    h0 = MultiPoly.from_gen(nv, cov_jet(hname))
    expr = f0 * P - h0 * cov_rename(P, hname, fname)
    core, witness = cov_strip_slot(expr, calc.n, fname)
    defect = calc.canonicalize(core)
    return defect.is_zero(), witness, defect


def cov_extract_divergence_form(calc: CovCalc, P: MultiPoly,
                                hname: str = "h"):
    """P(h) itself as a divergence, with no zeroth-order term allowed."""
    for (_e, gens), _c in P.terms.items():
        for g, _k in gens:
            if g[0] == "cjet" and g[1] == hname and not g[2]:
                raise DecompositionError("operator has a zeroth-order term")
    core, witness = cov_strip_slot(P, calc.n, hname)
    defect = calc.canonicalize(core)
    ok = defect.is_zero()
    s_leading = None
    if ok:
        spike = witness[0].coefficient(
            (0,) * P.nv, ((cov_jet(hname, (0,) * (calc.n - 1)), 1),))
        s_leading = spike.real_fraction()
    return ok, witness, defect, s_leading
