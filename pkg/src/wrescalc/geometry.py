"""Exact polynomial metric models around a base point.

A model is a symmetric matrix of polynomials in the position variables
with the identity as value at the origin; coefficients may be rational or
formal generators.  The inverse, the connection, the curvature and
iterated covariant derivatives at the origin all come out of truncated
series arithmetic, exact for every jet the declared order supports.

Models play two roles.  The structured expansions (curvature normal form,
conformal factor) feed the curved operator pipeline, and randomly drawn
models are the ground truth against which every canonicalization rule of
the covariant calculus is validated: curvature values produced here
satisfy the symmetries and both curvature identities automatically, which
free generator assignments would not.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from .covariant import CovCalc, _body_sign_normal, curv_gen
from .multiindex import enumerate_up_to, taylor_coefficient
from .polyring import MultiPoly, jet_gen, poly_sum
from .rationals import QI


def substitute_gens(p: MultiPoly, fn) -> MultiPoly:
    """Replace generators by polynomials; fn returns None to keep one."""
    acc = []
    for (exps, gens), c in p.terms.items():
        term = MultiPoly.monomial(p.nv, exps, (), c)
        for g, k in gens:
            val = fn(g)
            if val is None:
                val = MultiPoly.from_gen(p.nv, g)
            for _ in range(k):
                term = term * val
        acc.append(term)
    return poly_sum(p.nv, acc)


def formal_scalar(n: int, name: str, order: int) -> MultiPoly:
    """Taylor polynomial with formal partial jets as coefficients."""
    acc = []
    for beta in enumerate_up_to(n, order):
        exps = tuple(beta)
        acc.append(MultiPoly.monomial(
            n, exps, ((jet_gen(name, beta), 1),), taylor_coefficient(beta)))
    return poly_sum(n, acc)


class MetricModel:
    """Polynomial metric with exact series for the derived objects.

    entries maps (i, j) with i <= j to the metric component as a
    polynomial in the n position variables; order is the truncation
    degree kept in every derived series.
    """

    def __init__(self, n: int, entries: dict, order: int):
        self.n = n
        self.order = order
        g = {}
        for i in range(n):
            for j in range(n):
                p = entries.get((min(i, j), max(i, j)))
                g[(i, j)] = MultiPoly.zero(n) if p is None else p
        for (i, j), p in g.items():
            want = QI.of(1 if i == j else 0)
            for (exps, gens), c in p.terms.items():
                if any(exps):
                    continue
                if gens or not (c - want).is_zero():
                    raise ValueError("metric must be the identity at the origin")
                want = QI.of(0)
            if not want.is_zero():
                raise ValueError("metric must be the identity at the origin")
        self.g = g
        self._ginv = None
        self._gamma: dict = {}
        self._riem_up: dict = {}
        self._riem_low: dict = {}

    def _trunc(self, p: MultiPoly, order=None) -> MultiPoly:
        if order is None:
            order = self.order
        return p.truncate_positions(range(self.n), order)

    # -- inverse metric by the geometric series -------------------------

    def inverse(self, i: int, j: int) -> MultiPoly:
        if self._ginv is None:
            n = self.n
            ident = {(a, b): MultiPoly.const(n, 1 if a == b else 0)
                     for a in range(n) for b in range(n)}
            h = {(a, b): self.g[(a, b)] - (1 if a == b else 0)
                 for a in range(n) for b in range(n)}
            total = dict(ident)
            term = ident
            for _ in range(self.order):
                nxt = {}
                alive = False
                for a in range(n):
                    for b in range(n):
                        s = MultiPoly.zero(n)
                        for c in range(n):
                            s = s - term[(a, c)] * h[(c, b)]
                        s = self._trunc(s)
                        nxt[(a, b)] = s
                        alive = alive or not s.is_zero()
                term = nxt
                if not alive:
                    break
                for k in total:
                    total[k] = total[k] + term[k]
            self._ginv = total
        return self._ginv[(i, j)]

    def christoffel(self, k: int, i: int, j: int) -> MultiPoly:
        key = (k, min(i, j), max(i, j))
        got = self._gamma.get(key)
        if got is None:
            n = self.n
            acc = MultiPoly.zero(n)
            for l in range(n):
                acc = acc + self.inverse(k, l) * (
                    self.g[(j, l)].diff_var(i)
                    + self.g[(i, l)].diff_var(j)
                    - self.g[(i, j)].diff_var(l))
            got = self._trunc(acc * Fraction(1, 2))
            self._gamma[key] = got
        return got

    def riemann_up(self, m: int, j: int, k: int, l: int) -> MultiPoly:
        # antisymmetric in the derivative pair; memoized on k < l
        if k == l:
            return MultiPoly.zero(self.n)
        if k > l:
            return -self.riemann_up(m, j, l, k)
        got = self._riem_up.get((m, j, k, l))
        if got is None:
            # the connection is exact to self.order, so its derivative and
            # therefore the curvature series stop one order earlier
            cut = self.order - 1
            acc = (self.christoffel(m, l, j).diff_var(k)
                   - self.christoffel(m, k, j).diff_var(l))
            for a in range(self.n):
                u = self._trunc(self.christoffel(m, k, a), cut)
                v = self._trunc(self.christoffel(m, l, a), cut)
                acc = acc + u * self._trunc(self.christoffel(a, l, j), cut)
                acc = acc - v * self._trunc(self.christoffel(a, k, j), cut)
            got = self._trunc(acc, cut)
            self._riem_up[(m, j, k, l)] = got
        return got

    def _riemann_low_raw(self, i: int, j: int, k: int, l: int) -> MultiPoly:
        acc = MultiPoly.zero(self.n)
        for m in range(self.n):
            acc = acc + self.g[(i, m)] * self.riemann_up(m, j, k, l)
        return self._trunc(acc)

    def riemann_low(self, i: int, j: int, k: int, l: int) -> MultiPoly:
        # the pointwise symmetries cut the distinct computations; the raw
        # path stays available so tests can confirm them on the model
        sgn, nb = _body_sign_normal((i, j, k, l))
        if sgn == 0:
            return MultiPoly.zero(self.n)
        got = self._riem_low.get(nb)
        if got is None:
            got = self._riemann_low_raw(*nb)
            self._riem_low[nb] = got
        return got * sgn if sgn != 1 else got

    # -- iterated covariant derivatives ---------------------------------

    def cov_extend(self, comps: dict, rank: int, order: int) -> dict:
        """Append one covariant derivative: component fields of a rank-r
        tensor become the rank r+1 fields, new slot last.

        The result is truncated at the given x-order; inputs exact to
        order+1 make it exact to that order, and the connection series is
        cut to match before multiplying.
        """
        n = self.n
        gam = {}
        for m in range(n):
            for a in range(n):
                for b in range(a, n):
                    p = self._trunc(self.christoffel(m, a, b), order)
                    if not p.is_zero():
                        gam[(m, a, b)] = p
        out = {}
        for c in product(range(n), repeat=rank):
            base = comps[c]
            for a in range(n):
                p = base.diff_var(a)
                for q in range(rank):
                    for m in range(n):
                        cg = gam.get((m, min(a, c[q]), max(a, c[q])))
                        if cg is None:
                            continue
                        p = p - cg * comps[c[:q] + (m,) + c[q + 1:]]
                out[c + (a,)] = self._trunc(p, order)
        return out

    def at_origin(self, p: MultiPoly) -> MultiPoly:
        return p.set_positions_zero(range(self.n))

    def scalar_cov_jets(self, f: MultiPoly, max_len: int) -> dict:
        """Ordered-string covariant jets of the scalar at the origin."""
        comps = {(): self._trunc(f, max_len)}
        out = {(): self.at_origin(f)}
        for r in range(max_len):
            comps = self.cov_extend(comps, r, max_len - r - 1)
            for c, val in comps.items():
                out[c] = self.at_origin(val)
        return out

    def riemann_cov_jets(self, max_len: int) -> dict:
        """Values at the origin for every curvature generator with a
        derivative string of length at most max_len, keyed by generator."""
        n = self.n
        comps = {c: self._trunc(self.riemann_low(*c), max_len)
                 for c in product(range(n), repeat=4)}
        out = {curv_gen(c): self.at_origin(p) for c, p in comps.items()}
        for r in range(max_len):
            comps = self.cov_extend(comps, 4 + r, max_len - r - 1)
            for c, val in comps.items():
                out[curv_gen(c[:4], c[4:])] = self.at_origin(val)
        return out


# ---------------------------------------------------------------------------
# model constructors


def random_metric_model(n: int, rng, degree: int = 4,
                        spread: int = 3) -> MetricModel:
    """Identity plus a random rational perturbation vanishing at 0.

    First-order terms are allowed, so nothing here secretly assumes
    normal coordinates.
    """
    entries = {}
    for i in range(n):
        for j in range(i, n):
            acc = [MultiPoly.const(n, 1 if i == j else 0)]
            for beta in enumerate_up_to(n, degree):
                if sum(beta) == 0:
                    continue
                num = rng.randint(-spread, spread)
                if num == 0:
                    continue
                den = rng.randint(1, 4) * 3
                acc.append(MultiPoly.monomial(n, tuple(beta), (),
                                              Fraction(num, den)))
            entries[(i, j)] = poly_sum(n, acc)
    return MetricModel(n, entries, degree)


NORMAL_FORM_QUADRATIC = Fraction(-1, 3)


def curvature_normal_metric(calc: CovCalc) -> MetricModel:
    """Metric whose quadratic term is the canonical curvature generators.

    The coefficient is pinned by the round-trip below: recomputing the
    curvature of the model at the origin must return exactly the
    generators fed in.  A wrong constant or a wrong sign convention fails
    loudly here, not downstream.
    """
    n = calc.n
    entries = {}
    for i in range(n):
        for j in range(i, n):
            acc = [MultiPoly.const(n, 1 if i == j else 0)]
            for k in range(n):
                for l in range(n):
                    compo = calc.canonical_gen(curv_gen((i, k, j, l)))
                    if compo.is_zero():
                        continue
                    exps = tuple((1 if q == k else 0) + (1 if q == l else 0)
                                 for q in range(n))
                    acc.append(compo * MultiPoly.monomial(
                        n, exps, (), NORMAL_FORM_QUADRATIC))
            entries[(i, j)] = poly_sum(n, acc)
    model = MetricModel(n, entries, 2)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    back = model.at_origin(model.riemann_low(i, j, k, l))
                    want = calc.canonical_gen(curv_gen((i, j, k, l)))
                    if not (back - want).is_zero():
                        raise AssertionError(
                            "normal-form quadratic coefficient does not "
                            "reproduce the curvature generators")
    return model


def conformal_metric(n: int, order: int = 2) -> MetricModel:
    """Conformally flat metric exp(2 eta) times the identity, with the
    jets of eta at the origin as formal generators and eta(0) = 0."""
    eta = formal_scalar(n, "eta", order) - MultiPoly.from_gen(
        n, jet_gen("eta", (0,) * n))
    expfac = MultiPoly.const(n, 1)
    power = MultiPoly.const(n, 1)
    fact = 1
    for k in range(1, order + 1):
        power = power * (eta * 2)
        power = power.truncate_positions(range(n), order)
        fact *= k
        expfac = expfac + power * Fraction(1, fact)
    entries = {}
    for i in range(n):
        for j in range(i, n):
            entries[(i, j)] = expfac if i == j else MultiPoly.zero(n)
    return MetricModel(n, entries, order)


# ---------------------------------------------------------------------------
# exchanging partial and covariant jets at the origin


def cov_jets_in_partials(model: MetricModel, name: str, max_len: int) -> dict:
    """Ordered-string covariant jets of a formal scalar, written in its
    partial jets and the model's coefficient generators."""
    return model.scalar_cov_jets(formal_scalar(model.n, name, max_len),
                                 max_len)


def partial_jets_in_cov(model: MetricModel, name: str, max_order: int) -> dict:
    """Inverse direction: each partial jet as a polynomial in covariant
    jets with sorted strings.  Triangular by jet order, since the leading
    term of a covariant jet is the matching partial one."""
    n = model.n
    cov = cov_jets_in_partials(model, name, max_order)
    table: dict = {}
    for beta in sorted(enumerate_up_to(n, max_order), key=sum):
        beta = tuple(beta)
        string = []
        for q, e in enumerate(beta):
            string.extend([q] * e)
        string = tuple(string)
        lead = jet_gen(name, beta)
        rest = cov[string] - MultiPoly.from_gen(n, lead)

        def fn(g):
            if g[0] == "jet" and g[1] == name:
                return table[g[2]]
            return None

        table[beta] = (MultiPoly.from_gen(n, ("cjet", name, string))
                       - substitute_gens(rest, fn))
    return table
