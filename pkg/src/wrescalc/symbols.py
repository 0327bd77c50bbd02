"""Graded symbol calculus for classical pseudodifferential operators.

A homogeneous component is a matrix of polynomials over a denominator that
is a power of the squared covector norm, so everything stays exact.  The
degree bookkeeping is explicit: a component of degree d has numerator
xi-degree d + 2s where s is the denominator power.

Coordinate dependence is carried as a truncated Taylor expansion around a
single base point.  Each component records how many coordinate orders of
that expansion are trustworthy (`jet_order`); operations propagate the
bound and refuse to produce output that would need data beyond it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .forms import FormMatrix
from .multiindex import (enumerate_multiindices, mi_add, mi_degree,
                         mi_factorial, zero_index)
from .polyring import MultiPoly, jet_gen
from .rationals import QI

EXACT = 10 ** 9          # sentinel jet order for coordinate-exact data


class TruncationError(RuntimeError):
    """Raised when a requested output would read past retained data."""


@dataclass(frozen=True)
class SymbolContext:
    """Variable layout and denominator for one family of symbols."""

    n: int
    nv: int
    xi: tuple
    x: tuple | None
    norm_sq: MultiPoly
    norm_sq_dxi: tuple = field(default=None)
    norm_sq_dx: tuple = field(default=None)

    def __post_init__(self):
        if self.norm_sq_dxi is None:
            object.__setattr__(self, "norm_sq_dxi",
                               tuple(self.norm_sq.diff_var(self.xi[j])
                                     for j in range(self.n)))
        if self.norm_sq_dx is None:
            if self.x is None:
                dx = tuple(MultiPoly.zero(self.nv) for _ in range(self.n))
            else:
                dx = tuple(self.norm_sq.diff_var(self.x[j]) +
                           self.norm_sq.diff_jets(j)
                           for j in range(self.n))
            object.__setattr__(self, "norm_sq_dx", dx)

    def poly_dx(self, p: MultiPoly, j: int) -> MultiPoly:
        """Coordinate derivative: explicit coordinate powers plus jets."""
        out = p.diff_jets(j)
        if self.x is not None:
            out = out + p.diff_var(self.x[j])
        return out

    def truncate(self, p: MultiPoly, jet_order: int) -> MultiPoly:
        if self.x is None or jet_order >= EXACT:
            return p
        if jet_order < 0:
            return MultiPoly.zero(self.nv)
        return p.truncate_positions(self.x, jet_order)


def flat_context(n: int) -> SymbolContext:
    norm = MultiPoly.zero(n)
    for j in range(n):
        norm = norm + MultiPoly.var(n, j, 2)
    return SymbolContext(n=n, nv=n, xi=tuple(range(n)), x=None, norm_sq=norm)


class HomogSymbol:
    """One homogeneous component: numerator matrix over norm_sq^denom_pow."""

    __slots__ = ("ctx", "mat", "denom_pow", "degree", "jet_order")

    def __init__(self, ctx: SymbolContext, mat: FormMatrix, denom_pow: int,
                 degree: int, jet_order: int = EXACT):
        self.ctx = ctx
        self.mat = mat
        self.denom_pow = denom_pow
        self.degree = degree
        self.jet_order = jet_order

    @staticmethod
    def zero(ctx: SymbolContext, rows: int, cols: int, degree: int,
             jet_order: int = EXACT) -> "HomogSymbol":
        return HomogSymbol(ctx, FormMatrix.zero(rows, cols, ctx.nv), 0,
                           degree, jet_order)

    @staticmethod
    def identity(ctx: SymbolContext, dim: int, jet_order: int = EXACT) -> "HomogSymbol":
        return HomogSymbol(ctx, FormMatrix.identity(dim, ctx.nv), 0, 0, jet_order)

    def is_zero(self) -> bool:
        return self.mat.is_zero()

    @property
    def rows(self) -> int:
        return self.mat.rows

    @property
    def cols(self) -> int:
        return self.mat.cols

    def copy_with(self, mat=None, denom_pow=None, degree=None, jet_order=None):
        return HomogSymbol(self.ctx,
                           self.mat if mat is None else mat,
                           self.denom_pow if denom_pow is None else denom_pow,
                           self.degree if degree is None else degree,
                           self.jet_order if jet_order is None else jet_order)

    # ---- calculus -----------------------------------------------------

    def dxi(self, j: int) -> "HomogSymbol":
        ctx = self.ctx
        pos = ctx.xi[j]
        if self.denom_pow == 0:
            mat = self.mat.map_entries(lambda p: p.diff_var(pos))
            return self.copy_with(mat=mat, degree=self.degree - 1)
        s = self.denom_pow
        dq = ctx.norm_sq_dxi[j]
        q = ctx.norm_sq

        def step(p: MultiPoly) -> MultiPoly:
            out = p.diff_var(pos) * q - (p * dq) * s
            return ctx.truncate(out, self.jet_order)

        mat = self.mat.map_entries(step)
        return self.copy_with(mat=mat, denom_pow=s + 1, degree=self.degree - 1)

    def dx(self, j: int) -> "HomogSymbol":
        """Plain coordinate derivative (no (-i) factor)."""
        ctx = self.ctx
        new_jet = self.jet_order if self.jet_order >= EXACT else self.jet_order - 1
        if new_jet < 0:
            raise TruncationError("coordinate derivative exceeds retained jet order")
        s = self.denom_pow
        dq = ctx.norm_sq_dx[j]
        if s == 0 or dq.is_zero():
            mat = self.mat.map_entries(
                lambda p: ctx.truncate(ctx.poly_dx(p, j), new_jet))
            return self.copy_with(mat=mat, jet_order=new_jet)
        q = ctx.norm_sq

        def step(p: MultiPoly) -> MultiPoly:
            out = ctx.poly_dx(p, j) * q - (p * dq) * s
            return ctx.truncate(out, new_jet)

        mat = self.mat.map_entries(step)
        return self.copy_with(mat=mat, denom_pow=s + 1, jet_order=new_jet)

    def dxi_multi(self, gamma) -> "HomogSymbol":
        out = self
        for j, e in enumerate(gamma):
            for _ in range(e):
                out = out.dxi(j)
        return out

    def d_coords(self, alpha) -> "HomogSymbol":
        """D^alpha = (-i)^{|alpha|} times the coordinate partials."""
        out = self
        for j, e in enumerate(alpha):
            for _ in range(e):
                out = out.dx(j)
        k = mi_degree(tuple(alpha))
        if k % 4:
            out = out.scale(QI.minus_i_power(k))
        return out

    # ---- algebra ------------------------------------------------------

    def scale(self, c) -> "HomogSymbol":
        return self.copy_with(mat=self.mat.scale(c))

    def scale_poly(self, p: MultiPoly, xi_deg: int = 0) -> "HomogSymbol":
        jet = self.jet_order
        mat = self.mat.map_entries(lambda q: self.ctx.truncate(q * p, jet))
        return self.copy_with(mat=mat, degree=self.degree + xi_deg)

    def mul(self, other: "HomogSymbol") -> "HomogSymbol":
        if self.ctx is not other.ctx:
            raise ValueError("context mismatch")
        jet = min(self.jet_order, other.jet_order)
        mat = (self.mat @ other.mat).map_entries(lambda p: self.ctx.truncate(p, jet))
        return HomogSymbol(self.ctx, mat, self.denom_pow + other.denom_pow,
                           self.degree + other.degree, jet)

    def add(self, other: "HomogSymbol") -> "HomogSymbol":
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch {self.degree} vs {other.degree}")
        jet = min(self.jet_order, other.jet_order)
        a, b = self, other
        if a.denom_pow != b.denom_pow:
            if a.denom_pow < b.denom_pow:
                a, b = b, a
            lift = a.ctx.norm_sq ** (a.denom_pow - b.denom_pow)
            b = b.copy_with(mat=b.mat.map_entries(lambda p: p * lift),
                            denom_pow=a.denom_pow)
        mat = (a.mat + b.mat).map_entries(lambda p: self.ctx.truncate(p, jet))
        return HomogSymbol(self.ctx, mat, a.denom_pow, self.degree, jet)

    def sub(self, other: "HomogSymbol") -> "HomogSymbol":
        return self.add(other.scale(-1))

    def at_base_point(self) -> "HomogSymbol":
        """Set all explicit coordinates to zero (jets and gens untouched)."""
        if self.jet_order < 0:
            raise TruncationError("no valid data at the base point")
        ctx = self.ctx
        if ctx.x is None:
            return self
        mat = self.mat.map_entries(lambda p: p.set_positions_zero(ctx.x))
        return self.copy_with(mat=mat)

    def equals(self, other: "HomogSymbol") -> bool:
        """Exact equality as rational symbols (cross-multiplied)."""
        if self.degree != other.degree:
            return False
        a, b = self, other
        q = self.ctx.norm_sq
        if a.denom_pow < b.denom_pow:
            a, b = b, a
        lift = q ** (a.denom_pow - b.denom_pow)
        return (a.mat - b.mat.map_entries(lambda p: p * lift)).is_zero()

    def check_homogeneity(self) -> None:
        """Assert every numerator entry has the declared xi-degree."""
        want = self.degree + 2 * self.denom_pow
        xi = self.ctx.xi
        for (_rc, p) in self.mat.data.items():
            for (exps, _g) in p.terms:
                d = sum(exps[q] for q in xi)
                if d != want:
                    raise AssertionError(
                        f"entry xi-degree {d} != declared {want}")

    def __repr__(self):
        return (f"HomogSymbol(deg={self.degree}, s={self.denom_pow}, "
                f"{self.mat.rows}x{self.mat.cols}, jet={self.jet_order})")


class GradedSymbol:
    """Finite stack of homogeneous components of a classical symbol."""

    __slots__ = ("ctx", "comps", "top", "floor", "exact_below")

    def __init__(self, ctx: SymbolContext, comps: dict, top: int, floor: int,
                 exact_below: bool = False):
        self.ctx = ctx
        self.comps = comps
        self.top = top
        self.floor = floor
        self.exact_below = exact_below

    def component(self, d: int) -> HomogSymbol | None:
        if d in self.comps:
            return self.comps[d]
        if d < self.floor and not self.exact_below:
            raise TruncationError(f"component {d} below retained floor {self.floor}")
        return None

    def degrees(self):
        return sorted(self.comps.keys(), reverse=True)

    def __repr__(self):
        return (f"GradedSymbol(top={self.top}, floor={self.floor}, "
                f"degrees={self.degrees()})")


def compose(a: GradedSymbol, b: GradedSymbol, floor: int) -> GradedSymbol:
    """Symbol of the operator product, complete down to `floor`.

    Refuses to run when either factor's retained floor cannot support every
    contribution, unless that factor is exactly zero below its floor.
    """
    if a.ctx is not b.ctx:
        raise ValueError("context mismatch")
    if not a.exact_below and a.floor > floor - b.top:
        raise TruncationError(
            f"left factor floor {a.floor} too shallow for output floor {floor}")
    if not b.exact_below and b.floor > floor - a.top:
        raise TruncationError(
            f"right factor floor {b.floor} too shallow for output floor {floor}")
    n = a.ctx.n
    out: dict = {}
    dx_chains = {db: {zero_index(n): b.comps[db]} for db in b.degrees()}
    for da in a.degrees():
        fa = a.comps[da]
        # Chains of xi-derivatives of fa, built once per order.
        dxi_chain = {zero_index(n): fa}
        for db in b.degrees():
            kmax = da + db - floor
            if kmax < 0:
                continue
            dx_chain = dx_chains[db]
            for k in range(0, kmax + 1):
                g = da + db - k
                for alpha in enumerate_multiindices(n, k):
                    if alpha not in dxi_chain:
                        j = next(i for i, e in enumerate(alpha) if e > 0)
                        parent = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
                        dxi_chain[alpha] = dxi_chain[parent].dxi(j)
                    if alpha not in dx_chain:
                        j = next(i for i, e in enumerate(alpha) if e > 0)
                        parent = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
                        dx_chain[alpha] = dx_chain[parent].dx(j)
                    left = dxi_chain[alpha]
                    right = dx_chain[alpha]
                    if left.is_zero() or right.is_zero():
                        continue
                    term = left.mul(right)
                    w = QI.minus_i_power(k) * Fraction(1, mi_factorial(alpha))
                    term = term.scale(w)
                    got = out.get(g)
                    out[g] = term if got is None else got.add(term)
    out = {g: h for g, h in out.items() if not h.is_zero()}
    top = max(out.keys(), default=a.top + b.top)
    return GradedSymbol(a.ctx, out, top, floor, exact_below=False)


def multiply_by_function(s: GradedSymbol, fname: str) -> GradedSymbol:
    """Symbol of f o S for a formal scalar function: plain left multiple."""
    f = MultiPoly.from_gen(s.ctx.nv, jet_gen(fname, zero_index(s.ctx.n)))
    comps = {d: h.scale_poly(f) for d, h in s.comps.items()}
    return GradedSymbol(s.ctx, comps, s.top, s.floor, s.exact_below)


def commutator_with_function(s: GradedSymbol, fname: str, floor: int) -> GradedSymbol:
    """Symbol of [S, f] down to `floor`: the order drops by one and every
    component pairs a jet of f with a covector derivative of S."""
    n = s.ctx.n
    if not s.exact_below and s.floor > floor + 1:
        raise TruncationError("source symbol too shallow for requested floor")
    out: dict = {}
    for ds in s.degrees():
        base = s.comps[ds]
        chain = {zero_index(n): base}
        kmax = ds - floor
        for k in range(1, kmax + 1):
            for beta in enumerate_multiindices(n, k):
                j = next(i for i, e in enumerate(beta) if e > 0)
                parent = beta[:j] + (beta[j] - 1,) + beta[j + 1:]
                if parent not in chain:
                    continue
                chain[beta] = chain[parent].dxi(j)
                d = ds - k
                jet = MultiPoly.from_gen(s.ctx.nv, jet_gen(fname, beta))
                w = QI.minus_i_power(k) * Fraction(1, mi_factorial(beta))
                term = chain[beta].scale_poly(jet).scale(w)
                if term.is_zero():
                    continue
                got = out.get(d)
                out[d] = term if got is None else got.add(term)
    out = {g: h for g, h in out.items() if not h.is_zero()}
    return GradedSymbol(s.ctx, out, s.top - 1, floor, exact_below=False)


def residue_component_of_product(s: GradedSymbol, fname: str, hname: str,
                                 n: int) -> HomogSymbol:
    """Degree -n component of [S, f][S, h], assembled from the closed-form
    double sum rather than by composing commutators.

    The result is matrix valued; its numerator entries are polynomials in
    the covector, jets of the two scalars, and whatever generators the
    symbol family carries.  Factors are collapsed to the base point as soon
    as no further coordinate derivative can reach them, so the assembled
    component is only meaningful there; the downstream cosphere average
    evaluates at the base point anyway.
    """
    ctx = s.ctx
    k_top = s.top
    budget = n + 2 * k_top
    if not s.exact_below and s.floor > k_top - budget + 2:
        raise TruncationError(
            f"need components down to degree {k_top - budget + 2}, "
            f"retained floor is {s.floor}")

    # First factor pieces: xi-derivative of a component, then base handling
    # by the caller.  Memoised by (i, gamma).
    m1_cache: dict = {}

    def m1(i: int, gamma) -> HomogSymbol | None:
        key = (i, gamma)
        if key in m1_cache:
            return m1_cache[key]
        if mi_degree(gamma) == 0:
            comp = s.component(k_top - i)
            if comp is not None:
                comp = comp.at_base_point()
            m1_cache[key] = comp
            return comp
        j = next(q for q, e in enumerate(gamma) if e > 0)
        parent = gamma[:j] + (gamma[j] - 1,) + gamma[j + 1:]
        p = m1(i, parent)
        val = None if p is None else p.dxi(j).at_base_point()
        m1_cache[key] = val
        return val

    # Second factor pieces: coordinate D-derivatives first, then
    # xi-derivatives; memoised by (j_level, alpha_prime, delta).
    m2_cache: dict = {}

    def m2(jl: int, alpha_prime, delta) -> HomogSymbol | None:
        key = (jl, alpha_prime, delta)
        if key in m2_cache:
            return m2_cache[key]
        if mi_degree(delta) > 0:
            q = next(t for t, e in enumerate(delta) if e > 0)
            parent = delta[:q] + (delta[q] - 1,) + delta[q + 1:]
            p = m2(jl, alpha_prime, parent)
            val = None if p is None else p.at_base_point().dxi(q).at_base_point()
        elif mi_degree(alpha_prime) > 0:
            q = next(t for t, e in enumerate(alpha_prime) if e > 0)
            parent = alpha_prime[:q] + (alpha_prime[q] - 1,) + alpha_prime[q + 1:]
            p = m2(jl, parent, delta)
            val = None if p is None else p.dx(q).scale(QI.minus_i_power(1))
        else:
            val = s.component(k_top - jl)
        m2_cache[key] = val
        return val

    acc: HomogSymbol | None = None
    levels = [k_top - d for d in s.degrees()]
    for i in levels:
        for j in levels:
            deriv_budget = budget - i - j
            if deriv_budget < 2:
                continue
            for b_deg in range(1, deriv_budget):
                for d_deg in range(1, deriv_budget - b_deg + 1):
                    a_total = deriv_budget - b_deg - d_deg
                    for ap_deg in range(a_total + 1):
                        app_deg = a_total - ap_deg
                        for beta in enumerate_multiindices(n, b_deg):
                            f_poly = MultiPoly.from_gen(
                                ctx.nv, jet_gen(fname, beta))
                            f_coeff = (QI.minus_i_power(b_deg) *
                                       Fraction(1, mi_factorial(beta)))
                            for delta in enumerate_multiindices(n, d_deg):
                                for a_p in enumerate_multiindices(n, ap_deg):
                                    right = m2(j, a_p, delta)
                                    if right is None or right.is_zero():
                                        continue
                                    for a_pp in enumerate_multiindices(n, app_deg):
                                        gamma = mi_add(mi_add(a_p, a_pp), beta)
                                        left = m1(i, gamma)
                                        if left is None or left.is_zero():
                                            continue
                                        h_orders = mi_add(a_pp, delta)
                                        h_poly = MultiPoly.from_gen(
                                            ctx.nv, jet_gen(hname, h_orders))
                                        h_coeff = (
                                            QI.minus_i_power(app_deg + d_deg) *
                                            Fraction(1, mi_factorial(a_pp) *
                                                     mi_factorial(delta) *
                                                     mi_factorial(a_p)))
                                        term = left.mul(right)
                                        term = term.scale_poly(f_poly * h_poly)
                                        term = term.scale(f_coeff * h_coeff)
                                        acc = term if acc is None else acc.add(term)
    if acc is None:
        comp0 = s.comps[s.top]
        return HomogSymbol.zero(ctx, comp0.rows, comp0.cols, -n)
    if acc.degree != -n:
        raise AssertionError(f"assembled degree {acc.degree}, wanted {-n}")
    return acc
