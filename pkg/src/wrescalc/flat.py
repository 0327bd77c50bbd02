"""Flat-space engine for the residue bilinear functional on middle forms.

Two deliberately separate routes produce the same coefficient table:

* the symbol-product route works with the actual endomorphism matrices of
  the principal reflection symbol, differentiates them entrywise, and
  integrates paired traces over the sphere;

* the kernel route never touches a matrix: it starts from the closed-form
  two-point trace kernel, differentiates it as a rational function of two
  covectors, restricts to the diagonal and integrates.

Agreement of the two is a strong end-to-end check, so nothing here is
allowed to share intermediate results between them beyond the sphere
moment table.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .forms import FormMatrix, reflection_numerator
from .multiindex import (MultiIndex, enumerate_multiindices, mi_add,
                         mi_binomial, mi_degree, mi_factorial, mi_sub,
                         sub_indices, unit_index, zero_index)
from .polyring import MultiPoly, is_jet_gen
from .rationals import QI
from .sphere import integrate_residue_trace, sphere_monomial_average
from .symbols import (GradedSymbol, HomogSymbol, SymbolContext, flat_context,
                      residue_component_of_product)


def _c(a: int, k: int) -> int:
    return comb(a, k) if 0 <= k <= a else 0


# Normalization pin.  In dimension 4 the raw cosphere double sum comes out
# at exactly twice the conventional display normalization, the one under
# which the classical table reads -4, -4, -4, -2, the induced operator has
# leading coefficient 2, and the curved correction is 8 <df,dh> J.  Tables
# are stored at that normalization uniformly in n; multiply by 2 to recover
# the raw sum.  The classical six dimensional display does not sit in any
# single layer above (it equals minus the raw sum, all eight coefficients),
# so it is reproduced here only up to a global factor -2; the conventions
# block of every emitted document declares the scale.
RESIDUE_TABLE_SCALE = Fraction(1, 2)


def middle_degree(n: int) -> int:
    if n % 2:
        raise ValueError("even dimension required")
    return n // 2


# ---------------------------------------------------------------------------
# principal reflection symbol


def reflection_numerator_flat(n: int, m: int) -> FormMatrix:
    """Numerator of the degree-zero reflection symbol on m-forms.

    Dividing by the squared norm gives an involution: wedge then contract
    minus contract then wedge, against the same covector.
    """
    comp = [MultiPoly.var(n, j) for j in range(n)]
    return reflection_numerator(n, m, comp, comp)


def reflection_symbol(n: int, m: int | None = None) -> GradedSymbol:
    """Graded symbol of the flat reflection operator: a single degree-zero
    component, exactly zero below."""
    if m is None:
        m = middle_degree(n)
    ctx = flat_context(n)
    h0 = HomogSymbol(ctx, reflection_numerator_flat(n, m), 1, 0)
    return GradedSymbol(ctx, {0: h0}, top=0, floor=0, exact_below=True)


# ---------------------------------------------------------------------------
# two-point trace kernel


def pair_trace_closed_form(n: int, m: int) -> tuple[int, int]:
    """Coefficients (a, b) of the two-point trace kernel on m-forms:
    the trace of the product of reflection symbols at covectors xi, eta is

        a * <xi,eta>^2 / (|xi|^2 |eta|^2)  +  b.

    Both are integers determined by binomial counts of index overlaps.
    """
    b = _c(n - 2, m - 2) + _c(n - 2, m) - 2 * _c(n - 2, m - 1)
    a = _c(n, m) - b
    return a, b


def pair_trace_matrix(n: int, m: int) -> MultiPoly:
    """Numerator of the two-point trace kernel computed the honest way:
    assemble both endomorphism matrices and trace their product.

    Variables 0..n-1 are the components of the first covector, n..2n-1 of
    the second; the implicit denominator is |xi|^2 |eta|^2.
    """
    nv = 2 * n
    comp_xi = [MultiPoly.var(nv, j) for j in range(n)]
    comp_eta = [MultiPoly.var(nv, n + j) for j in range(n)]
    mat_xi = reflection_numerator(n, m, comp_xi, comp_xi)
    mat_eta = reflection_numerator(n, m, comp_eta, comp_eta)
    acc = MultiPoly.zero(nv)
    for (r, c), p in mat_xi.data.items():
        q = mat_eta.data.get((c, r))
        if q is not None:
            acc = acc + p * q
    return acc


def pair_trace_kernel_poly(n: int, m: int) -> MultiPoly:
    """The closed form of the kernel numerator, same layout as
    pair_trace_matrix."""
    nv = 2 * n
    a, b = pair_trace_closed_form(n, m)
    dot = MultiPoly.zero(nv)
    for j in range(n):
        dot = dot + MultiPoly.var(nv, j) * MultiPoly.var(nv, n + j)
    qx = MultiPoly.zero(nv)
    qe = MultiPoly.zero(nv)
    for j in range(n):
        qx = qx + MultiPoly.var(nv, j, 2)
        qe = qe + MultiPoly.var(nv, n + j, 2)
    return dot * dot * Fraction(a) + qx * qe * Fraction(b)


# ---------------------------------------------------------------------------
# coefficient table


@dataclass
class BilinearCoeffTable:
    """Exact coefficients of a bilinear differential expression:
    coeffs[(beta, gamma)] multiplies (d^beta f)(d^gamma h) in plain
    partial derivatives."""

    n: int
    coeffs: dict = field(default_factory=dict)

    def add(self, beta: MultiIndex, gamma: MultiIndex, val: Fraction) -> None:
        key = (beta, gamma)
        cur = self.coeffs.get(key)
        s = val if cur is None else cur + val
        if s == 0:
            self.coeffs.pop(key, None)
        else:
            self.coeffs[key] = s

    def cleaned(self) -> "BilinearCoeffTable":
        return BilinearCoeffTable(
            self.n, {k: v for k, v in self.coeffs.items() if v != 0})

    def __eq__(self, other) -> bool:
        if not isinstance(other, BilinearCoeffTable):
            return NotImplemented
        return self.n == other.n and self.cleaned().coeffs == other.cleaned().coeffs

    def transpose(self) -> "BilinearCoeffTable":
        return BilinearCoeffTable(
            self.n, {(g, b): v for (b, g), v in self.coeffs.items()})

    def is_symmetric(self) -> bool:
        return self == self.transpose()

    def sub(self, other: "BilinearCoeffTable") -> "BilinearCoeffTable":
        out = BilinearCoeffTable(self.n, dict(self.coeffs))
        for (b, g), v in other.coeffs.items():
            out.add(b, g, -v)
        return out.cleaned()

    def scale(self, c) -> "BilinearCoeffTable":
        c = Fraction(c)
        return BilinearCoeffTable(
            self.n, {k: v * c for k, v in self.coeffs.items() if v * c != 0})

    def evaluate(self, f_jets, h_jets):
        """Plug in numeric (or Fraction) jet values keyed by multi-index."""
        total = 0
        for (b, g), v in self.coeffs.items():
            fb = f_jets.get(b)
            hg = h_jets.get(g)
            if fb is None or hg is None:
                continue
            total += v * fb * hg
        return total

    def items_sorted(self):
        return sorted(self.coeffs.items(),
                      key=lambda kv: (mi_degree(kv[0][0]), kv[0][0], kv[0][1]))

    def __repr__(self):
        return f"BilinearCoeffTable(n={self.n}, {len(self.coeffs)} entries)"


def table_from_jet_poly(p: MultiPoly, n: int, fname: str = "f",
                        hname: str = "h") -> BilinearCoeffTable:
    """Decode a polynomial in jet generators of two scalars into a table."""
    out = BilinearCoeffTable(n)
    for (exps, gens), c in p.terms.items():
        if any(exps):
            raise ValueError("positional variables survived integration")
        beta = gamma = None
        for gen, power in gens:
            if not (is_jet_gen(gen) and power == 1):
                raise ValueError(f"unexpected generator {gen}^{power}")
            if gen[1] == fname:
                beta = gen[2]
            elif gen[1] == hname:
                gamma = gen[2]
            else:
                raise ValueError(f"unexpected jet of {gen[1]}")
        if beta is None or gamma is None:
            raise ValueError("monomial not bilinear in the two scalars")
        out.add(beta, gamma, c.real_fraction())
    return out.cleaned()


# ---------------------------------------------------------------------------
# integer polynomial dictionaries (fast path plumbing)
#
# A polynomial with integer coefficients is a dict {exponent tuple: int}.
# Quotient-rule steps track the denominator power implicitly.


def _nd_qstep(d: dict, j: int, s: int, nv: int, q_block: range) -> dict:
    """One covector derivative of  d / Q^s  where Q is the unit quadratic
    over q_block; returns the numerator over Q^{s+1}."""
    out: dict = {}
    for e, c in d.items():
        k = e[j]
        if k:
            ck = c * k
            base = e[:j] + (k - 1,) + e[j + 1:]
            for t in q_block:
                e2 = base[:t] + (base[t] + 2,) + base[t + 1:]
                out[e2] = out.get(e2, 0) + ck
        e3 = e[:j] + (e[j] + 1,) + e[j + 1:]
        out[e3] = out.get(e3, 0) - 2 * s * c
    return {e: c for e, c in out.items() if c}


def _nd_chain(base: dict, gamma: MultiIndex, nv: int, q_block: range,
              s0: int = 1) -> dict:
    d = base
    s = s0
    for j, rep in enumerate(gamma):
        for _ in range(rep):
            d = _nd_qstep(d, j, s, nv, q_block)
            s += 1
    return d


def _pair_sphere_integral(u: dict, v: dict, n: int) -> Fraction:
    acc = Fraction(0)
    for eu, cu in u.items():
        for ev, cv in v.items():
            w = tuple(a + b for a, b in zip(eu, ev))
            if any(x & 1 for x in w):
                continue
            acc += cu * cv * sphere_monomial_average(n, w)
    return acc


# ---------------------------------------------------------------------------
# symbol-product route


def _entry_profiles(n: int, m: int):
    """Read the assembled reflection numerator and aggregate transpose
    pairs of equal polynomial content.

    Off-diagonal entries are single monomials in two distinct covector
    components; diagonal entries are signed sums of squares.  Returns the
    multiplicity of each unordered variable pair among transpose-paired
    off-diagonal products, and the Gram matrix of diagonal weight vectors.
    """
    mat = reflection_numerator_flat(n, m)
    off: dict = {}
    diag_w: dict = {}
    for (r, c), p in mat.data.items():
        if r == c:
            w = [0] * n
            for (exps, gens), coeff in p.terms.items():
                if gens:
                    raise AssertionError("unexpected generator in symbol")
                j = next(i for i, e in enumerate(exps) if e)
                if exps[j] != 2 or sum(exps) != 2:
                    raise AssertionError("diagonal entry not a sum of squares")
                w[j] = int(coeff.real_fraction())
            diag_w[r] = tuple(w)
    for (r, c), p in mat.data.items():
        if r == c:
            continue
        items = list(p.terms.items())
        if len(items) != 1:
            raise AssertionError("off-diagonal entry not a single monomial")
        (exps, gens), coeff = items[0]
        if gens:
            raise AssertionError("unexpected generator in symbol")
        support = [i for i, e in enumerate(exps) if e]
        if len(support) != 2 or any(exps[i] != 1 for i in support):
            raise AssertionError("off-diagonal entry not a distinct pair")
        a, b = support
        partner = mat.data.get((c, r))
        if partner is None:
            continue
        ((exps2, _g2),) = tuple(partner.terms.keys())
        if exps2 != exps:
            raise AssertionError("transpose partner differs in support")
        c1 = int(coeff.real_fraction())
        c2 = int(next(iter(partner.terms.values())).real_fraction())
        key = (a, b)
        off[key] = off.get(key, 0) + c1 * c2
    gram: dict = {}
    for w in diag_w.values():
        for p_i in range(n):
            if not w[p_i]:
                continue
            for q_i in range(n):
                if w[q_i]:
                    gram[(p_i, q_i)] = gram.get((p_i, q_i), 0) + w[p_i] * w[q_i]
    # Permutation invariance of the aggregate is what licenses the orbit
    # cache below; verify it rather than assuming it.
    off_vals = set(off.values())
    if len(off_vals) > 1:
        raise AssertionError(f"off-diagonal multiplicities not uniform: {off_vals}")
    g_diag = {gram.get((p, p), 0) for p in range(n)}
    g_off = {gram.get((p, q), 0) for p in range(n) for q in range(n) if p != q}
    if len(g_diag) > 1 or len(g_off) > 1:
        raise AssertionError("diagonal Gram matrix not permutation invariant")
    return off, gram


class _TracedPairTable:
    """Sphere integrals of traced products of two derivative chains of the
    reflection symbol, cached up to simultaneous coordinate permutation."""

    def __init__(self, n: int, m: int):
        self.n = n
        self.off, self.gram = _entry_profiles(n, m)
        self.cache: dict = {}
        self.q_block = range(n)

    def value(self, gamma: MultiIndex, delta: MultiIndex) -> Fraction:
        n = self.n
        if any((a + b) & 1 for a, b in zip(gamma, delta)):
            return Fraction(0)
        k1 = tuple(sorted(zip(gamma, delta), reverse=True))
        k2 = tuple(sorted(zip(delta, gamma), reverse=True))
        key = min(k1, k2)
        got = self.cache.get(key)
        if got is not None:
            return got
        total = Fraction(0)
        for (a, b), mult in self.off.items():
            if not mult:
                continue
            base = {}
            e = [0] * n
            e[a] += 1
            e[b] += 1
            base[tuple(e)] = 1
            u = _nd_chain(base, gamma, n, self.q_block)
            v = _nd_chain(base, delta, n, self.q_block)
            total += mult * _pair_sphere_integral(u, v, n)
        sq_chain_g = {}
        sq_chain_d = {}
        for p in range(n):
            base = {tuple(2 if i == p else 0 for i in range(n)): 1}
            sq_chain_g[p] = _nd_chain(base, gamma, n, self.q_block)
            sq_chain_d[p] = _nd_chain(base, delta, n, self.q_block)
        for (p, q), w in self.gram.items():
            if w:
                total += w * _pair_sphere_integral(sq_chain_g[p],
                                                   sq_chain_d[q], n)
        self.cache[key] = total
        return total


def flat_bilinear_from_symbol_product(n: int, m: int | None = None,
                                      literal: bool = False) -> BilinearCoeffTable:
    """Coefficient table of the bilinear functional, symbol-product route.

    The fast path never materialises a matrix product: it pairs entries of
    two derivative chains across the trace and integrates term by term.
    With literal=True the generic graded-symbol machinery assembles the
    full degree -n matrix instead; it is slow and meant for cross-checks
    in low dimension.
    """
    if m is None:
        m = middle_degree(n)
    if literal:
        sym = reflection_symbol(n, m)
        res = residue_component_of_product(sym, "f", "h", n)
        jet_poly = integrate_residue_trace(res)
        return table_from_jet_poly(jet_poly, n).scale(RESIDUE_TABLE_SCALE)
    pairs = _TracedPairTable(n, m)
    sign = RESIDUE_TABLE_SCALE * (-1) ** (n // 2)
    table = BilinearCoeffTable(n)
    for b_deg in range(1, n):
        for d_deg in range(1, n - b_deg + 1):
            a_deg = n - b_deg - d_deg
            for beta in enumerate_multiindices(n, b_deg):
                fb = mi_factorial(beta)
                for alpha in enumerate_multiindices(n, a_deg):
                    fa = mi_factorial(alpha) * fb
                    gamma = mi_add(alpha, beta)
                    for delta in enumerate_multiindices(n, d_deg):
                        t = pairs.value(gamma, delta)
                        if not t:
                            continue
                        w = sign * t / (fa * mi_factorial(delta))
                        table.add(beta, mi_add(alpha, delta), w)
    return table.cleaned()


# ---------------------------------------------------------------------------
# kernel route


def flat_bilinear_from_taylor(n: int, m: int | None = None) -> BilinearCoeffTable:
    """Coefficient table of the bilinear functional, kernel route.

    Starts from the closed-form two-point trace kernel, differentiates it
    as a rational function of the two covectors (depth-first, so only one
    derivative chain is alive at a time), restricts to the diagonal,
    integrates over the sphere and scatters binomial splittings of the
    first covector's derivative block into the table.
    """
    if m is None:
        m = middle_degree(n)
    a_cf, b_cf = pair_trace_closed_form(n, m)
    nv = 2 * n
    kernel: dict = {}
    for i in range(n):
        for j in range(n):
            e = [0] * nv
            e[i] += 1
            e[j] += 1
            e[n + i] += 1
            e[n + j] += 1
            key = tuple(e)
            kernel[key] = kernel.get(key, 0) + a_cf
    for i in range(n):
        for j in range(n):
            e = [0] * nv
            e[i] = 2
            e[n + j] = 2
            key = tuple(e)
            kernel[key] = kernel.get(key, 0) + b_cf
    kernel = {e: c for e, c in kernel.items() if c}

    xi_block = range(n)
    eta_block = range(n, 2 * n)
    sign = RESIDUE_TABLE_SCALE * (-1) ** (n // 2)
    table = BilinearCoeffTable(n)

    def diagonal_integral(d: dict) -> Fraction:
        acc = Fraction(0)
        for e, c in d.items():
            w = tuple(e[i] + e[n + i] for i in range(n))
            if any(x & 1 for x in w):
                continue
            acc += c * sphere_monomial_average(n, w)
        return acc

    def scatter(beta: MultiIndex, delta: MultiIndex, d: dict) -> None:
        if all(not ((b + dd) & 1) for b, dd in zip(beta, delta)):
            val = diagonal_integral(d)
            if val:
                base = sign * val / (mi_factorial(beta) * mi_factorial(delta))
                for a in sub_indices(beta):
                    if mi_degree(a) == 0:
                        continue
                    table.add(a, mi_add(mi_sub(beta, a), delta),
                              base * mi_binomial(beta, a))

    def delta_rec(beta: MultiIndex, delta: MultiIndex, d: dict, q_pow: int,
                  max_pos: int) -> None:
        k = mi_degree(beta) + mi_degree(delta)
        if k == n:
            if mi_degree(delta) >= 1:
                scatter(beta, delta, d)
            return
        for j in range(max_pos + 1):
            child = _nd_qstep(d, n + j, q_pow, nv, eta_block)
            if child:
                delta_rec(beta, mi_add(delta, unit_index(n, j)), child,
                          q_pow + 1, j)

    def beta_rec(beta: MultiIndex, d: dict, p_pow: int, max_pos: int) -> None:
        k = mi_degree(beta)
        if k >= 1:
            delta_rec(beta, zero_index(n), d, 1, n - 1)
        if k >= n - 1:
            return
        for j in range(max_pos + 1):
            child = _nd_qstep(d, j, p_pow, nv, xi_block)
            if child:
                beta_rec(mi_add(beta, unit_index(n, j)), child, p_pow + 1, j)

    beta_rec(zero_index(n), kernel, 1, n - 1)
    return table.cleaned()
