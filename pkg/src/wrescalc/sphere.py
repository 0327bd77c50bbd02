"""Exact monomial averages over the unit sphere.

All integrals use the rotation-invariant probability measure (total mass
one), which keeps every residue coefficient rational.  The closed form is
validated in the test suite against an independent oracle built from
Gaussian moments before anything else relies on it.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .multiindex import MultiIndex, mi_degree
from .polyring import MultiPoly
from .rationals import QI


def double_factorial(k: int) -> int:
    """(k)!! with the usual conventions (-1)!! = 1, 0!! = 1."""
    if k <= 0:
        return 1
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@lru_cache(maxsize=None)
def sphere_monomial_average(n: int, alpha: MultiIndex) -> Fraction:
    """Average of xi^alpha over the unit sphere in R^n, probability measure.

    Zero when any exponent is odd.  For alpha = 2a the value is
    prod_i (2a_i - 1)!! / prod_{k=0}^{|a|-1} (n + 2k).
    """
    if len(alpha) != n:
        raise ValueError("multi-index length must match the dimension")
    if any(e % 2 for e in alpha):
        return Fraction(0)
    num = 1
    for e in alpha:
        num *= double_factorial(e - 1)
    half = mi_degree(alpha) // 2
    den = 1
    for k in range(half):
        den *= n + 2 * k
    return Fraction(num, den)


def gaussian_moment(alpha: MultiIndex) -> int:
    """E[x^alpha] for a standard Gaussian vector, via 1-d moment recursion.

    Independent of the sphere formula: each coordinate contributes
    m_e = (e-1) m_{e-2} with m_0 = 1, m_1 = 0.
    """
    out = 1
    for e in alpha:
        m_prev2, m_prev1 = 1, 0          # m_0, m_1
        if e == 0:
            m = 1
        elif e == 1:
            m = 0
        else:
            m = None
            for k in range(2, e + 1):
                m = (k - 1) * m_prev2
                m_prev2, m_prev1 = m_prev1, m
            m = m_prev1
        if m == 0:
            return 0
        out *= m
    return out


def gaussian_radial_moment(n: int, s: int) -> int:
    """E[|x|^{2s}] for a standard Gaussian in R^n, by multinomial expansion.

    Expands (sum x_i^2)^s into coordinate moments, again independent of the
    sphere closed form.
    """
    from math import factorial
    from .multiindex import enumerate_multiindices, mi_factorial

    total = 0
    for beta in enumerate_multiindices(n, s):
        weight = factorial(s) // mi_factorial(beta)
        total += weight * gaussian_moment(tuple(2 * b for b in beta))
    return total


def sphere_average_oracle(n: int, alpha: MultiIndex) -> Fraction:
    """Sphere average obtained as a ratio of Gaussian moments."""
    num = gaussian_moment(alpha)
    if num == 0:
        return Fraction(0)
    s = mi_degree(alpha) // 2
    return Fraction(num, gaussian_radial_moment(n, s))


def integrate_poly_on_sphere(p: MultiPoly, n: int, xi_positions=None) -> MultiPoly:
    """Integrate out the covector variables of a polynomial restricted to the
    unit sphere; other positional variables and all generators pass through.

    The polynomial is understood as the numerator of a symbol already
    restricted to the sphere, so no denominator enters.
    """
    if xi_positions is None:
        xi_positions = tuple(range(n))
    else:
        xi_positions = tuple(xi_positions)
    acc: dict = {}
    for (exps, gens), c in p.terms.items():
        alpha = tuple(exps[q] for q in xi_positions)
        w = sphere_monomial_average(n, alpha)
        if w == 0:
            continue
        e = list(exps)
        for q in xi_positions:
            e[q] = 0
        key = (tuple(e), gens)
        v = c * w
        s = acc.get(key)
        if s is None:
            acc[key] = v
        else:
            s = s + v
            if s.is_zero():
                del acc[key]
            else:
                acc[key] = s
    return MultiPoly(p.nv, acc, _own=True)


def integrate_residue_trace(sym) -> MultiPoly:
    """Average the matrix trace of a symbol component over the unit sphere.

    The component's denominator is a power of the squared norm, identically
    one on the sphere at the base point, so only the numerator enters.
    Coordinates are pinned to the base point first; jets and any other
    generators ride along as coefficients of the result.
    """
    tr = sym.at_base_point().mat.trace()
    return integrate_poly_on_sphere(tr, sym.ctx.n, xi_positions=sym.ctx.xi)
