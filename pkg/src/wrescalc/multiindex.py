"""Multi-index combinatorics.

A multi-index is a plain tuple of non-negative ints, one entry per
coordinate direction.  Enumeration order is fixed (first entry descending,
then recursively) so that every emitted artifact is reproducible byte for
byte.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Iterator

MultiIndex = tuple

_ZERO_CACHE: dict = {}


def zero_index(n: int) -> MultiIndex:
    mi = _ZERO_CACHE.get(n)
    if mi is None:
        mi = (0,) * n
        _ZERO_CACHE[n] = mi
    return mi


def unit_index(n: int, j: int) -> MultiIndex:
    return tuple(1 if k == j else 0 for k in range(n))


def mi_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def mi_sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """Componentwise difference; caller guarantees b <= a."""
    out = tuple(x - y for x, y in zip(a, b))
    if any(v < 0 for v in out):
        raise ValueError(f"multi-index subtraction {a} - {b} went negative")
    return out


def mi_leq(a: MultiIndex, b: MultiIndex) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mi_degree(a: MultiIndex) -> int:
    return sum(a)


def mi_factorial(a: MultiIndex) -> int:
    out = 1
    for v in a:
        out *= factorial(v)
    return out


def mi_binomial(a: MultiIndex, b: MultiIndex) -> int:
    """Product of componentwise binomials C(a_i, b_i)."""
    out = 1
    for x, y in zip(a, b):
        out *= comb(x, y)
    return out


def mi_is_even(a: MultiIndex) -> bool:
    return all(v % 2 == 0 for v in a)


def enumerate_multiindices(n: int, degree: int) -> Iterator[MultiIndex]:
    """All multi-indices in n variables of the given total degree.

    Order: first component descending, remainder recursively.  For n=2,
    degree=2 this yields (2,0), (1,1), (0,2).
    """
    if n < 1:
        raise ValueError("need at least one variable")
    if n == 1:
        yield (degree,)
        return
    for k in range(degree, -1, -1):
        for rest in enumerate_multiindices(n - 1, degree - k):
            yield (k,) + rest


def enumerate_up_to(n: int, max_degree: int) -> Iterator[MultiIndex]:
    for d in range(max_degree + 1):
        yield from enumerate_multiindices(n, d)


def sub_indices(a: MultiIndex) -> Iterator[MultiIndex]:
    """All b with 0 <= b <= a componentwise, in deterministic order."""
    if not a:
        yield ()
        return
    head = a[0]
    for k in range(head, -1, -1):
        for rest in sub_indices(a[1:]):
            yield (k,) + rest


def taylor_coefficient(a: MultiIndex) -> Fraction:
    """1/a!, the weight of x^a in an exponential Taylor expansion."""
    return Fraction(1, mi_factorial(a))
