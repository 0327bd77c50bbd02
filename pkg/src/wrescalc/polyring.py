"""Sparse multivariate polynomials over Gaussian rationals.

Terms live in a map keyed by (exponent tuple, generator powers).  The
exponent tuple covers the positional variables of whatever layout the
calling engine has set up (covector components, coordinates, a second
covector copy).  Generators are opaque hashable tags for quantities the
ring does not expand: jets of named scalar functions and curvature
components at the base point.

Jet generators know how to differentiate (the derivative of a jet is the
next deeper jet); every other generator is treated as a constant.  All
explicit coordinate dependence must therefore be carried in the exponent
tuple, which is exactly how the metric expansion modules use this class.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .multiindex import MultiIndex, mi_add
from .rationals import QI, QI_ONE, QI_ZERO

Gen = tuple
GenPowers = tuple            # sorted tuple of (gen, positive int)
TermKey = tuple              # (exps, gens)

NO_GENS: GenPowers = ()


def jet_gen(name: str, orders: MultiIndex) -> Gen:
    """Generator tag for the partial-derivative jet of a named scalar."""
    return ("jet", name, tuple(orders))


def is_jet_gen(gen: Gen) -> bool:
    return gen[0] == "jet"


def _gen_key(item):
    gen, power = item
    return (gen[0], repr(gen), power)


def merge_gens(a: GenPowers, b: GenPowers) -> GenPowers:
    if not a:
        return b
    if not b:
        return a
    acc: dict = dict(a)
    for gen, p in b:
        acc[gen] = acc.get(gen, 0) + p
    return tuple(sorted(acc.items(), key=_gen_key))


class MultiPoly:
    """Immutable sparse polynomial; arithmetic returns fresh objects."""

    __slots__ = ("nv", "terms")

    def __init__(self, nv: int, terms: dict | None = None, _own: bool = False):
        object.__setattr__(self, "nv", nv)
        if terms is None:
            terms = {}
        elif not _own:
            terms = dict(terms)
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # ---- constructors -------------------------------------------------

    @staticmethod
    def zero(nv: int) -> "MultiPoly":
        return MultiPoly(nv, {}, _own=True)

    @staticmethod
    def const(nv: int, c) -> "MultiPoly":
        c = QI.of(c)
        if c.is_zero():
            return MultiPoly.zero(nv)
        return MultiPoly(nv, {((0,) * nv, NO_GENS): c}, _own=True)

    @staticmethod
    def var(nv: int, i: int, power: int = 1) -> "MultiPoly":
        exps = tuple(power if k == i else 0 for k in range(nv))
        return MultiPoly(nv, {(exps, NO_GENS): QI_ONE}, _own=True)

    @staticmethod
    def monomial(nv: int, exps: MultiIndex, gens: GenPowers = NO_GENS, coeff=1) -> "MultiPoly":
        c = QI.of(coeff)
        if c.is_zero():
            return MultiPoly.zero(nv)
        return MultiPoly(nv, {(tuple(exps), gens): c}, _own=True)

    @staticmethod
    def from_gen(nv: int, gen: Gen, coeff=1) -> "MultiPoly":
        return MultiPoly.monomial(nv, (0,) * nv, ((gen, 1),), coeff)

    # ---- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nv == other.nv and self.terms == other.terms
        if isinstance(other, (int, Fraction, QI)):
            return self == MultiPoly.const(self.nv, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nv, frozenset(self.terms.items())))

    # ---- arithmetic ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction, QI)):
            other = MultiPoly.const(self.nv, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if self.nv != other.nv:
            raise ValueError("variable count mismatch")
        if not self.terms:
            return other
        if not other.terms:
            return self
        acc = dict(self.terms)
        for key, c in other.terms.items():
            s = acc.get(key)
            if s is None:
                acc[key] = c
            else:
                s = s + c
                if s.is_zero():
                    del acc[key]
                else:
                    acc[key] = s
        return MultiPoly(self.nv, acc, _own=True)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nv, {k: -c for k, c in self.terms.items()}, _own=True)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, QI)):
            other = MultiPoly.const(self.nv, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QI)):
            c = QI.of(other)
            if c.is_zero():
                return MultiPoly.zero(self.nv)
            return MultiPoly(self.nv, {k: v * c for k, v in self.terms.items()}, _own=True)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if self.nv != other.nv:
            raise ValueError("variable count mismatch")
        acc: dict = {}
        for (e1, g1), c1 in self.terms.items():
            for (e2, g2), c2 in other.terms.items():
                key = (tuple(x + y for x, y in zip(e1, e2)), merge_gens(g1, g2))
                c = c1 * c2
                s = acc.get(key)
                if s is None:
                    acc[key] = c
                else:
                    s = s + c
                    if s.is_zero():
                        del acc[key]
                    else:
                        acc[key] = s
        return MultiPoly(self.nv, acc, _own=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = MultiPoly.const(self.nv, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # ---- calculus -----------------------------------------------------

    def diff_var(self, i: int) -> "MultiPoly":
        """Partial derivative in positional variable i (generators fixed)."""
        acc: dict = {}
        for (exps, gens), c in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            new = exps[:i] + (e - 1,) + exps[i + 1:]
            key = (new, gens)
            v = c * e
            s = acc.get(key)
            acc[key] = v if s is None else s + v
        return MultiPoly(self.nv, {k: v for k, v in acc.items() if not v.is_zero()}, _own=True)

    def diff_jets(self, j: int) -> "MultiPoly":
        """Derivative action on jet generators alone: raises each jet order in
        direction j.  Non-jet generators are constants at the base point."""
        acc: dict = {}
        for (exps, gens), c in self.terms.items():
            for idx, (gen, p) in enumerate(gens):
                if gen[0] != "jet":
                    continue
                orders = gen[2]
                deeper = ("jet", gen[1],
                          orders[:j] + (orders[j] + 1,) + orders[j + 1:])
                rest = list(gens)
                if p == 1:
                    del rest[idx]
                else:
                    rest[idx] = (gen, p - 1)
                key = (exps, merge_gens(tuple(rest), ((deeper, 1),)))
                v = c * p
                s = acc.get(key)
                acc[key] = v if s is None else s + v
        return MultiPoly(self.nv, {k: v for k, v in acc.items() if not v.is_zero()}, _own=True)

    # ---- structural transforms ---------------------------------------

    def map_coeff(self, fn: Callable[[QI], QI]) -> "MultiPoly":
        acc = {}
        for key, c in self.terms.items():
            v = fn(c)
            if not v.is_zero():
                acc[key] = v
        return MultiPoly(self.nv, acc, _own=True)

    def select(self, pred: Callable[[TermKey], bool]) -> "MultiPoly":
        return MultiPoly(self.nv, {k: c for k, c in self.terms.items() if pred(k)}, _own=True)

    def degree_in(self, positions: Iterable[int]) -> int:
        """Max total degree over the given positions; -1 for the zero poly."""
        pos = tuple(positions)
        best = -1
        for (exps, _g) in self.terms:
            d = sum(exps[p] for p in pos)
            if d > best:
                best = d
        return best

    def truncate_positions(self, positions: Iterable[int], max_degree: int) -> "MultiPoly":
        pos = tuple(positions)
        return self.select(lambda k: sum(k[0][p] for p in pos) <= max_degree)

    def set_positions_zero(self, positions: Iterable[int]) -> "MultiPoly":
        pos = tuple(positions)
        return self.select(lambda k: all(k[0][p] == 0 for p in pos))

    def merge_positions(self, src: Iterable[int], dst: Iterable[int]) -> "MultiPoly":
        """Substitute variable src[k] := dst[k] for each k, folding exponents.

        Used to evaluate a two-covector expression on the diagonal.
        """
        src = tuple(src)
        dst = tuple(dst)
        acc: dict = {}
        for (exps, gens), c in self.terms.items():
            e = list(exps)
            for s, d in zip(src, dst):
                e[d] += e[s]
                e[s] = 0
            key = (tuple(e), gens)
            prev = acc.get(key)
            if prev is None:
                acc[key] = c
            else:
                prev = prev + c
                if prev.is_zero():
                    del acc[key]
                else:
                    acc[key] = prev
        return MultiPoly(self.nv, acc, _own=True)

    def extend_vars(self, new_nv: int, offset: int = 0) -> "MultiPoly":
        """Re-embed into a ring with more positional variables."""
        if new_nv < self.nv + offset:
            raise ValueError("target ring too small")
        pad_right = new_nv - self.nv - offset
        acc = {}
        for (exps, gens), c in self.terms.items():
            acc[((0,) * offset + exps + (0,) * pad_right, gens)] = c
        return MultiPoly(new_nv, acc, _own=True)

    # ---- inspection ---------------------------------------------------

    def coefficient(self, exps: MultiIndex, gens: GenPowers = NO_GENS) -> QI:
        return self.terms.get((tuple(exps), gens), QI_ZERO)

    def terms_sorted(self) -> list:
        return sorted(self.terms.items(),
                      key=lambda kv: (kv[0][0], tuple(_gen_key(g) for g in kv[0][1])))

    def gens_used(self) -> set:
        out = set()
        for (_e, gens) in self.terms:
            for gen, _p in gens:
                out.add(gen)
        return out

    def __iter__(self) -> Iterator:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return "MultiPoly(0)"
        bits = []
        for (exps, gens), c in self.terms_sorted()[:8]:
            bits.append(f"{c}*x^{exps}" + (f"*{gens}" if gens else ""))
        more = "" if len(self.terms) <= 8 else f" ... ({len(self.terms)} terms)"
        return "MultiPoly(" + " + ".join(bits) + more + ")"


def poly_sum(nv: int, polys: Iterable[MultiPoly]) -> MultiPoly:
    acc: dict = {}
    for p in polys:
        for key, c in p.terms.items():
            s = acc.get(key)
            if s is None:
                acc[key] = c
            else:
                s = s + c
                if s.is_zero():
                    del acc[key]
                else:
                    acc[key] = s
    return MultiPoly(nv, acc, _own=True)
