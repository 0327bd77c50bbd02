"""Exterior algebra on a coordinate patch.

Degree-m forms are expanded over the lexicographic basis of sorted index
tuples.  The two basic operators are wedging with a covector (epsilon) and
contracting with its metric dual (iota); the reflection principal symbol is
assembled from the two and always lands back in the same degree, so the
public objects are square matrices even though the factors hop degrees.
"""
from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .polyring import MultiPoly
from .rationals import QI, QI_ONE

_BASIS_CACHE: dict = {}


def form_basis(n: int, m: int) -> list[tuple]:
    """Sorted index tuples spanning degree-m forms in n variables."""
    key = (n, m)
    got = _BASIS_CACHE.get(key)
    if got is None:
        if m < 0 or m > n:
            got = []
        else:
            got = list(combinations(range(n), m))
        _BASIS_CACHE[key] = got
    return got


def basis_index(n: int, m: int) -> dict:
    return {I: k for k, I in enumerate(form_basis(n, m))}


class FormMatrix:
    """Sparse matrix of polynomials between form bases."""

    __slots__ = ("rows", "cols", "nv", "data")

    def __init__(self, rows: int, cols: int, nv: int, data: dict | None = None):
        self.rows = rows
        self.cols = cols
        self.nv = nv
        self.data = {} if data is None else data

    @staticmethod
    def zero(rows: int, cols: int, nv: int) -> "FormMatrix":
        return FormMatrix(rows, cols, nv)

    @staticmethod
    def identity(dim: int, nv: int) -> "FormMatrix":
        one = MultiPoly.const(nv, 1)
        return FormMatrix(dim, dim, nv, {(k, k): one for k in range(dim)})

    def copy(self) -> "FormMatrix":
        return FormMatrix(self.rows, self.cols, self.nv, dict(self.data))

    def put(self, r: int, c: int, value: MultiPoly) -> None:
        if value.is_zero():
            self.data.pop((r, c), None)
        else:
            self.data[(r, c)] = value

    def add_to(self, r: int, c: int, value: MultiPoly) -> None:
        got = self.data.get((r, c))
        new = value if got is None else got + value
        self.put(r, c, new)

    def get(self, r: int, c: int) -> MultiPoly:
        got = self.data.get((r, c))
        return got if got is not None else MultiPoly.zero(self.nv)

    def __add__(self, other: "FormMatrix") -> "FormMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        out = self.copy()
        for (r, c), v in other.data.items():
            out.add_to(r, c, v)
        return out

    def __sub__(self, other: "FormMatrix") -> "FormMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "FormMatrix":
        out = FormMatrix(self.rows, self.cols, self.nv)
        for key, v in self.data.items():
            w = v * c
            if not w.is_zero():
                out.data[key] = w
        return out

    def scale_poly(self, p: MultiPoly) -> "FormMatrix":
        out = FormMatrix(self.rows, self.cols, self.nv)
        for key, v in self.data.items():
            w = v * p
            if not w.is_zero():
                out.data[key] = w
        return out

    def __matmul__(self, other: "FormMatrix") -> "FormMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.rows}x{self.cols} with "
                             f"{other.rows}x{other.cols}")
        by_row: dict = {}
        for (k, c), v in other.data.items():
            by_row.setdefault(k, []).append((c, v))
        out = FormMatrix(self.rows, other.cols, self.nv)
        for (r, k), a in self.data.items():
            hits = by_row.get(k)
            if not hits:
                continue
            for c, b in hits:
                out.add_to(r, c, a * b)
        return out

    def trace(self) -> MultiPoly:
        if self.rows != self.cols:
            raise ValueError("trace of a rectangular matrix")
        acc = MultiPoly.zero(self.nv)
        for (r, c), v in self.data.items():
            if r == c:
                acc = acc + v
        return acc

    def map_entries(self, fn) -> "FormMatrix":
        out = FormMatrix(self.rows, self.cols, self.nv)
        for key, v in self.data.items():
            w = fn(v)
            if not w.is_zero():
                out.data[key] = w
        return out

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other):
        if not isinstance(other, FormMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return (self - other).is_zero()

    def __repr__(self):
        return f"FormMatrix({self.rows}x{self.cols}, {len(self.data)} entries)"


def wedge_sign(I: tuple, j: int) -> int:
    """Sign of moving e_j into sorted position within e_j ^ e_I; 0 if j in I."""
    if j in I:
        return 0
    below = sum(1 for i in I if i < j)
    return -1 if below % 2 else 1


def insert_sorted(I: tuple, j: int) -> tuple:
    out = tuple(sorted(I + (j,)))
    return out


def epsilon_unit(n: int, m: int, j: int) -> FormMatrix:
    """Wedge with the j-th coordinate covector: degree m to m+1."""
    src = form_basis(n, m)
    tgt = basis_index(n, m + 1)
    out = FormMatrix(len(tgt), len(src), 0)
    one = MultiPoly.const(0, 1)
    for c, I in enumerate(src):
        s = wedge_sign(I, j)
        if s == 0:
            continue
        r = tgt[insert_sorted(I, j)]
        out.put(r, c, one * s)
    return out


def iota_unit(n: int, m: int, j: int) -> FormMatrix:
    """Contraction with the j-th coordinate vector: degree m to m-1."""
    src = form_basis(n, m)
    tgt = basis_index(n, m - 1)
    out = FormMatrix(len(tgt), len(src), 0)
    one = MultiPoly.const(0, 1)
    for c, I in enumerate(src):
        for pos, i in enumerate(I):
            if i != j:
                continue
            sign = -1 if pos % 2 else 1
            r = tgt[tuple(v for v in I if v != j)]
            out.put(r, c, one * sign)
    return out


def _lift(mat: FormMatrix, nv: int) -> FormMatrix:
    out = FormMatrix(mat.rows, mat.cols, nv)
    for key, v in mat.data.items():
        out.data[key] = MultiPoly(nv, {((0,) * nv, g): c for (_e, g), c in v.terms.items()})
    return out


def epsilon(n: int, m: int, components: Sequence[MultiPoly]) -> FormMatrix:
    """Wedge with the covector whose j-th component is components[j]."""
    nv = components[0].nv
    acc = FormMatrix(len(form_basis(n, m + 1)), len(form_basis(n, m)), nv)
    for j in range(n):
        cj = components[j]
        if cj.is_zero():
            continue
        acc = acc + _lift(epsilon_unit(n, m, j), nv).scale_poly(cj)
    return acc


def iota(n: int, m: int, components: Sequence[MultiPoly]) -> FormMatrix:
    """Contraction with the vector whose j-th component is components[j].

    Metric duals are the caller's business: pass g^{jk} xi_k for the raised
    covector in a curved patch, or the raw components over a flat one.
    """
    nv = components[0].nv
    acc = FormMatrix(len(form_basis(n, m - 1)), len(form_basis(n, m)), nv)
    for j in range(n):
        cj = components[j]
        if cj.is_zero():
            continue
        acc = acc + _lift(iota_unit(n, m, j), nv).scale_poly(cj)
    return acc


def reflection_numerator(n: int, m: int, wedge_comp: Sequence[MultiPoly],
                         contract_comp: Sequence[MultiPoly]) -> FormMatrix:
    """Numerator of the order-zero reflection symbol on degree-m forms.

    The full symbol is (wedge o contract - contract o wedge) divided by the
    squared covector norm; this returns the parenthesised matrix.
    """
    e_up = epsilon(n, m, wedge_comp)          # m   -> m+1
    e_dn = epsilon(n, m - 1, wedge_comp)      # m-1 -> m
    i_dn = iota(n, m, contract_comp)          # m   -> m-1
    i_up = iota(n, m + 1, contract_comp)      # m+1 -> m
    return (e_dn @ i_dn) - (i_up @ e_up)


def clifford_sum(n: int, m: int, wedge_comp: Sequence[MultiPoly],
                 contract_comp: Sequence[MultiPoly]) -> FormMatrix:
    """epsilon iota + iota epsilon on degree-m forms; equals |xi|^2 times the
    identity whenever contract_comp is the metric raise of wedge_comp."""
    e_up = epsilon(n, m, wedge_comp)
    e_dn = epsilon(n, m - 1, wedge_comp)
    i_dn = iota(n, m, contract_comp)
    i_up = iota(n, m + 1, contract_comp)
    return (e_dn @ i_dn) + (i_up @ e_up)
