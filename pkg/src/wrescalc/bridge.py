"""Dictionary between multi-index coefficient tables and contraction
patterns.

A flat bilinear expression in two scalars that is invariant under
orthogonal coordinate changes is a combination of full contractions: some
derivative indices of f pair among themselves, some of h pair among
themselves, and the rest pair across.  A pattern is the triple
(s, t, r) = (f self pairs, h self pairs, cross pairs); expanding the
implicit index sums turns a pattern into a table, and an exact linear
solve turns a table back into pattern coefficients.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from .flat import BilinearCoeffTable
from .multiindex import mi_add, unit_index, zero_index


def flat_patterns(n: int) -> list[tuple]:
    """All (s, t, r) with 2s + 2t + 2r = n and both slots differentiated."""
    out = []
    for s in range(n // 2 + 1):
        for t in range(n // 2 + 1):
            for r in range(n // 2 + 1):
                if 2 * (s + t + r) != n:
                    continue
                if 2 * s + r == 0 or 2 * t + r == 0:
                    continue
                out.append((s, t, r))
    return sorted(out)


def expand_flat_pattern(n: int, s: int, t: int, r: int) -> BilinearCoeffTable:
    """Table of the full contraction with s f-pairs, t h-pairs, r cross."""
    out = BilinearCoeffTable(n)
    slots = s + t + r
    for assign in product(range(n), repeat=slots):
        cross = assign[:r]
        f_pairs = assign[r:r + s]
        h_pairs = assign[r + s:]
        beta = zero_index(n)
        for i in cross:
            beta = mi_add(beta, unit_index(n, i))
        for j in f_pairs:
            beta = mi_add(beta, mi_add(unit_index(n, j), unit_index(n, j)))
        gamma = zero_index(n)
        for i in cross:
            gamma = mi_add(gamma, unit_index(n, i))
        for k in h_pairs:
            gamma = mi_add(gamma, mi_add(unit_index(n, k), unit_index(n, k)))
        out.add(beta, gamma, Fraction(1))
    return out.cleaned()


def table_from_pattern_coeffs(n: int, coeffs: dict) -> BilinearCoeffTable:
    out = BilinearCoeffTable(n)
    for (s, t, r), c in coeffs.items():
        part = expand_flat_pattern(n, s, t, r)
        for key, v in part.coeffs.items():
            out.add(key[0], key[1], Fraction(c) * v)
    return out.cleaned()


def solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Gaussian elimination over Fraction; returns the unique solution of
    an overdetermined consistent system, or raises ValueError."""
    m = len(rows)
    if m == 0:
        return []
    k = len(rows[0])
    aug = [list(map(Fraction, rows[i])) + [Fraction(rhs[i])] for i in range(m)]
    pivots = []
    row = 0
    for col in range(k):
        sel = None
        for i in range(row, m):
            if aug[i][col] != 0:
                sel = i
                break
        if sel is None:
            continue
        aug[row], aug[sel] = aug[sel], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for i in range(m):
            if i != row and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for i in range(row, m):
        if aug[i][k] != 0:
            raise ValueError("inconsistent system")
    if len(pivots) < k:
        raise ValueError("underdetermined system")
    sol = [Fraction(0)] * k
    for i, col in enumerate(pivots):
        sol[col] = aug[i][k]
    return sol


def fit_flat_table(table: BilinearCoeffTable) -> dict:
    """Express a table in the contraction-pattern basis, exactly.

    Raises ValueError if the table is not a combination of full
    contractions, which would mean it is not orthogonally invariant.
    """
    n = table.n
    pats = flat_patterns(n)
    expansions = [expand_flat_pattern(n, *p) for p in pats]
    keys = set(table.coeffs)
    for e in expansions:
        keys.update(e.coeffs)
    keys = sorted(keys)
    rows = [[e.coeffs.get(key, Fraction(0)) for e in expansions] for key in keys]
    rhs = [table.coeffs.get(key, Fraction(0)) for key in keys]
    sol = solve_exact(rows, rhs)
    return {p: c for p, c in zip(pats, sol) if c != 0}


def pattern_text(s: int, t: int, r: int, fname: str = "f", hname: str = "h") -> str:
    """Human-readable contraction, cross indices first."""
    cross = "".join(chr(ord("i") + q) for q in range(r))
    fpair = "".join(2 * chr(ord("p") + q) for q in range(s))
    hpair = "".join(2 * chr(ord("u") + q) for q in range(t))
    return f"{fname};{cross}{fpair} {hname};{cross}{hpair}"
