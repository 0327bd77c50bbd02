"""Floating-point cross-checks for the exact pipeline.

Everything in this module is an oracle: it confirms exact results but never
produces data that flows back into them.  The dependency is one way by
design, so a bug in the float layer can at worst fail a check, not corrupt
a table.  For the same reason the form matrices used for the numeric trace
are rebuilt here from their combinatorial definition instead of reusing
the exact implementations.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, sqrt

import numpy as np

from .polyring import MultiPoly


@dataclass(frozen=True)
class NumericConfig:
    sample_count: int = 1_000_000
    seed: int = 20260822
    tolerance: float = 1e-9


# ---------------------------------------------------------------------------
# Monte-Carlo sphere averages


def mc_sphere_integral(alpha, n: int, cfg: NumericConfig):
    """Estimate of the normalized cosphere average of the monomial xi^alpha.

    Normal vectors projected to the sphere give the uniform measure; the
    estimate comes back with its standard error.
    """
    alpha = tuple(alpha)
    if len(alpha) != n:
        raise ValueError("multi-index length must match the dimension")
    rng = np.random.default_rng(cfg.seed)
    total = 0.0
    total_sq = 0.0
    left = cfg.sample_count
    chunk = 1 << 17
    while left > 0:
        take = min(chunk, left)
        z = rng.standard_normal((take, n))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        vals = np.ones(take)
        for j, e in enumerate(alpha):
            if e:
                vals = vals * z[:, j] ** e
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        left -= take
    mean = total / cfg.sample_count
    var = max(total_sq / cfg.sample_count - mean * mean, 0.0)
    return mean, sqrt(var / cfg.sample_count)


# ---------------------------------------------------------------------------
# brute-force trace of the reflection pair


def _wedge_np(xi, m: int):
    n = len(xi)
    src = list(combinations(range(n), m))
    tgt = {I: r for r, I in enumerate(combinations(range(n), m + 1))}
    out = np.zeros((len(tgt), len(src)))
    for c, I in enumerate(src):
        for j in range(n):
            if j in I:
                continue
            below = sum(1 for i in I if i < j)
            sign = -1.0 if below % 2 else 1.0
            out[tgt[tuple(sorted(I + (j,)))], c] += sign * xi[j]
    return out


def _contract_np(xi, m: int):
    n = len(xi)
    src = list(combinations(range(n), m))
    tgt = {I: r for r, I in enumerate(combinations(range(n), m - 1))}
    out = np.zeros((len(tgt), len(src)))
    for c, I in enumerate(src):
        for pos, j in enumerate(I):
            sign = -1.0 if pos % 2 else 1.0
            out[tgt[tuple(v for v in I if v != j)], c] += sign * xi[j]
    return out


def numeric_reflection(xi, m: int):
    """Order-zero reflection symbol at one covector, as a float matrix."""
    xi = np.asarray(xi, dtype=float)
    nsq = float(xi @ xi)
    if nsq == 0.0:
        raise ValueError("covector must be nonzero")
    return (_wedge_np(xi, m - 1) @ _contract_np(xi, m)
            - _contract_np(xi, m + 1) @ _wedge_np(xi, m)) / nsq


def numeric_psi(xi, eta, n: int, m: int) -> float:
    """Trace of the product of two reflection symbols, brute force."""
    if not 1 <= m <= n - 1:
        raise ValueError("form degree out of range")
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if len(xi) != n or len(eta) != n:
        raise ValueError("covector length must match the dimension")
    return float(np.trace(numeric_reflection(xi, m)
                          @ numeric_reflection(eta, m)))


def _comb0(a: int, b: int) -> int:
    if b < 0 or b > a:
        return 0
    return comb(a, b)


def psi_reference(xi, eta, n: int, m: int) -> float:
    """Closed form of the pair trace, evaluated in floats."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    b = _comb0(n - 2, m - 2) + _comb0(n - 2, m) - 2 * _comb0(n - 2, m - 1)
    a = comb(n, m) - b
    dot = float(xi @ eta)
    return a * dot * dot / (float(xi @ xi) * float(eta @ eta)) + b


# ---------------------------------------------------------------------------
# random evaluation of generator polynomials


def random_rational_assignments(gens, seed: int, spread: int = 9) -> dict:
    """One rational value per generator, deterministic in the seed."""
    rng = random.Random(seed)
    out = {}
    for g in sorted(gens):
        num = rng.randint(-spread, spread)
        den = rng.randint(1, spread)
        out[g] = Fraction(num, den)
    return out


def random_jet_eval(expr: MultiPoly, assignments: dict,
                    cfg: NumericConfig | None = None) -> float:
    """Float value of a generator polynomial under an assignment.

    Positional variables are not allowed; expressions reaching this point
    are jet/curvature polynomials.  Assignments must respect whatever
    symmetries the expression's generators carry, which holds for
    canonical forms where each generator is an independent representative.
    """
    tol = cfg.tolerance if cfg is not None else 1e-9
    total = 0j
    for (exps, gens), c in expr.terms.items():
        if any(exps):
            raise ValueError("positional variable without an assignment")
        term = complex(float(c.re), float(c.im))
        for g, k in gens:
            if g not in assignments:
                raise ValueError(f"unassigned generator {g}")
            term *= float(assignments[g]) ** k
        total += term
    if abs(total.imag) > tol * (1.0 + abs(total.real)):
        raise ValueError("expression evaluated to a complex value")
    return total.real
