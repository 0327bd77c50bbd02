"""Self-check suites behind the command line ``verify`` subcommand.

Each suite is a callable returning ``(name, ok, detail)`` triples; the
command line prints one PASS or FAIL line per triple.  The checks here
are self-consistency statements of the engine, so frozen engine values
(the global ratio of the six-dimensional table against the classical
display, the sixth-order leading coefficient) are pinned as computed.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

import numpy as np

from .bridge import fit_flat_table, table_from_pattern_coeffs
from .flat import (flat_bilinear_from_symbol_product,
                   flat_bilinear_from_taylor,
                   pair_trace_closed_form, pair_trace_kernel_poly,
                   pair_trace_matrix)
from .ibp import (check_cocycle, check_identity_vi, check_selfadjoint,
                  extract_Sn_form, jet_gen, operator_from_table,
                  table_to_jet_poly, zero_index)
from .oracle import NumericConfig, mc_sphere_integral, numeric_psi
from .polyring import MultiPoly
from .sphere import sphere_monomial_average

DISPLAY_4 = {(1, 0, 1): Fraction(-4), (0, 1, 1): Fraction(-4),
             (0, 0, 2): Fraction(-4), (1, 1, 0): Fraction(-2)}
DISPLAY_6 = {(0, 2, 1): Fraction(12), (2, 0, 1): Fraction(12),
             (0, 1, 2): Fraction(24), (1, 0, 2): Fraction(24),
             (1, 2, 0): Fraction(6), (2, 1, 0): Fraction(6),
             (1, 1, 1): Fraction(24), (0, 0, 3): Fraction(16)}


def suite_traces():
    out = []
    for n in (2, 4, 6, 8, 10):
        for m in range(1, n):
            ok = pair_trace_kernel_poly(n, m) == pair_trace_matrix(n, m)
            out.append((f"trace-kernel n={n} m={m}", ok, ""))
    out.append(("trace-values n=4 m=2",
                pair_trace_closed_form(4, 2) == (8, -2), "expect (8, -2)"))
    out.append(("trace-values n=6 m=3",
                pair_trace_closed_form(6, 3) == (24, -4), "expect (24, -4)"))
    for n in (2, 4, 6, 8, 10):
        for m in range(1, n):
            a, b = pair_trace_closed_form(n, m)
            ok = (a + b == comb(n, m)
                  and (a, b) == pair_trace_closed_form(n, n - m))
            out.append((f"trace-sum-duality n={n} m={m}", ok, ""))
    return out


def suite_flat():
    out = []
    tables = {n: flat_bilinear_from_symbol_product(n) for n in (2, 4, 6)}
    for n in (2, 4, 6):
        ok = tables[n] == flat_bilinear_from_taylor(n)
        out.append((f"flat-route-agreement n={n}", ok, ""))
    for n in (2, 4):
        ok = flat_bilinear_from_symbol_product(n, literal=True) == tables[n]
        out.append((f"flat-literal-route n={n}", ok, ""))
    out.append(("flat-display n=4",
                tables[4] == table_from_pattern_coeffs(4, DISPLAY_4), ""))
    fit6 = fit_flat_table(tables[6])
    ok6 = set(fit6) == set(DISPLAY_6) and all(
        fit6[k] == -v / 2 for k, v in DISPLAY_6.items())
    out.append(("flat-display-ratio n=6", ok6,
                "engine table is -1/2 of the classical display"))
    for n, frozen in ((2, Fraction(-2)), (4, Fraction(2)), (6, Fraction(-2))):
        op, _w = operator_from_table(tables[n])
        lead = op.leading_coefficient()
        out.append((f"flat-leading n={n}", lead == frozen,
                    f"computed {lead}, frozen engine value {frozen}"))
        rep = extract_Sn_form(op)
        out.append((f"flat-divergence-form n={n}", rep.ok,
                    "" if rep.s_leading is None
                    else f"leading witness {rep.s_leading}"))
    for n in (2, 4, 6):
        t = tables[n]
        ok = t.is_symmetric() and all(
            sum(b) >= 1 and sum(g) >= 1 and sum(b) + sum(g) == n
            for (b, g) in t.coeffs)
        out.append((f"flat-table-invariants n={n}", ok, ""))
    return out


def suite_identities():
    out = []
    for n in (4, 6):
        table = flat_bilinear_from_symbol_product(n)
        B = table_to_jet_poly(table)
        op, _w = operator_from_table(table)
        ok, _expr = check_identity_vi(op, B)
        out.append((f"product-identity flat n={n}", ok, ""))
        ok, _wit, _defect = check_selfadjoint(op)
        out.append((f"selfadjoint flat n={n}", ok, ""))
    for n in (2, 4):
        B = table_to_jet_poly(flat_bilinear_from_symbol_product(n))
        ok, _wit, _defect = check_cocycle(B, n)
        out.append((f"cocycle flat n={n}", ok, ""))
    # negative control: an asymmetric bilinear must fail the coboundary test
    n = 2
    nv = 3 * n
    bad = (MultiPoly.from_gen(nv, jet_gen("f", zero_index(n)))
           * MultiPoly.from_gen(nv, jet_gen("h", (2, 0))))
    ok, _wit, _defect = check_cocycle(bad, n)
    out.append(("cocycle-negative-control", not ok,
                "asymmetric bilinear must not pass"))
    return out


def suite_curved():
    from .covariant import (cov_check_identity_vi, cov_check_selfadjoint,
                            cov_extract_divergence_form)
    from .curved import (b4_covariant, bn_conformal, bn_curved,
                         cov_leading_coefficient, paneitz_operator, pn_curved)
    out = []
    bil = bn_curved()
    target = bil.calc.canonicalize(b4_covariant())
    out.append(("curved-table-closed-form", (bil.value - target).is_zero(),
                ""))
    op = pn_curved(4, bil.calc)
    ok, _expr = cov_check_identity_vi(op.bilinear.calc, op.value,
                                      op.bilinear.value)
    out.append(("product-identity curved n=4", ok, ""))
    ok, _wit, _defect = cov_check_selfadjoint(op.bilinear.calc, op.core)
    out.append(("selfadjoint curved n=4", ok, ""))
    ok, _wit, _defect, s_lead = cov_extract_divergence_form(
        op.bilinear.calc, op.core)
    out.append(("curved-divergence-form", ok and s_lead == 2,
                f"leading witness {s_lead}"))
    lead = cov_leading_coefficient(op.bilinear.calc, op.value, 4)
    out.append(("curved-leading", lead == 2, f"computed {lead}"))
    calc = op.bilinear.calc
    pan = calc.canonicalize(paneitz_operator(calc))
    kappa = lead / cov_leading_coefficient(calc, pan, 4)
    rem = calc.canonicalize(op.value - pan * kappa)
    out.append(("curved-fourth-order-reference", rem.is_zero(),
                f"ratio {kappa} (reported, not asserted)"))
    conf = bn_conformal()
    out.append(("conformal-factor-route", conf.matches, ""))
    return out


_PSI_SEED = 20260814


def suite_numeric():
    cfg = NumericConfig()
    out = []
    probes = {2: [(2, 0), (4, 0), (2, 2), (1, 1), (3, 1)],
              4: [(2, 0, 0, 0), (4, 0, 0, 0), (2, 2, 0, 0), (1, 1, 0, 0),
                  (2, 1, 1, 0), (6, 0, 0, 0), (4, 2, 0, 0), (2, 2, 2, 0)],
              6: [(2, 0, 0, 0, 0, 0), (4, 0, 0, 0, 0, 0),
                  (2, 2, 0, 0, 0, 0), (2, 2, 2, 0, 0, 0),
                  (1, 1, 0, 0, 0, 0)]}
    for n, alphas in probes.items():
        for alpha in alphas:
            exact = sphere_monomial_average(n, alpha)
            est, se = mc_sphere_integral(alpha, n, cfg)
            ok = abs(est - float(exact)) <= 4 * se or (
                se == 0 and est == float(exact))
            out.append((f"mc-average n={n} alpha={alpha}", ok,
                        f"exact {exact}, mc {est:.6g} +- {se:.2g}"))
    rng = np.random.default_rng(_PSI_SEED)
    for n in (2, 4, 6, 8):
        for m in range(1, n):
            worst = 0.0
            for _ in range(100):
                xi = rng.standard_normal(n)
                eta = rng.standard_normal(n)
                a, b = pair_trace_closed_form(n, m)
                dot = float(xi @ eta)
                ref = a * dot * dot / float((xi @ xi) * (eta @ eta)) + b
                got = numeric_psi(xi, eta, n, m)
                err = abs(got - ref) / max(1.0, abs(ref))
                worst = max(worst, err)
            out.append((f"numeric-trace n={n} m={m}", worst <= 1e-9,
                        f"worst relative error {worst:.2e}"))
    return out


SUITES = {"traces": suite_traces,
          "flat": suite_flat,
          "identities": suite_identities,
          "curved": suite_curved,
          "numeric": suite_numeric}

SUITE_ORDER = ("traces", "flat", "identities", "numeric", "curved")


def run_suites(which: str = "all"):
    names = SUITE_ORDER if which == "all" else (which,)
    results = []
    for name in names:
        for line in SUITES[name]():
            results.append((name,) + line)
    return results
