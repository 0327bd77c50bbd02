"""Serialize exact results as JSON documents and LaTeX displays.

Every document embeds the convention fingerprint (residue scale, sign of
the Laplacian, normal-chart curvature constant, cosphere normalization)
so that a consumer can tell whether two emitted files are comparable.
Term lists are sorted, dictionaries are dumped with sorted keys, and
coefficients are rendered as exact rational strings: emitting the same
object twice yields byte-identical output.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .bridge import fit_flat_table
from .flat import (BilinearCoeffTable, RESIDUE_TABLE_SCALE,
                   flat_bilinear_from_symbol_product, middle_degree)
from .geometry import NORMAL_FORM_QUADRATIC
from .ibp import OperatorExpr, extract_Sn_form, operator_from_table
from .polyring import MultiPoly

ENGINE_TAG = "wrescalc 0.1.0"


def _conventions(jet_encoding: str, **extra) -> dict:
    base = {
        "engine": ENGINE_TAG,
        "jet_encoding": jet_encoding,
        "index_base": 0,
        "residue_scale": str(RESIDUE_TABLE_SCALE),
        "cosphere_measure": "normalized to total mass one",
        "laplacian_sign": "nonnegative, delta d on scalars",
        "normal_chart_quadratic": str(NORMAL_FORM_QUADRATIC),
        "schouten": "(Ric - J g)/(n-2) with J = Scal/(2(n-1))",
    }
    base.update(extra)
    return base


def fraction_str(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return str(Fraction(c))


def render(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# flat documents: jets carried as coordinate multi-indices


def bn_flat_document(n: int) -> dict:
    table = flat_bilinear_from_symbol_product(n, middle_degree(n)).cleaned()
    terms = [{"f_jet": list(beta), "h_jet": list(gamma),
              "curvature": [], "coeff": fraction_str(c)}
             for (beta, gamma), c in table.items_sorted()]
    return {"dimension": n, "kind": "coeff-table", "terms": terms,
            "conventions": _conventions("multi_index")}


def _operator_terms(op: OperatorExpr) -> list:
    rows = []
    for (exps, gens), c in op.poly.terms.items():
        if any(e for e in exps):
            raise ValueError("operator coefficients must be constant")
        jet = None
        for g, k in gens:
            if g[0] == "jet" and g[1] == op.hname:
                if jet is not None or k != 1:
                    raise ValueError("operator is not linear in its argument")
                jet = list(g[2])
        if jet is None:
            raise ValueError("term without the argument jet")
        rows.append({"f_jet": None, "h_jet": jet, "curvature": [],
                     "coeff": fraction_str(c.real_fraction())})
    rows.sort(key=lambda r: (len(r["h_jet"]), r["h_jet"]))
    return rows


def pn_flat_document(n: int) -> dict:
    table = flat_bilinear_from_symbol_product(n, middle_degree(n)).cleaned()
    op, _witness = operator_from_table(table)
    extra = {"leading_coefficient": fraction_str(op.leading_coefficient())}
    report = extract_Sn_form(op)
    if report.ok and report.s_leading is not None:
        extra["divergence_form_leading"] = fraction_str(report.s_leading)
    return {"dimension": n, "kind": "operator",
            "terms": _operator_terms(op),
            "conventions": _conventions("multi_index", **extra)}


# ---------------------------------------------------------------------------
# curved documents: jets carried as covariant index strings


def _curvature_descriptor(gen, power: int) -> list:
    kind, body, string = gen
    if kind == "crv":
        head = "R[" + " ".join(str(i) for i in body) + "]"
    elif kind == "rho":
        head = "Schouten[" + " ".join(str(i) for i in body) + "]"
    else:
        raise ValueError(f"unexpected coefficient generator {gen!r}")
    if string:
        head = head[:-1] + "; " + " ".join(str(i) for i in string) + "]"
    return [head] * power


def curved_terms(value: MultiPoly, fname: str = "f",
                 hname: str = "h") -> list:
    """Rows for a polynomial in covariant jets of one or two scalars."""
    rows = []
    for (exps, gens), c in value.terms.items():
        if any(e for e in exps):
            raise ValueError("curved values must be position-free")
        fj = None
        hj = None
        curv: list = []
        for g, k in gens:
            if g[0] == "cjet" and g[1] == hname:
                assert hj is None and k == 1
                hj = list(g[2])
            elif g[0] == "cjet" and g[1] == fname:
                assert fj is None and k == 1
                fj = list(g[2])
            else:
                curv.extend(_curvature_descriptor(g, k))
        if hj is None:
            raise ValueError("term without a jet of the second argument")
        curv.sort()
        rows.append({"f_jet": fj, "h_jet": hj, "curvature": curv,
                     "coeff": fraction_str(c.real_fraction())})
    rows.sort(key=lambda r: (len(r["h_jet"]), r["h_jet"],
                             [] if r["f_jet"] is None else r["f_jet"],
                             r["curvature"]))
    return rows


def bn_curved_document(n: int, value: MultiPoly) -> dict:
    return {"dimension": n, "kind": "coeff-table",
            "terms": curved_terms(value),
            "conventions": _conventions("index_string",
                                        background="general metric")}


def pn_curved_document(n: int, value: MultiPoly, *, leading=None,
                       s_leading=None, fourth_order_ratio=None) -> dict:
    extra = {"background": "general metric"}
    if leading is not None:
        extra["leading_coefficient"] = fraction_str(leading)
    if s_leading is not None:
        extra["divergence_form_leading"] = fraction_str(s_leading)
    if fourth_order_ratio is not None:
        extra["fourth_order_reference_ratio"] = fraction_str(fourth_order_ratio)
    return {"dimension": n, "kind": "operator",
            "terms": curved_terms(value),
            "conventions": _conventions("index_string", **extra)}


# ---------------------------------------------------------------------------
# LaTeX


_CROSS = "ijk"
_FPAIR = "pqr"
_HPAIR = "uvw"


def _coeff_latex(c: Fraction, lead: bool) -> str:
    sign = "-" if c < 0 else ("" if lead else "+")
    c = abs(c)
    if c.denominator == 1:
        body = "" if c == 1 else str(c.numerator)
    else:
        body = rf"\tfrac{{{c.numerator}}}{{{c.denominator}}}"
    return sign + (body + r"\," if body else "")


def _pattern_latex(s: int, t: int, r: int, fname: str, hname: str) -> str:
    cross = _CROSS[:r]
    fidx = cross + "".join(2 * a for a in _FPAIR[:s])
    hidx = cross + "".join(2 * a for a in _HPAIR[:t])
    left = rf"{fname}_{{;{fidx}}}" if fidx else fname
    right = rf"{hname}_{{;{hidx}}}" if hidx else hname
    return left + r"\," + right


def latex_bn_flat(n: int, table: BilinearCoeffTable | None = None,
                  fname: str = "f", hname: str = "h") -> str:
    """Abstract-index display with repeated indices summed."""
    if table is None:
        table = flat_bilinear_from_symbol_product(
            n, middle_degree(n)).cleaned()
    fit = fit_flat_table(table)
    parts = []
    for s, t, r in sorted(fit, key=lambda k: (-k[2], k[0], k[1])):
        c = fit[(s, t, r)]
        if c == 0:
            continue
        parts.append(_coeff_latex(c, not parts)
                     + _pattern_latex(s, t, r, fname, hname))
    body = " ".join(parts) if parts else "0"
    return rf"B_{{{n}}}({fname},{hname}) = {body}"


def _jet_subscript(indices) -> str:
    return "".join(str(i + 1) for i in indices)


def latex_pn_flat(n: int, doc: dict | None = None, hname: str = "h") -> str:
    """Coordinate display; jets are written with 1-based indices."""
    if doc is None:
        doc = pn_flat_document(n)
    parts = []
    for row in doc["terms"]:
        c = Fraction(row["coeff"])
        multi = row["h_jet"]
        idx = "".join(str(q + 1) * b for q, b in enumerate(multi))
        parts.append(_coeff_latex(c, not parts)
                     + rf"{hname}_{{;{idx}}}")
    lead = doc["conventions"]["leading_coefficient"]
    head = (rf"% leading coefficient {lead} on the "
            rf"power \Delta^{{{n // 2}}}")
    return head + "\n" + rf"P_{{{n}}}({hname}) = " + " ".join(parts)


def _descriptor_latex(text: str) -> str:
    head, _, inside = text.partition("[")
    inside = inside.rstrip("]")
    core, _, derivs = inside.partition(";")
    sub = _jet_subscript(int(a) for a in core.split())
    if derivs.strip():
        sub += ";" + _jet_subscript(int(a) for a in derivs.split())
    name = {"R": "R", "Schouten": r"\rho"}.get(head, head)
    return rf"{name}_{{{sub}}}"


def latex_curved(n: int, doc: dict, lhs: str,
                 fname: str = "f", hname: str = "h") -> str:
    parts = []
    for row in doc["terms"]:
        c = Fraction(row["coeff"])
        factors = [_descriptor_latex(d) for d in row["curvature"]]
        if row["f_jet"] is not None:
            factors.append(
                rf"{fname}_{{;{_jet_subscript(row['f_jet'])}}}")
        factors.append(rf"{hname}_{{;{_jet_subscript(row['h_jet'])}}}")
        parts.append(_coeff_latex(c, not parts) + r"\,".join(factors))
    return rf"{lhs} = " + " ".join(parts)
