"""Command line front end.

Exit codes: 0 on success, 1 when a verification suite reports a failing
check, 2 on usage errors (unsupported dimension, bad flags).
"""
from __future__ import annotations

import argparse
import sys

from . import emit


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wrescalc",
        description="Exact middle-degree residue tables and the critical "
                    "operators extracted from them.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bn = sub.add_parser(
        "bn-flat", help="flat bilinear coefficient table")
    p_bn.add_argument("--dim", type=int, required=True, metavar="N",
                      help="even dimension between 2 and 10")
    p_bn.add_argument("--format", choices=("json", "latex"),
                      default="json")

    p_pn = sub.add_parser(
        "pn", help="critical operator (flat, or curved with --curved)")
    p_pn.add_argument("--dim", type=int, required=True, metavar="N")
    p_pn.add_argument("--curved", action="store_true",
                      help="general-metric operator (dimension 4 only)")
    p_pn.add_argument("--format", choices=("json", "latex"),
                      default="json")

    p_v = sub.add_parser("verify", help="run the self-check suites")
    p_v.add_argument("--suite", default="all",
                     choices=("all", "traces", "flat", "curved",
                              "identities", "numeric"))
    return parser


def _cmd_bn_flat(parser, args) -> int:
    n = args.dim
    if n % 2 or not 2 <= n <= 10:
        parser.error("--dim must be an even dimension between 2 and 10")
    if n > 8:
        print(f"note: dimension {n} is assembled exactly and may take "
              "several minutes", file=sys.stderr)
    if args.format == "latex":
        print(emit.latex_bn_flat(n))
    else:
        sys.stdout.write(emit.render(emit.bn_flat_document(n)))
    return 0


def _cmd_pn(parser, args) -> int:
    n = args.dim
    if args.curved:
        if n != 4:
            parser.error("--curved is validated for --dim 4 only")
        from .covariant import cov_extract_divergence_form
        from .curved import (cov_leading_coefficient, paneitz_operator,
                             pn_curved)
        op = pn_curved(n)
        calc = op.bilinear.calc
        lead = cov_leading_coefficient(calc, op.value, n)
        ok, _w, _d, s_lead = cov_extract_divergence_form(calc, op.core)
        pan = calc.canonicalize(paneitz_operator(calc))
        kappa = lead / cov_leading_coefficient(calc, pan, n)
        if not calc.canonicalize(op.value - pan * kappa).is_zero():
            kappa = None
        doc = emit.pn_curved_document(
            n, op.value, leading=lead,
            s_leading=s_lead if ok else None,
            fourth_order_ratio=kappa)
        if args.format == "latex":
            print(f"% leading coefficient {lead} on the power \\Delta^2")
            print(emit.latex_curved(n, doc, f"P_{{{n}}}(h)"))
        else:
            sys.stdout.write(emit.render(doc))
        return 0
    if n not in (2, 4, 6, 8):
        parser.error("flat operator is validated for --dim 2, 4, 6 or 8; "
                     "use --curved --dim 4 for the general-metric case")
    doc = emit.pn_flat_document(n)
    if args.format == "latex":
        print(emit.latex_pn_flat(n, doc))
    else:
        sys.stdout.write(emit.render(doc))
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_suites
    failures = 0
    results = run_suites(args.suite)
    for suite, name, ok, detail in results:
        line = f"{'PASS' if ok else 'FAIL'} {suite}:{name}"
        if detail:
            line += f"  [{detail}]"
        print(line, flush=True)
        failures += not ok
    print(f"{'FAIL' if failures else 'PASS'} total: {len(results)} checks, "
          f"{failures} failing")
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "bn-flat":
        return _cmd_bn_flat(parser, args)
    if args.command == "pn":
        return _cmd_pn(parser, args)
    return _cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
