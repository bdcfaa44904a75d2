"""Command-line interface: eta / coverings / povm / cosets / reproduce.

Exit codes: 0 success, 1 oracle or table mismatch, 2 usage error,
3 resource cap (node budget or coset limit) exceeded.  The search node
budget may also be set through the COVERPOVM_NODE_BUDGET environment
variable; the --node-budget flag wins.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import catalog
from .homology import first_homology, homology_string, rewrite_presentation
from .lowindex import (
    DEFAULT_NODE_BUDGET,
    NodeBudgetExceeded,
    conjugacy_class_size,
    cusp_count,
    eta_sequence,
    image_order,
    low_index_subgroups,
)
from .povm import PauliGroupSpec, povm_scan
from .presentation import ParseError, parse_presentation, parse_word
from .reproduce import TABLES, reproduce
from .todd_coxeter import CosetLimitExceeded, enumerate_cosets

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _add_source_args(sub):
    g = sub.add_mutually_exclusive_group(required=True)
    g.add_argument("--group", help="catalog key (an unknown key lists all keys)")
    g.add_argument("--presentation", help="presentation text, e.g. '< x, y | x^2 = y^3 >'")
    g.add_argument("--presentation-file",
                   help="file containing one presentation in the same grammar")
    sub.add_argument("--surgery", metavar="P,Q",
                     help="fill meridian^P * longitude^Q before computing (catalog groups with peripherals only)")
    sub.add_argument("--component", type=int, default=1,
                     help="link component for --surgery (1-based, default 1)")


def _add_common(sub):
    sub.add_argument("--format", choices=("text", "csv", "json"), default="text")
    sub.add_argument("--node-budget", type=int,
                     default=int(os.environ.get("COVERPOVM_NODE_BUDGET",
                                                DEFAULT_NODE_BUDGET)))
    sub.add_argument("--output", help="write to this file instead of stdout")


def _resolve(args):
    """(presentation, catalog entry or None) from the source arguments."""
    if args.group:
        entry = catalog.get(args.group)  # unknown keys raise with the key list
        pres = entry.presentation
    else:
        entry = None
        text = args.presentation
        if getattr(args, "presentation_file", None):
            with open(args.presentation_file, encoding="utf-8") as fh:
                text = fh.read().strip()
        pres = parse_presentation(text)
    if getattr(args, "surgery", None):
        if entry is None:
            raise ValueError("--surgery needs a catalog group with peripheral data")
        p, q = (int(v) for v in args.surgery.split(","))
        pres = catalog.surgery_quotient(entry, args.component, p, q)
        entry = None  # oracles of the unfilled group no longer apply
    return pres, entry


def _emit(args, text):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_eta(args) -> int:
    pres, entry = _resolve(args)
    eta = eta_sequence(pres, args.max_d, args.node_budget).as_list()
    rows = [(d + 1, n) for d, n in enumerate(eta)]
    if args.format == "json":
        _emit(args, json.dumps({"eta": eta}, indent=2) + "\n")
    elif args.format == "csv":
        _emit(args, "d,count\n" + "".join(f"{d},{n}\n" for d, n in rows))
    else:
        _emit(args, ",".join(str(n) for n in eta) + "\n")
    if args.oracle:
        if entry is None or "eta" not in entry.oracle:
            sys.stderr.write("no oracle data for this group\n")
            return EXIT_USAGE
        expect = entry.oracle["eta"][: args.max_d]
        got = eta[: len(expect)]
        if got != expect:
            diff = [f"d={i + 1}: computed {g} != expected {e}"
                    for i, (g, e) in enumerate(zip(got, expect)) if g != e]
            sys.stderr.write("oracle mismatch\n" + "\n".join(diff) + "\n")
            return EXIT_MISMATCH
        sys.stderr.write("PASS\n")
    return EXIT_OK


def _class_table(pres, entry, args, with_povm):
    if with_povm and (args.rank_cutoff <= 0 or args.sic_tol <= 0):
        raise ValueError("tolerances must be positive")
    records = low_index_subgroups(pres, args.max_d, args.node_budget)
    rows = []
    for i, r in enumerate(records):
        hom = homology_string(first_homology(rewrite_presentation(pres, r.table)))
        cp = cusp_count(r, entry.peripherals) if entry and entry.peripherals else None
        rk = pp = comment = None
        if with_povm and r.index >= 2:
            factors = args.factors
            if factors is not None:
                prod = 1
                for m in factors:
                    prod *= m
                if prod != r.index:
                    factors = None  # override only applies at its own degree
            spec = PauliGroupSpec.for_dimension(r.index, factors)
            scan = povm_scan(r, spec, args.element_cap,
                             rank_cutoff=args.rank_cutoff, sic_tol=args.sic_tol)
            best = scan.best
            if best is not None:
                rk, pp = best.gram_rank, best.pp
                comment = ("SIC" if best.is_sic else
                           "IC" if best.is_ic else "")
                if best.from_stabilizer:
                    comment = (comment + " (stabilizer)").strip()
                if scan.element_cap_hit:
                    comment = (comment + " (element cap)").strip()
        order = None
        if args.image_order:
            order = image_order(r)
            order = "large" if order is None else order
        rows.append({"class": i, "d": r.index, "ty": r.covering_type,
                     "hom": hom, "cp": cp, "rk": rk, "pp": pp,
                     "comment": comment or "",
                     "class_size": conjugacy_class_size(r),
                     "image_order": order,
                     "permutations": [list(img) for img in r.rep.images]})
    return rows


def _render_rows(args, rows, columns):
    if args.format == "json":
        keep = [{k: row[k] for k in
                 (["class"] + columns + ["class_size", "permutations"]
                  + (["image_order"] if args.image_order else []))}
                for row in rows]
        return json.dumps(keep, indent=2) + "\n"
    out = [",".join(columns)]
    for row in rows:
        out.append(",".join("" if row[c] is None else str(row[c]) for c in columns))
    return "\n".join(out) + "\n"


def _cmd_coverings(args) -> int:
    pres, entry = _resolve(args)
    rows = _class_table(pres, entry, args, with_povm=args.povm)
    cols = ["d", "ty", "hom", "cp"] + (["rk", "pp", "comment"] if args.povm else [])
    _emit(args, _render_rows(args, rows, cols))
    return EXIT_OK


def _cmd_povm(args) -> int:
    pres, entry = _resolve(args)
    args.max_d = args.degree
    rows = [r for r in _class_table(pres, entry, args, with_povm=True)
            if r["d"] == args.degree]
    cols = ["d", "ty", "hom", "cp", "rk", "pp", "comment"]
    _emit(args, _render_rows(args, rows, cols))
    return EXIT_OK


def _cmd_cosets(args) -> int:
    pres, _entry = _resolve(args)
    names = pres.generator_names()
    subgens = []
    if args.subgroup:
        for part in args.subgroup.split(","):
            if part.strip():
                subgens.append(parse_word(part.strip(), names))
    table = enumerate_cosets(pres, subgens, max_cosets=args.max_cosets)
    _emit(args, table.to_csv())
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    names = list(TABLES) if args.table == "all" else [args.table]
    worst = EXIT_OK
    for name in names:
        code, cells = reproduce(name, args.node_budget)
        lines = [f"== {name} =="] + [c.line() for c in cells]
        counts = {s: sum(1 for c in cells if c.status == s)
                  for s in ("PASS", "WARN", "FAIL", "INFO")}
        lines.append(f"summary {name}: " + " ".join(f"{k}={v}" for k, v in counts.items()))
        _emit(args, "\n".join(lines) + "\n")
        worst = max(worst, code)
    return worst


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coverpovm",
        description="Finite-index coverings of knot/link/surgery groups and "
                    "Pauli-orbit POVM certification.")
    sub = ap.add_subparsers(dest="command", required=True)

    p_eta = sub.add_parser("eta", help="conjugacy-class counts per degree")
    _add_source_args(p_eta)
    _add_common(p_eta)
    p_eta.add_argument("--max-d", type=int, default=8)
    p_eta.add_argument("--oracle", action="store_true",
                       help="compare against the catalog oracle; exit 1 on mismatch")
    p_eta.set_defaults(fn=_cmd_eta)

    p_cov = sub.add_parser("coverings", help="per-class rows (d, ty, hom, cp)")
    _add_source_args(p_cov)
    _add_common(p_cov)
    p_cov.add_argument("--max-d", type=int, default=6)
    p_cov.add_argument("--povm", action="store_true",
                       help="add rk/pp/comment columns from the POVM scan")
    p_cov.add_argument("--factors", type=lambda s: tuple(int(v) for v in s.split(",")),
                       default=None, help="Pauli factorization override, e.g. 2,2")
    p_cov.add_argument("--element-cap", type=int, default=20000)
    p_cov.add_argument("--rank-cutoff", type=float, default=1e-8,
                       help="relative singular-value cutoff for the Gram rank")
    p_cov.add_argument("--sic-tol", type=float, default=1e-8,
                       help="absolute tolerance for the SIC relation check")
    p_cov.add_argument("--image-order", action="store_true",
                       help="also compute the order of each permutation image")
    p_cov.set_defaults(fn=_cmd_coverings)

    p_povm = sub.add_parser("povm", help="POVM reports for all classes of one degree")
    _add_source_args(p_povm)
    _add_common(p_povm)
    p_povm.add_argument("--degree", type=int, required=True)
    p_povm.add_argument("--factors", type=lambda s: tuple(int(v) for v in s.split(",")),
                        default=None)
    p_povm.add_argument("--element-cap", type=int, default=20000)
    p_povm.add_argument("--rank-cutoff", type=float, default=1e-8)
    p_povm.add_argument("--sic-tol", type=float, default=1e-8)
    p_povm.add_argument("--image-order", action="store_true")
    p_povm.set_defaults(fn=_cmd_povm)

    p_cos = sub.add_parser("cosets", help="Todd-Coxeter coset table as CSV")
    _add_source_args(p_cos)
    _add_common(p_cos)
    p_cos.add_argument("--subgroup", default="",
                       help="comma-separated subgroup generator words")
    p_cos.add_argument("--max-cosets", type=int, default=10**6)
    p_cos.set_defaults(fn=_cmd_cosets)

    p_rep = sub.add_parser("reproduce", help="reproduce a published table")
    p_rep.add_argument("table", choices=TABLES + ("all",))
    _add_common(p_rep)
    p_rep.set_defaults(fn=_cmd_reproduce)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (ParseError, KeyError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except (NodeBudgetExceeded, CosetLimitExceeded) as e:
        sys.stderr.write(f"resource cap: {e}\n")
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
