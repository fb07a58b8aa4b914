"""Command-line entry point.

Exit status: 0 success, 1 a scan found a counterexample, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import barrington, bounds, encodings, mixedsim, partitions

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def decimal(x) -> float:
    return float(f"{float(x):.12g}")


# -- output ---------------------------------------------------------------------


def _rows_of(payload: dict) -> list[dict]:
    for key in ("rows", "minima", "partitions", "violations"):
        rows = payload.get(key)
        if isinstance(rows, list) and rows and isinstance(rows[0], dict):
            return rows
    flat = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
    return [flat]


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    rows = _rows_of(payload)
    columns = sorted({k for r in rows for k in r})
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
        return buf.getvalue()
    if "result" in payload and not isinstance(payload["result"], (dict, list)):
        return f"{payload['result']}\n"
    cells = [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


# -- commands -------------------------------------------------------------------


def cmd_partitions(args) -> tuple[dict, bool]:
    if args.action == "list":
        shapes = list(partitions.enumerate_partitions(args.M))
        rows = [{"partition": partitions.format_partition(p), "dimension": partitions.dimension(p)} for p in shapes]
        return {"M": args.M, "count": len(shapes), "partitions": rows}, True
    if args.shape is None:
        raise UsageError("--shape is required")
    lam = partitions.parse_partition(args.shape)
    shape = partitions.format_partition(lam)
    if args.action == "dim":
        return {"shape": shape, "result": partitions.dimension(lam)}, True
    if args.action == "conjugate":
        return {"shape": shape, "result": partitions.format_partition(partitions.conjugate(lam))}, True
    if args.action == "hooks":
        rows = [{"row": c.row, "col": c.col, "hook": h} for c, h in partitions.hook_lengths(lam).items()]
        return {"shape": shape, "rows": rows}, True
    if args.action == "restrict":
        rows = [
            {"partition": partitions.format_partition(mu), "dimension": partitions.dimension(mu)}
            for mu in partitions.restrict(lam)
        ]
        total = sum(r["dimension"] for r in rows)
        ok = total == partitions.dimension(lam)
        return {"shape": shape, "dimension": partitions.dimension(lam), "rows": rows, "sum": total}, ok
    raise UsageError(f"unknown partitions action {args.action}")


def cmd_bounds(args) -> tuple[dict, bool]:
    a = args.action
    if a == "phi":
        return {"A": args.A, "M": args.M, "result": bounds.phi(args.A, args.M)}, True
    if a == "theorem":
        params = bounds.TheoremParams(args.n, args.k, Fraction(args.delta), Fraction(args.c))
        return bounds.theorem_report(params, args.mode), True
    M = args.M
    if M is None:
        raise UsageError("--M is required")
    lo = args.M_from if args.M_from is not None else M
    reports = []
    for m in range(lo, M + 1):
        if a == "rasala":
            reports.append(bounds.check_rasala(m))
        elif a == "shape":
            reports.append(bounds.check_shape_lemma(m))
        elif a == "minimizer":
            reports.append(bounds.scan_phi_minimizer(m))
        elif a == "long-row":
            reports.append(bounds.check_long_row_or_column(m, int(args.budget)))
        else:
            raise UsageError(f"unknown bounds action {a}")
    dicts = [r.to_dict() for r in reports]
    if len(dicts) == 1:
        payload = dicts[0]
    else:
        payload = {
            "label": dicts[0]["label"],
            "range": [lo, M],
            "checked_count": sum(d["checked_count"] for d in dicts),
            "violations": [dict(v, M=d["range"][0]) for d in dicts for v in d["violations"]],
            "reports": dicts,
        }
    return payload, all(r.ok for r in reports)


def _load_bp(args) -> barrington.PermBP:
    if args.bp:
        return barrington.PermBP.from_json(Path(args.bp).read_text())
    if args.formula:
        return barrington.compile_formula(args.formula)
    raise UsageError("either --bp or --formula is required")


def cmd_compile(args) -> tuple[dict, bool]:
    f = barrington.parse_formula(args.formula)
    bp = barrington.compile_formula(f, args.num_vars)
    payload = bp.to_dict()
    payload["depth"] = f.depth
    payload["length"] = len(bp)
    return payload, True


def cmd_sim(args) -> tuple[dict, bool]:
    x = barrington.assignment_from_text(args.assign or "")
    if args.action == "run":
        bp = _load_bp(args)
    elif args.action == "accept":
        if not args.formula:
            raise UsageError("--formula is required")
        bp = mixedsim.acceptor_program(args.formula)
    else:
        raise UsageError(f"unknown sim action {args.action}")
    state = mixedsim.run_bp(bp, x, mixedsim.init_register(args.n, args.k))
    p0, p1 = mixedsim.measure(state, args.measure)
    payload = {
        "n": args.n,
        "k": args.k,
        "qubit": args.measure,
        "p0": decimal(p0),
        "p1": decimal(p1),
        "exact": f"{frac_str(p0)},{frac_str(p1)}",
        "permutation": list(barrington.eval_bp(bp, x)),
    }
    if args.action == "accept":
        payload["accepted"] = p1 == 0
    return payload, True


def cmd_encodings(args) -> tuple[dict, bool]:
    if args.action == "bound-difference":
        inst = encodings.build_perm_rep_instance(args.M, args.variant)
        report = encodings.check_bound_difference(inst, Fraction(args.c))
        return report.to_dict(), report.ok
    F = encodings.build_family(args.n, args.kind)
    if args.action == "report":
        method = "enumerate" if args.enumerate else "closed"
        return encodings.overlap_stats(F, method).to_dict(), True
    if args.action == "witness":
        if not args.perm:
            raise UsageError("--perm is required")
        pi = encodings.parse_index_perm(F, args.perm)
        payload = {"kind": args.kind, "n": args.n, "perm": args.perm}
        try:
            g = encodings.permutability_witness(F, pi)
        except encodings.UndecidedError as exc:
            payload.update(status="undecided", reason=str(exc))
            return payload, True
        if g is None:
            payload["status"] = "none"
        else:
            payload["status"] = "found"
            payload["witness"] = {
                encodings.int_to_bits(x, args.n): encodings.int_to_bits(y, args.n)
                for x, y in sorted(g.mapping.items())
            }
        return payload, True
    raise UsageError(f"unknown encodings action {args.action}")


def cmd_selftest(args) -> tuple[dict, bool]:
    from .selftest import run_selftest

    results = run_selftest(seed=args.seed)
    rows = [{"check": name, "passed": ok} for name, ok in results]
    return {"rows": rows, "passed": all(ok for _, ok in results)}, all(ok for _, ok in results)


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def add_common(p, suppress):
        # Accepted before or after the subcommand; the subcommand copies must
        # not overwrite a value given at the top level.
        default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        p.add_argument("--out", default=default(None), help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv", "table"), default=default("table"))
        p.add_argument("--seed", type=int, default=default(0))

    common = argparse.ArgumentParser(add_help=False)
    add_common(common, suppress=True)

    parser = argparse.ArgumentParser(prog="cleanqubit", description=__doc__)
    add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partitions", parents=[common], help="Young diagram queries")
    p.add_argument("action", choices=("dim", "hooks", "restrict", "conjugate", "list"))
    p.add_argument("--shape")
    p.add_argument("--M", type=int, default=0)
    p.set_defaults(func=cmd_partitions)

    p = sub.add_parser("bounds", parents=[common], help="dimension-bound scans and the qubit bound")
    p.add_argument("action", choices=("phi", "rasala", "shape", "minimizer", "long-row", "theorem"))
    p.add_argument("--M", type=int)
    p.add_argument("--M-from", type=int, dest="M_from", help="scan every M from this value up to --M")
    p.add_argument("--A", type=int, default=0)
    p.add_argument("--budget", default="16")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--delta", default="1")
    p.add_argument("--c", default="1")
    p.add_argument("--mode", choices=bounds.MODES, default="general")
    p.set_defaults(func=cmd_bounds)

    def add_compile(sp):
        sp.add_argument("--formula", required=True)
        sp.add_argument("--num-vars", type=int, dest="num_vars")
        sp.set_defaults(func=cmd_compile, format_default="json")

    add_compile(sub.add_parser("compile", parents=[common], help="compile a formula to a branching program"))
    p = sub.add_parser("barrington", parents=[common], help="alias group for compile")
    bsub = p.add_subparsers(dest="action", required=True)
    add_compile(bsub.add_parser("compile", parents=[common]))

    p = sub.add_parser("sim", parents=[common], help="run a program on a one-clean-qubit register")
    p.add_argument("action", choices=("run", "accept"))
    p.add_argument("--bp", help="program JSON produced by compile")
    p.add_argument("--formula")
    p.add_argument("--assign", default="")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--measure", type=int, default=1)
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("encodings", parents=[common], help="subspace encoding families")
    p.add_argument("action", choices=("report", "witness", "bound-difference"))
    p.add_argument("--kind", choices=("parity", "pointed"), default="parity")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--perm")
    p.add_argument("--enumerate", action="store_true", help="intersect member sets instead of closed forms")
    p.add_argument("--M", type=int, default=8)
    p.add_argument("--variant", choices=("coordinate", "complement"), default="complement")
    p.add_argument("--c", default="1")
    p.set_defaults(func=cmd_encodings)

    p = sub.add_parser("selftest", parents=[common], help="run the built-in invariant checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "format_default")}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    fmt = args.format
    argv = sys.argv[1:] if argv is None else argv
    if fmt == "table" and getattr(args, "format_default", None) and "--format" not in argv:
        fmt = args.format_default
    args.format = fmt
    try:
        payload, ok = args.func(args)
    except (UsageError, ValueError, KeyError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if fmt == "json":
        payload = dict(payload, config=_config(args))
    text = render(payload, fmt)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
