"""Command line entry point.

    hhverify check --expr "x^2" --a 0 --b 1 --phi 0 --theorem tt2 [--p 2] [--q 1] --format pretty
    hhverify suite --config suite.json [--out report.json] [--csv report.csv]
    hhverify falsify --config sweep.json --target violate-with-hypothesis
    hhverify explain tt2

Exit codes: 0 ok, 1 usage or config error, 2 a bound failed under a certified hypothesis.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .bounds import THEOREMS, HolderParams, ParameterError, Status, TheoremId, explain
from .convexity import DEFAULT_GRID
from .corpus import CorpusEntry
from .expr import ParseError
from .harness import TARGETS, ConfigError, SuiteConfig, Task, falsify, run_suite, run_task
from .quadrature import DEFAULT_TOL
from .report import SuiteReport, csv_from_json
from .segment import PhiSegment, SegmentError

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hhverify", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="evaluate one theorem instance")
    c.add_argument("--expr", required=True)
    c.add_argument("--a", type=float, required=True)
    c.add_argument("--b", type=float, required=True)
    c.add_argument("--phi", type=float, default=0.0)
    c.add_argument("--theorem", required=True, choices=[t.value for t in TheoremId])
    c.add_argument("--p", type=float)
    c.add_argument("--q", type=float)
    c.add_argument("--grid", type=int, default=DEFAULT_GRID)
    c.add_argument("--tol", type=float, default=DEFAULT_TOL)
    c.add_argument("--format", choices=("json", "csv", "pretty"), default="pretty")

    s = sub.add_parser("suite", help="run a configured suite")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="write canonical JSON here instead of stdout")
    s.add_argument("--csv", help="also write the CSV view here")

    f = sub.add_parser("falsify", help="random search for counterexamples")
    f.add_argument("--config", required=True)
    f.add_argument("--target", choices=TARGETS, default="violate-with-hypothesis")
    f.add_argument("--out")
    f.add_argument("--csv")

    e = sub.add_parser("explain", help="print a theorem's statement")
    e.add_argument("theorem")
    return parser


def _pretty(report: SuiteReport) -> str:
    lines = []
    for rec in report.records:
        seg = rec.segment
        head = (f"{rec.theorem.value:<18} f = {rec.expr}   a={seg.a:g} b={seg.b:g} "
                f"phi={seg.phi:.6g}")
        lines.append(head)
        if rec.result is None:
            lines.append(f"  status     {rec.status.value}: {rec.error}")
            continue
        r = rec.result
        sharp = "n/a" if r.sharpness is None else f"{r.sharpness:.6f}"
        lines += [
            f"  lhs        {r.lhs:.12g}",
            f"  rhs        {r.rhs:.12g}",
            f"  margin     {r.margin:.6g}",
            f"  sharpness  {sharp}",
            f"  hypothesis {r.hypothesis.target} {r.hypothesis.kind.value}: "
            f"{r.hypothesis.verdict.value}",
            f"  status     {r.status.value}",
        ]
        lines += [f"  flag       {x}" for x in r.flags]
        lines += [f"  note       {x}" for x in r.notes]
        lines += [f"  {k:<10} {v}" for k, v in r.aux.items()]
    return "\n".join(lines)


def _emit(report: SuiteReport, out, csv_path) -> None:
    text = report.to_json()
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_from_json(text))


def _check(args) -> int:
    try:
        entry = CorpusEntry("cli", args.expr, smooth=True)
        entry.parsed
        seg = PhiSegment(args.a, args.b, args.phi)
        params = HolderParams(args.p, args.q)
    except (ParseError, SegmentError, ParameterError) as exc:
        print(f"hhverify check: {exc}", file=sys.stderr)
        return EXIT_USAGE
    th = TheoremId(args.theorem)
    missing = [n for n in THEOREMS[th].needs if getattr(args, n) is None]
    if missing:
        print(f"hhverify check: theorem {th.value} needs --{missing[0]}", file=sys.stderr)
        return EXIT_USAGE
    rec = run_task(Task(0, entry, th, seg, params, args.tol, args.grid))
    report = SuiteReport({"mode": "check", "tol": args.tol, "grid": args.grid}, [rec])
    if args.format == "json":
        print(report.to_json())
    elif args.format == "csv":
        print(csv_from_json(report.to_json()), end="")
    else:
        print(_pretty(report))
    return EXIT_VIOLATION if rec.status is Status.VIOLATED_WITH_HYPOTHESIS else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "explain":
        try:
            print(explain(args.theorem))
        except KeyError as exc:
            print(f"hhverify explain: {exc.args[0]}", file=sys.stderr)
            return EXIT_USAGE
        return EXIT_OK
    if args.command == "check":
        return _check(args)
    try:
        cfg = SuiteConfig.load(args.config)
        report = run_suite(cfg) if args.command == "suite" else falsify(cfg, args.target)
    except ConfigError as exc:
        print(f"hhverify {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(report, args.out, args.csv)
    return EXIT_VIOLATION if report.violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
