"""Command-line front end.

Exit codes: 0 ok, 1 type error, 2 parse error, 3 fuel exhausted,
4 metric violation, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional

from . import syntax as S
from .checker import check_program, declared_sensitivities, infer
from .errors import FuzzError, ParseError, TypeCheckError
from .evaluator import FuelExhausted, Stuck, Terminated, run_program, evaluate
from .extreal import format_ext, to_json
from .generate import GenConfig, UnsupportedType
from .harness import HarnessError, check_fix_bound, check_metric_preservation, report_json, summarize
from .parser import Program, parse_program, parse_term

EXIT_OK = 0
EXIT_TYPE = 1
EXIT_PARSE = 2
EXIT_FUEL = 3
EXIT_VIOLATION = 4
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {n}")
    return n


def _nonneg_float(text: str) -> float:
    x = float(text)
    if not x >= 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return x


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgumentParser(prog="metricfuzz", description="Sensitivity checking and testing for Fuzz programs.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("check", help="typecheck a program and print its type and sensitivities")
    p.add_argument("path")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--unsafe", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("sens", help="print the sensitivity of the program to each declared variable")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("run", help="evaluate a program on concrete inputs")
    p.add_argument("path")
    p.add_argument("--input", action="append", default=[], metavar="x=LITERAL")
    p.add_argument("--fuel", type=_positive, default=100_000)

    p = sub.add_parser("test", help="randomized metric-preservation check")
    p.add_argument("path")
    p.add_argument("--trials", type=_positive, default=1000)
    p.add_argument("--fuel", type=_positive, default=GenConfig.fuel)
    p.add_argument("--delta", type=_nonneg_float, default=GenConfig.perturb_delta)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-depth", type=int, default=GenConfig.max_list_depth)
    p.add_argument("--json", metavar="OUT", help="write the JSON report to OUT")
    p.add_argument("--unsafe", action="store_true",
                   help="skip the lambda and fix sensitivity checks (to test the harness itself)")

    p = sub.add_parser("fixbound", help="check the fix[r] sensitivity bound on decaying-list map")
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--len", type=int, default=10, dest="list_len")
    p.add_argument("--delta", type=_nonneg_float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    return ap


def _load(path: str) -> Program:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_program(text)


def cmd_check(args) -> int:
    prog = _load(args.path)
    res = check_program(prog, unsafe=args.unsafe)
    env = declared_sensitivities(prog, res)
    if args.json:
        print(json.dumps({
            "type": S.pretty_type(res.type),
            "env": {x: {"sens": to_json(b.sens), "type": S.pretty_type(b.type)} for x, b in env.items()},
        }))
    else:
        print(f"type: {S.pretty_type(res.type)}")
        for x, b in env.items():
            print(f"  {x} :[{format_ext(b.sens)}] {S.pretty_type(b.type)}")
    return EXIT_OK


def cmd_sens(args) -> int:
    prog = _load(args.path)
    env = declared_sensitivities(prog, check_program(prog))
    if args.json:
        print(json.dumps({x: to_json(b.sens) for x, b in env.items()}))
    else:
        for x, b in env.items():
            print(f"{x}: {format_ext(b.sens)}")
    return EXIT_OK


def _parse_inputs(prog: Program, specs: List[str]) -> Dict[str, S.Value]:
    inputs = {}
    for spec in specs:
        name, sep, literal = spec.partition("=")
        name = name.strip()
        if not sep or not name:
            raise UsageError(f"--input expects x=LITERAL, got {spec!r}")
        if name not in prog.freevars:
            raise UsageError(f"'{name}' is not a declared variable")
        try:
            term = parse_term(literal, prog.typedefs)
        except ParseError as exc:
            raise UsageError(exc.render(f"--input {name}")) from None
        res = infer(prog.typedefs, {}, term)
        if res.type != prog.freevars[name]:
            raise TypeCheckError(
                f"input '{name}' has type {S.pretty_type(res.type)}, "
                f"declared {S.pretty_type(prog.freevars[name])}"
            )
        out = evaluate(prog.typedefs, {}, term, 1_000_000)
        if not isinstance(out, Terminated):
            raise TypeCheckError(f"input '{name}' does not evaluate to a value")
        inputs[name] = out.value
    missing = [x for x in prog.freevars if x not in inputs]
    if missing:
        raise UsageError(f"missing --input for: {', '.join(missing)}")
    return inputs


def cmd_run(args) -> int:
    prog = _load(args.path)
    check_program(prog)
    inputs = _parse_inputs(prog, args.input)
    out = run_program(prog, inputs, args.fuel)
    if isinstance(out, FuelExhausted):
        print(f"{args.path}: fuel exhausted after {out.fuel_used} steps", file=sys.stderr)
        return EXIT_FUEL
    if isinstance(out, Stuck):
        print(f"{args.path}: evaluation stuck: {out.description}", file=sys.stderr)
        return EXIT_TYPE
    print(S.pretty_value(out.value))
    return EXIT_OK


def cmd_test(args) -> int:
    prog = _load(args.path)
    try:
        cfg = GenConfig(
            trials=args.trials, fuel=args.fuel, perturb_delta=args.delta,
            seed=args.seed, max_list_depth=args.max_depth,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        reports = check_metric_preservation(prog, cfg, unsafe=args.unsafe)
    except (HarnessError, UnsupportedType) as exc:
        print(f"{args.path}: cannot test: {exc}", file=sys.stderr)
        return EXIT_TYPE
    summary = summarize(reports)
    print(f"{args.path}: {summary.trials} trials, {summary.passes} passed, "
          f"{len(summary.violations)} violations, {summary.inconclusive} inconclusive")
    for r in summary.violations[:5]:
        print(f"  trial {r.index}: {r.reason}: input distance {format_ext(r.input_distance.value)}"
              + ("" if r.output_distance is None else
                 f", output distance {format_ext(r.output_distance.value)}"))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report_json(args.path, cfg, reports), fh, indent=2)
    return EXIT_OK if summary.ok else EXIT_VIOLATION


def cmd_fixbound(args) -> int:
    if not 0 < args.r < 1:
        raise UsageError("--r must lie in (0, 1)")
    if args.list_len < 0:
        raise UsageError("--len must be nonnegative")
    rep = check_fix_bound(args.r, args.list_len, args.delta, GenConfig(seed=args.seed))
    if args.json:
        print(json.dumps(rep.to_json()))
    else:
        print(f"r = {format_ext(rep.r)}, length {rep.list_len}, delta {rep.delta}")
        print(f"  inferred sensitivity of map to f: {format_ext(rep.inferred_sensitivity)}")
        print(f"  output distance {format_ext(rep.output_distance.value)}"
              f" <= bound {format_ext(rep.bound)}: {'yes' if rep.holds else 'NO'}")
    return EXIT_OK if rep.holds else EXIT_VIOLATION


COMMANDS = {"check": cmd_check, "sens": cmd_sens, "run": cmd_run, "test": cmd_test, "fixbound": cmd_fixbound}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    path = getattr(args, "path", "<input>")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"metricfuzz: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(exc.render(path), file=sys.stderr)
        return EXIT_PARSE
    except FuzzError as exc:
        print(exc.render(path), file=sys.stderr)
        return EXIT_TYPE


if __name__ == "__main__":
    sys.exit(main())
