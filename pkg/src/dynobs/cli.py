"""Command-line front end.

Exit codes: 0 holds / all-agree / valid, 1 fails / disagreement,
2 unknown (oracle), 3 any parse, validation or budget error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import fixtures
from .augment import BudgetExceeded, to_dot
from .checker import CheckError, check
from .formulas import FormulaError, parse_formula
from .model import ModelError, parse_model, serialize_model
from .recall import Verdict, eval_bounded
from .reduction import ReductionError, check_via_reduction, translate, reduce_model
from .ktree import EmptyUpdateError


class CliError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


def _read_model(path: str):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise CliError("model-io", f"cannot read model file: {e}")
    try:
        return parse_model(text)
    except ModelError as e:
        raise CliError("model-parse", str(e))


def _read_formula(spec: str, m):
    if spec.startswith("@"):
        try:
            spec = Path(spec[1:]).read_text().strip()
        except OSError as e:
            raise CliError("formula-io", f"cannot read formula file: {e}")
    try:
        return parse_formula(spec, m)
    except FormulaError as e:
        raise CliError("formula-parse", str(e))


def _run_engine(m, f, engine: str, budget):
    if engine == "reduction":
        return check_via_reduction(m, f, budget=budget).verdict, None
    run = check(m, f, budget=budget)
    return run.verdict, run


def cmd_validate(args) -> int:
    try:
        text = Path(args.model).read_text()
    except OSError as e:
        raise CliError("model-io", f"cannot read model file: {e}")
    try:
        m = parse_model(text)
    except ModelError as e:
        print(f"INVALID {e}")
        return 3
    bad = m.validate()
    for v in bad:
        print(str(v))
    if bad:
        return 3
    print("VALID")
    return 0


def cmd_check(args) -> int:
    m = _read_model(args.model)
    f = _read_formula(args.formula, m)
    t0 = time.perf_counter()
    verdict, run = _run_engine(m, f, args.engine, args.budget)
    wall = (time.perf_counter() - t0) * 1000
    if run is not None and args.dump_augmented:
        Path(args.dump_augmented).write_text(to_dot(run.augmented))
    if run is not None and args.report:
        Path(args.report).write_text(json.dumps(run.report(include_labels=args.stats), indent=2) + "\n")
    if args.stats and run is not None:
        for lvl, n in run.augmented.level_counts().items():
            print(f"level {lvl}: {n} nodes")
        print(f"passes: {run.stats['passes']}  wall_ms: {run.stats['wall_ms']}")
    if args.stats and run is None:
        print(f"engine: reduction  wall_ms: {wall:.3f}")
    print("HOLDS" if verdict else "FAILS")
    return 0 if verdict else 1


def cmd_oracle(args) -> int:
    m = _read_model(args.model)
    f = _read_formula(args.formula, m)
    v = eval_bounded(m, (m.initial_state,), None, f, args.bound)
    print(v.value)
    return {"HOLDS": 0, "FAILS": 1, "UNKNOWN": 2}[v.value]


def cmd_compare(args) -> int:
    m = _read_model(args.model)
    f = _read_formula(args.formula, m)
    direct = check(m, f, budget=args.budget).verdict
    red = check_via_reduction(m, f, budget=args.budget).verdict
    oracle = eval_bounded(m, (m.initial_state,), None, f, args.bound)
    rows = [
        ("direct", Verdict.HOLDS if direct else Verdict.FAILS),
        ("reduction", Verdict.HOLDS if red else Verdict.FAILS),
        (f"oracle[{args.bound}]", oracle),
    ]
    for name, v in rows:
        print(f"{name:<12} {v.value}")
    definite = {v for _, v in rows if v is not Verdict.UNKNOWN}
    ok = len(definite) == 1
    print("AGREE" if ok else "DISAGREE")
    return 0 if ok else 1


def cmd_reduce(args) -> int:
    m = _read_model(args.model)
    f = _read_formula(args.formula, m)
    ri = reduce_model(m)
    f2 = translate(f, m)
    from .formulas import format_formula

    Path(args.out_model).write_text(serialize_model(ri.model))
    Path(args.out_formula).write_text(format_formula(f2) + "\n")
    print(f"wrote {args.out_model} ({len(ri.model.states)} states) and {args.out_formula}")
    return 0


def cmd_examples(args) -> int:
    files = fixtures.FILES.get(args.which)
    if files is None:
        raise CliError("unknown-fixture", f"no fixture named '{args.which}'")
    for name, text in files.items():
        Path(name).write_text(text)
        print(f"wrote {name}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dynobs", description="Model checker for temporal-epistemic logic with observation change.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a model file")
    p.add_argument("--model", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("check", help="decide a formula on a model")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True, help="formula text, or @file")
    p.add_argument("--engine", choices=("direct", "reduction"), default="direct")
    p.add_argument("--budget", type=int, default=None, help="node budget override")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--dump-augmented", metavar="FILE.dot")
    p.add_argument("--report", metavar="FILE.json")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("oracle", help="bounded three-valued evaluation at the initial state")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("compare", help="run both engines and the oracle, report agreement")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("reduce", help="emit the static-observation encoding")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--out-model", required=True)
    p.add_argument("--out-formula", required=True)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("examples", help="write a bundled fixture to the working directory")
    p.add_argument("which", choices=sorted(fixtures.FILES))
    p.set_defaults(fn=cmd_examples)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return 3
    except (ModelError, FormulaError, CheckError, ReductionError, EmptyUpdateError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    except BudgetExceeded as e:
        print(f"error: budget-exceeded: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
