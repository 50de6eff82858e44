"""Command-line front end: ``expeq {solve,reduce,classify,bounds,oracle,fuzz}``."""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import geometry
from .bounds import LedgerError, bound_refined, bound_simple, default_ledger, parse_ledger_text
from .freeprod import format_element
from .problem import ProblemSyntaxError, parse_problem
from .reduction import ReductionError, reduce
from .solver import SAT, UNKNOWN, UNSAT, BoxTooLarge, SolveOptions, solve, solve_brute

EXIT_SAT, EXIT_UNSAT, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 64
_STATUS_EXIT = {SAT: EXIT_SAT, UNSAT: EXIT_UNSAT, UNKNOWN: EXIT_UNKNOWN}

UNSAT_CAVEAT = "note: UNSAT is relative to the ledger bound M; it is only as sound as M is valid"


class UsageError(Exception):
    pass


def _emit(obj, as_json: bool, text: str):
    if as_json:
        print(json.dumps(obj, indent=2, sort_keys=True, default=str))
    else:
        print(text)


def _load(args):
    try:
        with open(args.problem, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {args.problem}: {e.strerror}") from None
    problem = parse_problem(text)
    overrides = dict(problem.ledger_overrides)
    if getattr(args, "ledger", None):
        try:
            with open(args.ledger, encoding="utf-8") as fh:
                overrides.update(parse_ledger_text(fh.read()))
        except OSError as e:
            raise UsageError(f"cannot read {args.ledger}: {e.strerror}") from None
    mult = Fraction(getattr(args, "bound_multiplier", None) or 1)
    ledger = default_ledger(problem.spec, overrides, mult)
    return problem, ledger


def _parse_box(text: str, n: int):
    """``LO:HI`` for every variable, or ``LO:HI,LO:HI,...`` per variable."""
    try:
        parts = [tuple(int(x) for x in p.split(":")) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"bad box {text!r}; expected LO:HI") from None
    if any(len(p) != 2 or p[0] > p[1] for p in parts):
        raise UsageError(f"bad box {text!r}; expected LO:HI with LO <= HI")
    if len(parts) == 1:
        parts = parts * n
    if len(parts) != n:
        raise UsageError(f"box has {len(parts)} intervals for {n} variables")
    return parts


def _table(rows, header) -> str:
    rows = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args) -> int:
    problem, ledger = _load(args)
    opts = SolveOptions(max_branches=args.max_branches, refined=args.refined)
    verdict = solve(problem.equation, ledger, opts)
    out = verdict.to_json()
    if verdict.status == SAT:
        text = "SAT\n" + _table(sorted(verdict.assignment.items()), ["variable", "value"])
    elif verdict.status == UNSAT:
        text = f"UNSAT (exponent boxes {verdict.bounds['bounds']} exhausted)"
    else:
        text = f"UNKNOWN ({verdict.reason})"
    _emit(out, args.json, text)
    if verdict.status == UNSAT and args.certified_off:
        print(UNSAT_CAVEAT, file=sys.stderr)
    return _STATUS_EXIT[verdict.status]


def cmd_reduce(args) -> int:
    problem, _ = _load(args)
    try:
        phi = reduce(problem.equation)
    except ReductionError as e:
        raise UsageError(f"reduce needs parabolic or trivial bases: {e}") from None
    out = phi.to_json()
    lines = [f"{len(phi.branches)} branch(es); free variables: {', '.join(phi.free) or '-'}"]
    for i, br in enumerate(out["branches"]):
        lines.append(f"branch {i}:")
        for row in br["peripheral_rows"]:
            terms = " + ".join(f"{t['variable']}*{tuple(t['coefficient'])}" for t in row["terms"])
            lines.append(f"  [{row['factor']}] {tuple(row['constant'])} + {terms} = 0")
        for c in br["trivial_checks"]:
            lines.append(f"  check {c} = 1")
    _emit(out, args.json, "\n".join(lines))
    return 0


def _classify_entry(label, g):
    ty = geometry.classify(g)
    entry = {"label": label, "element": format_element(g), "type": ty.tag}
    if ty.is_parabolic:
        entry["factor"] = g.spec.factor_name(ty.factor)
        entry["conjugator"] = format_element(ty.witness)
    if ty.is_loxodromic:
        form = geometry.cyclic_reduce(g)
        entry["cyclic_core"] = format_element(form.reduced)
        entry["conjugator"] = format_element(form.conjugator)
        entry["stable_norm"] = geometry.stable_norm(g)
    return entry


def cmd_classify(args) -> int:
    problem, _ = _load(args)
    spec = problem.spec
    entries = []
    if args.element:
        for text in args.element:
            entries.append(_classify_entry(text, spec.element(text)))
    else:
        for t in problem.equation.terms:
            entries.append(_classify_entry(f"base of {t.variable}", t.base))
    rows = [[e["label"], e["element"], e["type"], e.get("stable_norm", "")] for e in entries]
    _emit({"elements": entries}, args.json, _table(rows, ["label", "element", "type", "stable norm"]))
    return 0


def cmd_bounds(args) -> int:
    problem, ledger = _load(args)
    report = (bound_refined if args.refined else bound_simple)(problem.equation, ledger)
    rows = sorted(report.bounds.items())
    text = _table(rows, ["variable", "bound"]) if rows else "no loxodromic bases"
    _emit(report.as_dict(), args.json, text)
    return 0


def cmd_oracle(args) -> int:
    problem, _ = _load(args)
    eq = problem.equation
    box = _parse_box(args.box, len(eq.terms))
    try:
        sols = solve_brute(eq, box)
    except BoxTooLarge as e:
        raise UsageError(str(e)) from None
    order = eq.variables
    rows = [[a[v] for v in order] for a in sols]
    text = f"{len(sols)} solution(s) in box\n" + _table(rows, list(order)) if sols else "no solutions in box"
    _emit({"box": box, "solutions": sols}, args.json, text)
    return EXIT_SAT if sols else EXIT_UNSAT


def cmd_fuzz(args) -> int:
    from . import generators

    rng = random.Random(args.seed)
    lo, hi = _parse_box(args.box, 1)[0]
    bad, counts = [], {}
    for _ in range(args.count):
        spec = rng.choice(generators.STANDARD_SPECS)()
        eq = generators.random_equation(rng, spec)
        sols = solve_brute(eq, (lo, hi))
        verdict = solve(eq, default_ledger(spec), SolveOptions(max_branches=args.max_branches))
        counts[verdict.status] = counts.get(verdict.status, 0) + 1
        if sols and verdict.status != SAT:
            bad.append(str(eq))
    out = {"seed": args.seed, "count": args.count, "verdicts": counts, "disagreements": bad}
    text = f"seed {args.seed}: {counts}; disagreements: {len(bad)}"
    _emit(out, args.json, text)
    return 0 if not bad else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON on stdout")
    common.add_argument("--ledger", metavar="FILE", help="key = value ledger overrides")
    common.add_argument("--bound-multiplier", metavar="X", help="scale M by X (a rational)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised subcommands")
    common.add_argument("--max-branches", type=int, default=None, help="cap on loxodromic branches")
    common.add_argument("--box", default="-10:10", help="LO:HI (all variables) or LO:HI,LO:HI,...")

    p = argparse.ArgumentParser(prog="expeq", description="Exponential equations over free products of abelian groups")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="run the full solver")
    s.add_argument("problem")
    s.add_argument("--refined", action="store_true", help="use the per-variable refined bound")
    s.add_argument("--certified-off", action="store_true", help="print the UNSAT soundness caveat")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("reduce", parents=[common], help="print the disjunction of abelian systems")
    s.add_argument("problem")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("classify", parents=[common], help="classify bases or given elements")
    s.add_argument("problem")
    s.add_argument("--element", action="append", help="element to classify (repeatable)")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("bounds", parents=[common], help="print loxodromic exponent bounds")
    s.add_argument("problem")
    s.add_argument("--refined", action="store_true")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("oracle", parents=[common], help="brute-force all solutions in --box")
    s.add_argument("problem")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("fuzz", parents=[common], help="compare solve with the oracle on random equations")
    s.add_argument("--count", type=int, default=100)
    s.set_defaults(func=cmd_fuzz, max_branches=500)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0
    try:
        if args.bound_multiplier is not None:
            try:
                Fraction(args.bound_multiplier)
            except ValueError:
                raise UsageError(f"bad --bound-multiplier {args.bound_multiplier!r}") from None
        return args.func(args)
    except (UsageError, ProblemSyntaxError, LedgerError) as e:
        print(f"expeq: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"expeq: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
