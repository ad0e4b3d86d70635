"""``capcover`` command line: generate instances, solve one, compare many.

Exit codes: 0 success, 1 a verification check failed, 2 bad arguments,
3 infeasible instance.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from pathlib import Path

from .assignment import integralize
from .errors import BudgetExceeded, CapcoverError, InfeasibleError, InvariantViolation
from .field import TWO_PLUS_SQRT5, QSqrt5, format_factor, format_rational
from .instance import (
    Instance,
    Variant,
    format_instance,
    from_set_cover,
    generate_random,
    parse_rational,
    read_instance,
    validate_instance,
)
from .lp import build_mmcc_lp, dump_lp, solve_lp
from .oracle import greedy_cover, optimal_cover
from .rounding import PipelineConfig, format_trace, run_pipeline
from .solution import RoundedSolution, format_solution
from .verify import check_solution, check_trace

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3


def beta_for(variant: Variant) -> QSqrt5:
    """Expansion the rounding guarantees: 5 for monotonic capacities, 2 + sqrt5 for uniform."""
    return QSqrt5(5) if variant is Variant.MONOTONIC else TWO_PLUS_SQRT5


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _alpha(text: str) -> Fraction:
    try:
        a = parse_rational(text) if "/" in text else Fraction(int(text))
    except (ValueError, CapcoverError):
        raise argparse.ArgumentTypeError(f"alpha must be p/q, got {text!r}")
    if not 0 < a <= Fraction(1, 60):
        raise argparse.ArgumentTypeError(f"alpha must satisfy 0 < alpha <= 1/60, got {text}")
    return a


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capcover", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random or set-cover instance")
    g.add_argument("--points", type=_positive_int, default=6)
    g.add_argument("--balls", type=_positive_int, default=4)
    g.add_argument("--variant", choices=[v.value for v in Variant], default="monotonic")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--from-setcover", metavar="FILE",
                   help="one set per line, elements separated by whitespace")
    g.add_argument("--capacity", type=_positive_int)
    g.add_argument("-o", "--output")

    s = sub.add_parser("solve", help="LP, rounding, integral assignment and verification")
    s.add_argument("instance")
    s.add_argument("--alpha", type=_alpha, default=Fraction(1, 60))
    s.add_argument("--variant", choices=[v.value for v in Variant])
    s.add_argument("--budget", type=int, default=0,
                   help="also run the exact oracle when there are at most this many balls")
    s.add_argument("--trace", metavar="FILE")
    s.add_argument("--dump-lp", metavar="FILE")
    s.add_argument("-o", "--output", metavar="FILE", help="solution file")

    c = sub.add_parser("compare", help="oracle, greedy and rounding on every instance in a directory")
    c.add_argument("directory")
    c.add_argument("--alpha", type=_alpha, default=Fraction(1, 60))
    c.add_argument("--budget", type=int, default=20)
    c.add_argument("-o", "--output", metavar="FILE", help="CSV output")
    return ap


def _write(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_generate(args, ap) -> int:
    if args.from_setcover:
        if args.capacity is None:
            ap.error("--from-setcover needs --capacity")
        lines = Path(args.from_setcover).read_text().splitlines()
        sets = [line.split() for line in lines if line.strip() and not line.startswith("#")]
        inst = from_set_cover(sets, args.capacity)
    else:
        print(f"seed = {args.seed}", file=sys.stderr)
        inst = generate_random(args.points, args.balls, args.variant, args.seed)
    _write(format_instance(inst), args.output)
    return EXIT_OK


def _with_variant(inst: Instance, variant) -> Instance:
    if variant is None or Variant(variant) is inst.variant:
        return inst
    out = Instance(inst.space, inst.balls, Variant(variant), inst.clients)
    validate_instance(out)
    return out


def solve_instance(inst: Instance, alpha=Fraction(1, 60), budget: int = 0):
    """Run LP, rounding, integralization and all checks; returns a dict of results."""
    cfg = PipelineConfig(alpha=alpha)
    model = build_mmcc_lp(inst)
    sigma = solve_lp(model)
    result = run_pipeline(inst, cfg, sigma)
    beta = beta_for(inst.variant)
    phi = integralize(inst, result.rounded)
    integral = RoundedSolution.from_assignment(result.rounded.open, phi)
    opt = None
    if budget and len(inst.balls) <= budget:
        opt = optimal_cover(inst, budget=budget).opt_size
    reports = {
        "rounded": check_solution(inst, result.rounded, beta, lp_opt=sigma.cost, opt=opt),
        "integral": check_solution(inst, integral, beta, integral=True, lp_opt=sigma.cost, opt=opt),
        "trace": check_trace(result.trace, cfg, sigma.cost),
    }
    return {
        "model": model, "sigma": sigma, "result": result, "beta": beta,
        "phi": phi, "opt": opt, "reports": reports,
    }


def cmd_solve(args, ap) -> int:
    try:
        inst = _with_variant(read_instance(args.instance), args.variant)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    except (CapcoverError, ValueError) as exc:
        print(f"capcover solve: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.dump_lp:
        Path(args.dump_lp).write_text(dump_lp(build_mmcc_lp(inst)))
    try:
        out = solve_instance(inst, args.alpha, args.budget)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}")
        return EXIT_VERIFY
    result, reports = out["result"], out["reports"]
    rounded = result.rounded
    lines = [
        f"instance = {args.instance}",
        f"variant = {inst.variant.value}",
        f"alpha = {format_rational(args.alpha)}",
        f"lp_opt = {format_rational(out['sigma'].cost)}",
        f"cost = {rounded.cost}",
        f"opt = {out['opt'] if out['opt'] is not None else '?'}",
        f"beta_limit = {format_factor(out['beta'])}",
        f"max_expansion = {format_rational(reports['integral'].metrics['max_expansion'])}",
        f"heavy = {len(result.heavy)} light = {len(result.light)} "
        f"opened = {len(result.state.opened)} oprime = {len(result.o_prime)}",
    ]
    print("\n".join(lines))
    for name, rep in reports.items():
        print(f"\n# {name}")
        sys.stdout.write(rep.format())
    ok = all(r.ok for r in reports.values())
    print(f"\nresult = {'pass' if ok else 'fail'}")
    if args.output:
        Path(args.output).write_text(format_solution(rounded.open, out["phi"]))
    if args.trace:
        Path(args.trace).write_text(format_trace(result.trace))
    return EXIT_OK if ok else EXIT_VERIFY


COLUMNS = ("instance", "variant", "points", "balls", "lp", "opt", "greedy", "pipeline", "expansion", "status")


def compare_row(path: Path, alpha, budget) -> dict:
    row = {k: "" for k in COLUMNS}
    row["instance"] = path.name
    try:
        inst = read_instance(path)
        row.update(variant=inst.variant.value, points=len(inst.clients), balls=len(inst.balls))
        out = solve_instance(inst, alpha)
        row["lp"] = format_rational(out["sigma"].cost)
        row["pipeline"] = out["result"].rounded.cost
        row["expansion"] = format_rational(out["reports"]["integral"].metrics["max_expansion"])
        row["greedy"] = greedy_cover(inst).cost
        try:
            row["opt"] = optimal_cover(inst, budget=budget).opt_size
        except BudgetExceeded:
            row["opt"] = "?"
        ok = all(r.ok for r in out["reports"].values())
        if row["opt"] != "?" and not row["opt"] <= row["pipeline"]:
            ok = False
        row["status"] = "ok" if ok else "fail"
    except InfeasibleError:
        row["status"] = "infeasible"
    except (CapcoverError, ValueError) as exc:
        row["status"] = f"error:{type(exc).__name__}"
    return row


def format_table(rows) -> str:
    widths = {k: max([len(k)] + [len(str(r[k])) for r in rows]) for k in COLUMNS}
    lines = ["  ".join(k.ljust(widths[k]) for k in COLUMNS).rstrip()]
    for r in rows:
        lines.append("  ".join(str(r[k]).ljust(widths[k]) for k in COLUMNS).rstrip())
    return "\n".join(lines) + "\n"


def format_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_compare(args, ap) -> int:
    d = Path(args.directory)
    if not d.is_dir():
        ap.error(f"not a directory: {d}")
    rows = [compare_row(p, args.alpha, args.budget) for p in sorted(d.iterdir()) if p.is_file()]
    sys.stdout.write(format_table(rows))
    if args.output:
        Path(args.output).write_text(format_csv(rows))
    return EXIT_OK


def main(argv=None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)
    handler = {"generate": cmd_generate, "solve": cmd_solve, "compare": cmd_compare}[args.command]
    try:
        return handler(args, ap)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CapcoverError, ValueError, OSError) as exc:
        print(f"capcover {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
