"""Command-line entry point: ``schurlab <subcommand> ...``.

Exit codes: 0 success or decided, 1 usage error, 2 budget exhausted or
unknown outcome, 3 I/O error (unreadable, unwritable or malformed files).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from schurlab.arith import TupleCountQuery, count_bounded_product_tuples, enumerate_product_triples
from schurlab.constructions import (
    PatternParams,
    PlanError,
    build_interval_colouring,
    build_pattern,
    colour_set_by_intervals,
    find_pattern,
    greedy_disjoint_power_family,
    make_interval_plan,
    power_family_bound,
    verify_pattern_product_schur,
)
from schurlab.errors import BudgetExceeded
from schurlab.greedy import (
    check_forbidden_configuration,
    effective_size,
    extract_forbidden_configuration,
    greedy_two_colour,
)
from schurlab.lab import (
    ExperimentConfig,
    export_report,
    parse_config,
    report_to_csv,
    report_to_json,
    run_greedy_failure_census,
    run_threshold_experiment,
)
from schurlab.sampler import SEED_ENV, RandomSetSpec, p_from_exponent, resolve_seed, sample_binomial_set
from schurlab.sets import IntegerSet, format_set, parse_set
from schurlab.solve import (
    DEFAULT_PRODUCT_BUDGET,
    DEFAULT_SCHUR_BUDGET,
    LETTERS,
    RColouring,
    SumConstraintMode,
    Verdict,
    is_product_schur,
    monochromatic_triples,
    schur_number,
    verify_sum_colouring,
)

EXIT_OK, EXIT_USAGE, EXIT_UNKNOWN, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


@dataclass(frozen=True)
class Example:
    """A documented invocation; ``expect`` must appear as a whole line of ``stream``."""

    argv: tuple[str, ...]
    expect: str
    stdin: str | None = None
    exit_code: int = EXIT_OK
    stream: str = "stdout"

    def shell(self) -> str:
        cmd = "schurlab " + " ".join(self.argv)
        if self.stdin is not None:
            cmd = f"printf '{self.stdin.encode('unicode_escape').decode()}' | {cmd}"
        return cmd


POWERS_OF_TWO = "n=134217728\n32\n64\n128\n512\n2048\n65536\n134217728\n"

EXAMPLES: dict[str, list[Example]] = {
    "sample": [
        Example(("sample", "--n", "10", "--p", "1"), "n=10"),
        Example(("sample", "--n", "2048", "--exponent=-1/11", "--seed", "7"), "n=2048"),
        Example(("sample", "--n", "10", "--p", "0", "--json"), '{"elements": [], "n": 10, "p": 0.0, "seed": 0, "size": 0, "trial_index": 0}'),
    ],
    "greedy": [
        Example(("greedy", "--input", "-"), "failure at 134217728", stdin=POWERS_OF_TWO),
        Example(("greedy", "--input", "-"), "2048,65536,134217728,512,512,512,32,64,1,128,512,1", stdin=POWERS_OF_TWO),
        Example(("greedy", "--input", "-"), "success", stdin="n=6\n2\n3\n6\n"),
    ],
    "decide": [
        Example(("decide", "--input", "-", "--colours", "2"), "not product-Schur", stdin="n=1\n"),
        Example(("decide", "--input", "-", "--colours", "2"), "product-Schur", stdin="n=32\n2\n4\n8\n16\n32\n"),
        Example(("decide", "--input", "-", "--colours", "2"), "not product-Schur", stdin="n=16\n2\n4\n8\n16\n"),
    ],
    "schur-numbers": [
        Example(("schur-numbers", "--r", "2", "--mode", "sums"), "5"),
        Example(("schur-numbers", "--r", "3", "--mode", "shifted"), "14"),
        Example(("schur-numbers", "--r", "3", "--mode", "weak"), "18"),
    ],
    "pattern": [
        Example(("pattern", "--params", "2,3,5,7"), "2 3 5 6 7 10 14 21 28 30 42 60 84 180"),
        Example(("pattern", "--params", "2,3,5,7", "--verify"), "product-Schur"),
        Example(("pattern", "--params", "2,2,2,2"), "error: pattern values collide: a = b = 2", exit_code=EXIT_USAGE, stream="stderr"),
    ],
    "interval-colour": [
        Example(("interval-colour", "--input", "-", "--colours", "2"), "monochromatic triples: 0",
                stdin="n=10000\n7\n11\n49\n77\n121\n500\n2401\n"),
    ],
    "power-family": [
        Example(("power-family", "--n", "32", "--colours", "2", "--schur-value", "5"), "x=2: 2 4 8 16 32"),
    ],
    "experiment": [
        Example(("experiment", "--config", "-"), "50,0.0,3,0.0,1.0,0,0.0,0.5614970317550454",
                stdin="n_values = 50\np_values = 0\ntrials = 3\n"),
    ],
    "verify": [
        Example(("verify", "--string", "AABBBACCCACCCABBBA", "--mode", "weak"), "valid"),
        Example(("verify", "--string", "AAAAA", "--mode", "sums"), "invalid: 1+1=2 (sum)"),
    ],
    "lemma-ei": [
        Example(("lemma-ei", "--exponents", "1", "--t", "1", "--n", "10"), "count=10 bound=40 holds"),
    ],
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Output:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def line(self, text: str = "") -> None:
        if not self.as_json:
            print(text)

    def emit(self, doc: dict) -> None:
        if self.as_json:
            print(json.dumps(doc, sort_keys=True))


def _read_set(path: str) -> IntegerSet:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="ascii").read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_set(text)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _classes_text(colouring: RColouring) -> list[str]:
    return [f"{LETTERS[i]}: {' '.join(map(str, cls))}".rstrip() for i, cls in enumerate(colouring.classes())]


# ---------------------------------------------------------------------------
# subcommands


def cmd_sample(args, out: Output) -> int:
    if (args.p is None) == (args.exponent is None):
        raise UsageError("give exactly one of --p and --exponent")
    if args.p is not None:
        p = args.p
    else:
        p, _ = p_from_exponent(args.n, Fraction(args.exponent), args.factor)
    seed = resolve_seed(args.seed)
    S = sample_binomial_set(RandomSetSpec(args.n, p, seed, args.trial))
    if args.out and args.out != "-":
        try:
            with open(args.out, "w", encoding="ascii", newline="\n") as fh:
                fh.write(format_set(S))
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from None
    elif not out.as_json:
        sys.stdout.write(format_set(S))
    out.emit({"n": S.n, "p": p, "seed": seed, "trial_index": args.trial, "size": len(S), "elements": S.to_list()})
    return EXIT_OK


def cmd_greedy(args, out: Output) -> int:
    S = _read_set(args.input)
    outcome = greedy_two_colour(S)
    doc: dict = {"status": outcome.status.value, "R": outcome.colouring.R.to_list(), "B": outcome.colouring.B.to_list()}
    if outcome.success:
        out.line("success")
    else:
        out.line(f"failure at {outcome.failed_element}")
        doc["failed_element"] = outcome.failed_element
        doc["b_witness"] = list(outcome.b_witness)
        doc["r_witness"] = list(outcome.r_witness)
    out.line("R: " + " ".join(map(str, outcome.colouring.R)))
    out.line("B: " + " ".join(map(str, outcome.colouring.B)))
    if not outcome.success:
        if 1 in S:
            out.line("no configuration: 1 is in the set")
        else:
            cfg = extract_forbidden_configuration(outcome, S)
            valid, violations = check_forbidden_configuration(cfg, S)
            out.line("configuration a,b,c,d,e,f,x,y,z,u,v,w:")
            out.line(cfg.csv_row())
            out.line(f"valid: {'yes' if valid else 'no'}; effective size {effective_size(cfg)}")
            doc["configuration"] = list(cfg.as_tuple())
            doc["valid"] = valid
            doc["violations"] = violations
            doc["effective_size"] = effective_size(cfg)
    out.emit(doc)
    return EXIT_OK


def cmd_decide(args, out: Output) -> int:
    S = _read_set(args.input)
    decision = is_product_schur(S, args.colours, not args.no_degenerate, args.budget)
    out.line(decision.verdict.value)
    doc = {"verdict": decision.verdict.value, "r": decision.r, "triples": decision.triples,
           "core_size": decision.core_size, "nodes": decision.nodes, "witness": None}
    if decision.witness is not None:
        for text in _classes_text(decision.witness):
            out.line(text)
        doc["witness"] = [cls for cls in decision.witness.classes()]
    out.emit(doc)
    return EXIT_UNKNOWN if decision.verdict is Verdict.UNKNOWN else EXIT_OK


def cmd_schur_numbers(args, out: Output) -> int:
    mode = SumConstraintMode.parse(args.mode)
    res = schur_number(args.r, mode, args.budget)
    weak = mode is SumConstraintMode.WEAK_SHIFTED
    shown = res.max_colourable if weak else res.value
    witness = res.witness.to_string() if res.witness is not None else ""
    if res.complete:
        out.line(str(shown))
    else:
        out.line(f"unknown (some colouring of [1..{res.max_colourable}] is valid)")
    out.emit({"r": args.r, "mode": mode.value, "value": shown if res.complete else None,
              "max_colourable": res.max_colourable, "complete": res.complete, "witness": witness, "nodes": res.nodes})
    return EXIT_OK if res.complete else EXIT_UNKNOWN


def cmd_pattern(args, out: Output) -> int:
    if args.find:
        if not args.input:
            raise UsageError("--find needs --input")
        S = _read_set(args.input)
        try:
            plan = make_interval_plan(S.n, args.delta)
        except PlanError as exc:
            raise UsageError(str(exc)) from None
        params = find_pattern(S, plan)
        if params is None:
            out.line("no pattern")
            out.emit({"found": False})
        else:
            out.line("found " + ",".join(map(str, params.as_tuple())))
            out.emit({"found": True, "params": list(params.as_tuple()), "elements": build_pattern(params).elements()})
        return EXIT_OK
    if not args.params:
        raise UsageError("give --params a,b,c,d or --find --input <setfile>")
    gens = _int_list(args.params)
    if len(gens) != 4:
        raise UsageError("--params takes four integers")
    params = PatternParams(*gens)
    pattern = build_pattern(params)
    out.line(" ".join(map(str, pattern.elements())))
    doc: dict = {"params": gens, "values": pattern.values, "elements": pattern.elements()}
    if args.verify:
        ok = verify_pattern_product_schur(params)
        out.line("product-Schur" if ok else "not product-Schur")
        doc["product_schur"] = ok
    out.emit(doc)
    return EXIT_OK


def cmd_interval_colour(args, out: Output) -> int:
    S = _read_set(args.input)
    plan = build_interval_colouring(S.n, args.colours)
    colouring, uncolourable = colour_set_by_intervals(S, plan)
    bad = monochromatic_triples(colouring, enumerate_product_triples(S))
    out.line(f"psi: {plan.psi.to_string()}")
    for text in _classes_text(colouring):
        out.line(text)
    out.line("uncolourable: " + " ".join(map(str, uncolourable)))
    out.line(f"monochromatic triples: {len(bad)}")
    out.emit({"sprime": plan.sprime, "psi": plan.psi.to_string(), "classes": colouring.classes(),
              "uncolourable": uncolourable, "monochromatic_triples": [list(t) for t in bad]})
    return EXIT_OK


def cmd_power_family(args, out: Output) -> int:
    s = args.schur_value
    if s is None:
        res = schur_number(args.colours)
        if not res.complete:
            raise BudgetExceeded(f"the Schur number for {args.colours} colours was not settled")
        s = res.value
    family = greedy_disjoint_power_family(args.n, args.colours, s)
    for pat in family:
        out.line(f"x={pat.x}: " + " ".join(map(str, pat.values)))
    out.line(f"size {len(family)}, guaranteed {power_family_bound(args.n, s)}")
    out.emit({"n": args.n, "r": args.colours, "schur_value": s, "bases": [p.x for p in family],
              "bound": power_family_bound(args.n, s)})
    return EXIT_OK


def cmd_experiment(args, out: Output) -> int:
    try:
        text = sys.stdin.read() if args.config == "-" else open(args.config, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read {args.config}: {exc.strerror}") from None
    try:
        config = parse_config(text)
    except ValueError as exc:
        raise InputError(f"{args.config}: {exc}") from None
    if args.seed is not None or SEED_ENV in os.environ:
        config = ExperimentConfig.from_dict({**config.to_dict(), "seed": resolve_seed(args.seed)})

    def progress(msg: str) -> None:
        print(msg, file=sys.stderr)

    report = run_threshold_experiment(config, threads=args.threads, progress=progress)
    fmt = "json" if out.as_json or (args.out or "").endswith(".json") else "csv"
    if args.out and args.out != "-":
        try:
            export_report(report, fmt, args.out)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from None
        print(f"wrote {len(report.cells)} cells to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(report_to_json(report) if fmt == "json" else report_to_csv(report))
    if args.census:
        census = run_greedy_failure_census(config)
        print(f"census: {census.failures} failures in {census.trials} sets, 1 removed {census.ones_removed} times, "
              f"effective sizes {dict(sorted(census.effective_sizes.items()))}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args, out: Output) -> int:
    try:
        colouring = RColouring.from_string(args.string, args.colours)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    valid, violation = verify_sum_colouring(colouring, args.mode)
    if valid:
        out.line("valid")
    else:
        a, b, c, kind = violation
        rel = f"{a}+{b}={c}" if kind == "sum" else f"{a}+{b}+1={c}"
        out.line(f"invalid: {rel} ({kind})")
    out.emit({"valid": valid, "length": len(colouring), "violation": list(violation) if violation else None})
    return EXIT_OK


def cmd_lemma_ei(args, out: Output) -> int:
    exps = sorted(_int_list(args.exponents))
    res = count_bounded_product_tuples(TupleCountQuery(tuple(exps), args.t, args.n), budget=args.budget)
    bound = res.bound
    bound_text = str(bound.numerator) if bound.denominator == 1 else str(bound)
    out.line(f"count={res.count} bound={bound_text} {'holds' if res.bound_holds else 'fails'}")
    out.emit({"exponents": exps, "t": args.t, "n": args.n, "count": res.count,
              "bound": bound_text, "bound_holds": res.bound_holds})
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


DESCRIPTIONS = {
    "sample": ("draw a binomial random subset of [n]", "Keeps each of 1..n independently with probability p, or p = factor * n^exponent. "
               "Trial t under seed s always yields the same set; --seed beats $SCHURLAB_SEED beats 0."),
    "greedy": ("run the two-colour greedy", "Puts k into R unless k is a product of two or three members of R, else into B "
               "unless k is a product of two members of B; on failure prints the 12-entry forbidden configuration."),
    "decide": ("decide whether a set is r-product-Schur", "Exact search over r-colourings for one with no monochromatic ab = c "
               "(a = b allowed unless --no-degenerate); prints a witness colouring when one exists."),
    "schur-numbers": ("compute Schur-type numbers", "sums: least n forcing a monochromatic a+b=c; shifted: least n forcing "
                      "a+b=c or a+b+1=c; weak: largest n colourable avoiding both except 1+1=2."),
    "pattern": ("build, verify or find the 14-element product pattern", "Builds the pattern generated by a,b,c,d, optionally checks it "
                "is 2-product-Schur, or with --find searches a set for one with generators in the planned windows."),
    "interval-colour": ("colour a set by exponent windows", "Element x in (n^{i/s}, n^{(i+1)/s}] gets colour psi(i), where psi colours "
                        "[1..s-1] avoiding sums and shifted sums and s is the double-sum Schur number."),
    "power-family": ("greedy family of disjoint power patterns", "Keeps U_x = {x, ..., x^s} for x = 2, 3, ... when it misses all kept "
                     "patterns; s defaults to the Schur number for the given colours."),
    "experiment": ("Monte Carlo threshold experiment", "Runs the grid in a key = value config file (--config - reads stdin) and writes "
                   "n,p,trials,schur_freq,greedy_success_freq,unknown,ci_lo,ci_hi."),
    "verify": ("check a letter colouring of [1..m]", "Validates a colouring string such as AABBBA under the given sum constraints."),
    "lemma-ei": ("count bounded product tuples", "Counts (a_1..a_k) with prod a_i^e_i <= n and a_i >= t when e_i >= 2, and compares "
                 "with n * t^(k-e) * D(n)^k."),
}


def _epilog(name: str) -> str:
    lines = ["examples:"]
    for ex in EXAMPLES.get(name, []):
        lines.append(f"  {ex.shell()}")
        arrow = "->" if ex.stream == "stdout" else "stderr:"
        lines.append(f"      {arrow} {ex.expect}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schurlab", description="Monochromatic products in random integer sets.",
                     epilog="exit codes: 0 ok, 1 usage error, 2 budget exhausted or unknown, 3 I/O error")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, func: Callable) -> argparse.ArgumentParser:
        short, long = DESCRIPTIONS[name]
        p = sub.add_parser(name, help=short, description=long, epilog=_epilog(name),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    p = add("sample", cmd_sample)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--exponent", help="rational exponent; write --exponent=-1/11 so the sign is not read as a flag")
    p.add_argument("--factor", type=float, default=1.0)
    p.add_argument("--seed", type=lambda s: int(s, 0))
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--out", help="set file to write (default stdout)")

    p = add("greedy", cmd_greedy)
    p.add_argument("--input", required=True, help="set file, or - for stdin")

    p = add("decide", cmd_decide)
    p.add_argument("--input", required=True, help="set file, or - for stdin")
    p.add_argument("--colours", type=int, default=2)
    p.add_argument("--no-degenerate", action="store_true", help="ignore a*a = c")
    p.add_argument("--budget", type=int, default=DEFAULT_PRODUCT_BUDGET, help="search node cap")

    p = add("schur-numbers", cmd_schur_numbers)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--mode", choices=[m.value for m in SumConstraintMode], default="sums")
    p.add_argument("--budget", type=int, default=DEFAULT_SCHUR_BUDGET)

    p = add("pattern", cmd_pattern)
    p.add_argument("--params", help="a,b,c,d")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--find", action="store_true")
    p.add_argument("--input")
    p.add_argument("--delta", default="1e-3")

    p = add("interval-colour", cmd_interval_colour)
    p.add_argument("--input", required=True)
    p.add_argument("--colours", type=int, default=2)

    p = add("power-family", cmd_power_family)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--colours", type=int, default=2)
    p.add_argument("--schur-value", type=int)

    p = add("experiment", cmd_experiment)
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="report path; .json selects JSON, anything else CSV (default stdout)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=lambda s: int(s, 0), help="overrides the config seed")
    p.add_argument("--census", action="store_true", help="also summarise greedy failures on stderr")

    p = add("verify", cmd_verify)
    p.add_argument("--string", required=True)
    p.add_argument("--mode", choices=[m.value for m in SumConstraintMode], default="sums")
    p.add_argument("--colours", type=int, help="number of colours (default: letters used)")

    p = add("lemma-ei", cmd_lemma_ei)
    p.add_argument("--exponents", required=True, help="comma-separated, e.g. 1,2,3")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, default=10_000_000)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args.json)
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BudgetExceeded as exc:
        print(f"unknown: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (UsageError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
