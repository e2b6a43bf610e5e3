"""Monte Carlo harness: how often is [n]_p product-Schur, and how often does the greedy succeed?

Config files are flat ``key = value`` text (``#`` starts a comment):

    n_values   = 1000, 10000
    p_values   = 0.1, 0.2            # explicit probabilities, or
    p_pairs    = -1/11:0.25, -1/11:1 # exponent:factor, giving p = factor * n^exponent
    r          = 2
    trials     = 200
    seed       = 12345
    method     = exact | greedy | both
    degenerate = true
    budget     = 2000000
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from schurlab.greedy import (
    ForbiddenConfiguration,
    check_forbidden_configuration,
    effective_size,
    extract_forbidden_configuration,
    greedy_two_colour,
)
from schurlab.sampler import RandomSetSpec, p_from_exponent, sample_binomial_set
from schurlab.sets import IntegerSet
from schurlab.solve import DEFAULT_PRODUCT_BUDGET, Verdict, is_product_schur

METHODS = ("exact", "greedy", "both")
CSV_COLUMNS = ["n", "p", "trials", "schur_freq", "greedy_success_freq", "unknown", "ci_lo", "ci_hi"]
Z95 = 1.959963984540054


@dataclass(frozen=True)
class ExperimentConfig:
    n_values: tuple[int, ...]
    p_values: tuple[float, ...] = ()
    p_pairs: tuple[tuple[str, float], ...] = ()
    r: int = 2
    trials: int = 100
    seed: int = 0
    method: str = "both"
    degenerate: bool = True
    budget: int = DEFAULT_PRODUCT_BUDGET

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "p_values", tuple(float(p) for p in self.p_values))
        object.__setattr__(self, "p_pairs", tuple((str(Fraction(e)), float(f)) for e, f in self.p_pairs))
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ValueError("n_values must be a non-empty list of positive integers")
        if not self.p_values and not self.p_pairs:
            raise ValueError("give p_values or p_pairs")
        if any(not 0 <= p <= 1 for p in self.p_values):
            raise ValueError("probabilities must lie in [0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.r < 1:
            raise ValueError("r must be at least 1")

    def cells(self) -> list[tuple[int, float]]:
        out = []
        for n in self.n_values:
            ps = list(self.p_values)
            ps += [p_from_exponent(n, Fraction(e), f)[0] for e, f in self.p_pairs]
            out.extend((n, p) for p in ps)
        return out

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_values"] = list(self.n_values)
        d["p_values"] = list(self.p_values)
        d["p_pairs"] = [list(pair) for pair in self.p_pairs]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["p_pairs"] = tuple(tuple(pair) for pair in d.get("p_pairs", ()))
        return cls(**d)


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def parse_config(text: str) -> ExperimentConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        raw[key] = value
    listed = lambda v: [x.strip() for x in v.split(",") if x.strip()]  # noqa: E731
    kwargs: dict = {}
    for key, value in raw.items():
        if key == "n_values":
            kwargs[key] = [int(float(x)) if "e" in x.lower() else int(x) for x in listed(value)]
        elif key == "p_values":
            kwargs[key] = [float(x) for x in listed(value)]
        elif key == "p_pairs":
            pairs = []
            for item in listed(value):
                ex, _, fac = item.partition(":")
                pairs.append((ex.strip(), float(fac) if fac else 1.0))
            kwargs[key] = pairs
        elif key in ("r", "trials", "budget"):
            kwargs[key] = int(value)
        elif key == "seed":
            kwargs[key] = int(value, 0)
        elif key == "method":
            kwargs[key] = value
        elif key == "degenerate":
            kwargs[key] = _parse_bool(value)
        else:
            raise ValueError(f"unknown config key {key!r}")
    if "n_values" not in kwargs:
        raise ValueError("config needs n_values")
    return ExperimentConfig(**kwargs)


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


@dataclass(frozen=True)
class TrialRecord:
    n: int
    p: float
    trial_index: int
    set_size: int
    exact: str | None  # Verdict value, or None when not run
    greedy: str | None  # "success" / "failure", or None when not run
    failed_element: int | None
    elapsed: float = field(compare=False)


@dataclass(frozen=True)
class CellSummary:
    n: int
    p: float
    trials: int
    decided: int
    schur_count: int
    schur_freq: float | None
    greedy_success: int
    greedy_success_freq: float | None
    unknown: int
    ci_lo: float
    ci_hi: float
    contradictions: int


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    cells: list[CellSummary]
    records: list[TrialRecord] = field(default_factory=list, compare=False, repr=False)

    def cell(self, n: int, p: float) -> CellSummary:
        for c in self.cells:
            if c.n == n and c.p == p:
                return c
        raise KeyError((n, p))


def wilson_interval(successes: int, total: int, z: float = Z95) -> tuple[float, float]:
    if total == 0:
        return 0.0, 1.0
    phat = successes / total
    denom = 1 + z * z / total
    centre = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == total else min(1.0, centre + half)
    return lo, hi


def run_trial(config: ExperimentConfig, n: int, p: float, trial_index: int) -> TrialRecord:
    t0 = time.perf_counter()
    S = sample_binomial_set(RandomSetSpec(n, p, config.seed, trial_index))
    exact = greedy = None
    failed = None
    if config.method in ("exact", "both"):
        exact = is_product_schur(S, config.r, config.degenerate, config.budget).verdict.value
    if config.method in ("greedy", "both"):
        outcome = greedy_two_colour(S)
        greedy = outcome.status.value
        failed = outcome.failed_element
    return TrialRecord(n, p, trial_index, len(S), exact, greedy, failed, time.perf_counter() - t0)


def _run_cell(args: tuple[ExperimentConfig, int, float]) -> list[TrialRecord]:
    config, n, p = args
    return [run_trial(config, n, p, i) for i in range(config.trials)]


def summarise(config: ExperimentConfig, n: int, p: float, records: Sequence[TrialRecord]) -> CellSummary:
    exact_run = config.method in ("exact", "both")
    greedy_run = config.method in ("greedy", "both")
    unknown = sum(r.exact == Verdict.UNKNOWN.value for r in records)
    schur = sum(r.exact == Verdict.SCHUR.value for r in records)
    decided = sum(r.exact in (Verdict.SCHUR.value, Verdict.NOT_SCHUR.value) for r in records)
    success = sum(r.greedy == "success" for r in records)
    contradictions = sum(r.greedy == "success" and r.exact == Verdict.SCHUR.value for r in records)
    trials = len(records)
    schur_freq = schur / decided if exact_run and decided else None
    greedy_freq = success / trials if greedy_run else None
    if exact_run:
        lo, hi = wilson_interval(schur, decided)
    else:
        lo, hi = wilson_interval(success, trials)
    return CellSummary(n, p, trials, decided, schur, schur_freq, success, greedy_freq, unknown, lo, hi, contradictions)


def run_threshold_experiment(
    config: ExperimentConfig,
    threads: int = 1,
    progress: Callable[[str], None] | None = None,
) -> ExperimentReport:
    """Sample every (n, p) cell ``trials`` times and tally exact and greedy outcomes.

    Trial i of every cell uses PRNG stream (seed, i); results do not depend
    on ``threads``.
    """
    cells = config.cells()
    jobs = [(config, n, p) for n, p in cells]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_cell, jobs))
    else:
        results = []
        for job in jobs:
            results.append(_run_cell(job))
            if progress:
                progress(f"cell n={job[1]} p={job[2]:.6g} done")
    summaries = [summarise(config, n, p, recs) for (n, p), recs in zip(cells, results)]
    return ExperimentReport(config, summaries, [r for recs in results for r in recs])


# ---------------------------------------------------------------------------
# greedy failure census


@dataclass
class Census:
    trials: int
    failures: int
    ones_removed: int
    configurations: list[ForbiddenConfiguration]

    @property
    def effective_sizes(self) -> Counter:
        return Counter(effective_size(c) for c in self.configurations)


def run_greedy_failure_census(config: ExperimentConfig, injected: Iterable[IntegerSet] = ()) -> Census:
    """Run the greedy on every sampled set (1 removed when drawn) plus any injected sets.

    Each failure is turned into a forbidden configuration and validated.
    """
    if config.method not in ("greedy", "both"):
        raise ValueError("the census needs method greedy or both")
    sets: list[IntegerSet] = []
    ones = 0
    for n, p in config.cells():
        for i in range(config.trials):
            S = sample_binomial_set(RandomSetSpec(n, p, config.seed, i))
            if 1 in S:
                S = S.without(1)
                ones += 1
            sets.append(S)
    for S in injected:
        if 1 in S:
            S = S.without(1)
            ones += 1
        sets.append(S)
    configs = []
    failures = 0
    for S in sets:
        outcome = greedy_two_colour(S)
        if outcome.success:
            continue
        failures += 1
        cfg = extract_forbidden_configuration(outcome, S)
        ok, why = check_forbidden_configuration(cfg, S)
        if not ok:
            raise AssertionError(f"extracted configuration {cfg.csv_row()} is invalid: {why}")
        configs.append(cfg)
    return Census(len(sets), failures, ones, configs)


# ---------------------------------------------------------------------------
# crossings


class CrossingError(ValueError):
    pass


def estimate_crossing(report: ExperimentReport, level: float = 0.5) -> dict[int, float]:
    """Per n, the p where the product-Schur frequency crosses ``level``.

    Interpolates linearly in log p between the first pair of adjacent cells
    that straddle the level.  Refuses when some larger p has a frequency
    significantly below a smaller p (non-overlapping Wilson intervals).
    """
    out: dict[int, float] = {}
    for n in sorted({c.n for c in report.cells}):
        col = sorted((c for c in report.cells if c.n == n), key=lambda c: c.p)
        freq = [c.schur_freq if c.schur_freq is not None else c.greedy_success_freq for c in col]
        if any(f is None for f in freq):
            raise CrossingError(f"n={n}: cells without a decided frequency")
        for i in range(len(col)):
            for j in range(i + 1, len(col)):
                if col[j].ci_hi < col[i].ci_lo:
                    raise CrossingError(f"n={n}: frequency drops significantly between p={col[i].p} and p={col[j].p}")
        for i in range(len(col) - 1):
            f0, f1 = freq[i], freq[i + 1]
            if f0 < level <= f1 and col[i].p > 0:
                t = (level - f0) / (f1 - f0)
                lp = math.log(col[i].p) + t * (math.log(col[i + 1].p) - math.log(col[i].p))
                out[n] = math.exp(lp)
                break
        else:
            raise CrossingError(f"n={n}: no adjacent cells straddle level {level}")
    return out


# ---------------------------------------------------------------------------
# export


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def report_to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for c in report.cells:
        writer.writerow([c.n, _fmt(c.p), c.trials, _fmt(c.schur_freq), _fmt(c.greedy_success_freq), c.unknown,
                         _fmt(c.ci_lo), _fmt(c.ci_hi)])
    return buf.getvalue()


def report_to_json(report: ExperimentReport) -> str:
    doc = {
        "config": report.config.to_dict(),
        "seed": report.config.seed,
        "cells": [asdict(c) for c in report.cells],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> ExperimentReport:
    doc = json.loads(text)
    config = ExperimentConfig.from_dict(doc["config"])
    return ExperimentReport(config, [CellSummary(**c) for c in doc["cells"]])


def export_report(report: ExperimentReport, fmt: str, path: str | os.PathLike | None) -> None:
    """Write the report as CSV or JSON; ``path`` None or '-' means stdout."""
    if fmt == "csv":
        text = report_to_csv(report)
    elif fmt == "json":
        text = report_to_json(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
