"""Explicit product-Schur constructions and the interval colouring.

Pattern side: the 14-element set built from generators (a, b, c, d), the
fourteen disjoint windows that keep its members apart at scale n, and a
staged search for a copy inside a given set.  Power side: U_x = {x, ..., x^m}
and a greedy family of pairwise disjoint U_x.  Colouring side: (n^{i/s},
n^{(i+1)/s}] windows coloured by a sum- and shifted-sum-free colouring.

Window arithmetic is exact: every endpoint c * n^{e/k} is rounded with
integer roots, never with floats.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from schurlab.arith import INT64_MAX, iroot, iroot_ceil
from schurlab.solve import (
    RColouring,
    SumConstraintMode,
    double_sum_schur_number,
    first_valid_colouring,
    is_product_schur,
)
from schurlab.sets import IntegerSet

# label -> (a, b, c, d) exponents of the generator monomial
PATTERN_MONOMIALS: dict[str, tuple[int, int, int, int]] = {
    "a": (1, 0, 0, 0),
    "b": (0, 1, 0, 0),
    "ab": (1, 1, 0, 0),
    "c": (0, 0, 1, 0),
    "ac": (1, 0, 1, 0),
    "abc": (1, 1, 1, 0),
    "a2bc": (2, 1, 1, 0),
    "a2b2c": (2, 2, 1, 0),
    "d": (0, 0, 0, 1),
    "ad": (1, 0, 0, 1),
    "bd": (0, 1, 0, 1),
    "abd": (1, 1, 0, 1),
    "a2d": (2, 0, 0, 1),
    "a2bd": (2, 1, 0, 1),
}


@dataclass(frozen=True)
class PatternParams:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        for name in "abcd":
            if getattr(self, name) < 2:
                raise ValueError(f"generator {name} must be at least 2")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d


@dataclass(frozen=True)
class PatternSet:
    params: PatternParams
    values: dict[str, int]

    def elements(self) -> list[int]:
        return sorted(self.values.values())

    def as_set(self, n: int | None = None) -> IntegerSet:
        els = self.elements()
        return IntegerSet(n if n is not None else els[-1], els)


class PatternCollision(ValueError):
    def __init__(self, first: str, second: str, value: int):
        super().__init__(f"pattern values collide: {first} = {second} = {value}")
        self.pair = (first, second)
        self.value = value


def build_pattern(params: PatternParams) -> PatternSet:
    gens = params.as_tuple()
    values: dict[str, int] = {}
    seen: dict[int, str] = {}
    for label, exps in PATTERN_MONOMIALS.items():
        v = math.prod(g**e for g, e in zip(gens, exps))
        if v > INT64_MAX:
            raise OverflowError(f"{label} = {v} exceeds 2^63 - 1")
        if v in seen:
            raise PatternCollision(seen[v], label, v)
        seen[v] = label
        values[label] = v
    return PatternSet(params, values)


def verify_pattern_product_schur(params: PatternParams) -> bool:
    pattern = build_pattern(params)
    decision = is_product_schur(pattern.elements(), r=2, allow_degenerate=True)
    if decision.is_schur is None:
        raise RuntimeError(f"product-Schur search for {params} ran out of budget")
    return decision.is_schur


# ---------------------------------------------------------------------------
# the fourteen windows


# label -> (exponent of n over 11, divisor K, multiple j of delta): window [(1 - j delta) n^{e/11} / K, n^{e/11} / K]
WINDOW_TABLE: dict[str, tuple[int, int, int]] = {
    "a": (1, 1, 1),
    "b": (2, 2, 1),
    "ab": (3, 2, 2),
    "c": (5, 1, 1),
    "ac": (6, 1, 2),
    "abc": (8, 2, 3),
    "a2bc": (9, 2, 4),
    "a2b2c": (11, 4, 5),
    "d": (7, 3, 1),
    "ad": (8, 3, 2),
    "bd": (9, 6, 2),
    "abd": (10, 6, 3),
    "a2d": (9, 3, 3),
    "a2bd": (11, 6, 4),
}
WINDOW_ROOT = 11


def _as_fraction(x: Fraction | float | str | int) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def _floor_scaled_root(coef: Fraction, n: int, e: int, k: int) -> int:
    """floor(coef * n^{e/k}) for coef > 0."""
    p, q = coef.numerator, coef.denominator
    return iroot((p**k * n**e) // q**k, k)


def _ceil_scaled_root(coef: Fraction, n: int, e: int, k: int) -> int:
    """ceil(coef * n^{e/k}) for coef > 0."""
    p, q = coef.numerator, coef.denominator
    return iroot_ceil(-((-(p**k) * n**e) // q**k), k)


@dataclass(frozen=True)
class IntervalPlan:
    n: int
    delta: Fraction
    windows: dict[str, tuple[int, int]]  # label -> inclusive integer [lo, hi]

    def window(self, label: str) -> tuple[int, int]:
        return self.windows[label]

    def contains(self, label: str, value: int) -> bool:
        lo, hi = self.windows[label]
        return lo <= value <= hi


class PlanError(ValueError):
    def __init__(self, message: str, minimum_n: int, pair: tuple[str, str] | None = None, empty: str | None = None):
        super().__init__(message)
        self.minimum_n = minimum_n
        self.pair = pair
        self.empty = empty


def _real_bounds_pow(label: str, n: int, delta: Fraction) -> tuple[Fraction, Fraction]:
    """(lo^11, hi^11) of the real window, exactly."""
    e, k, j = WINDOW_TABLE[label]
    hi = Fraction(n**e, k**WINDOW_ROOT)
    return (1 - j * delta) ** WINDOW_ROOT * hi, hi


def _strictly_below(s: str, t: str, n: int, delta: Fraction) -> bool:
    return _real_bounds_pow(s, n, delta)[1] < _real_bounds_pow(t, n, delta)[0]


def plan_thresholds(delta: Fraction | float | str) -> tuple[int, int]:
    """(least n from which the real windows are pairwise disjoint, least n from which each is at least 1 wide).

    Past the larger of the two every integer plan is valid.  Both are exact.
    """
    dl = _as_fraction(delta)
    disjoint = 1
    specs = list(WINDOW_TABLE.values())
    for i, low in enumerate(specs):
        for high in specs[i + 1 :]:
            if low[0] == high[0]:
                continue
            if low[0] > high[0]:
                low, high = high, low
            (e1, k1, _), (e2, k2, j2) = low, high
            # n^{e1/11} / k1 < (1 - j2 delta) n^{e2/11} / k2  <=>  n^(e2 - e1) > ratio^11
            ratio = Fraction(k2, k1) / (1 - j2 * dl)
            bound = ratio**WINDOW_ROOT
            disjoint = max(disjoint, iroot_ceil(math.floor(bound) + 1, e2 - e1))
    wide = 1
    for e, k, j in specs:
        # j delta n^{e/11} / k >= 1  <=>  n^e >= (k / (j delta))^11
        need = (Fraction(k) / (j * dl)) ** WINDOW_ROOT
        wide = max(wide, iroot_ceil(math.ceil(need), e))
    return disjoint, wide


def make_interval_plan(n: int, delta: Fraction | float | str = Fraction(1, 1000)) -> IntervalPlan:
    """Integer windows for the pattern at scale n: lower ends rounded up, upper ends down.

    Raises PlanError naming an overlapping pair of real windows, or else an
    empty integer window, when n is too small.
    """
    dl = _as_fraction(delta)
    if not 0 < dl < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if n < 1:
        raise ValueError("n must be positive")
    disjoint_n, wide_n = plan_thresholds(dl)
    minimum = max(disjoint_n, wide_n)
    labels = list(WINDOW_TABLE)
    for i, s in enumerate(labels):
        for t in labels[i + 1 :]:
            if not (_strictly_below(s, t, n, dl) or _strictly_below(t, s, n, dl)):
                raise PlanError(
                    f"windows {s} and {t} overlap at n={n}; the windows are disjoint for every n >= {disjoint_n}",
                    disjoint_n, pair=(s, t))
    windows = {}
    for label, (e, k, j) in WINDOW_TABLE.items():
        lo = _ceil_scaled_root((1 - j * dl) / k, n, e, WINDOW_ROOT)
        hi = _floor_scaled_root(Fraction(1, k), n, e, WINDOW_ROOT)
        if lo > hi:
            raise PlanError(
                f"window {label} contains no integer at n={n}; every window holds an integer for n >= {minimum}",
                minimum, empty=label)
        windows[label] = (lo, hi)
    ordered = sorted(windows.items(), key=lambda kv: kv[1])
    for (s, (_, hi_s)), (t, (lo_t, _)) in zip(ordered, ordered[1:]):
        if hi_s >= lo_t:
            raise AssertionError(f"integer windows {s} and {t} intersect although the real ones do not")
    return IntervalPlan(n, dl, windows)


def _in_window(sorted_els: Sequence[int], lo: int, hi: int) -> Sequence[int]:
    return sorted_els[bisect_left(sorted_els, lo) : bisect_right(sorted_els, hi)]


def find_pattern(S: IntegerSet, plan: IntervalPlan) -> PatternParams | None:
    """First (a, b, c, d) in window order whose whole pattern lies in S.

    Stages follow the reveal order a, then b with ab, then c with its four
    products, then d with its five; later stages backtrack into earlier ones,
    so a pattern with generators in the windows is found whenever one exists.
    """
    els = S.to_list()
    A = _in_window(els, *plan.window("a"))
    B = _in_window(els, *plan.window("b"))
    C = _in_window(els, *plan.window("c"))
    D = _in_window(els, *plan.window("d"))
    for a in A:
        for b in B:
            if a * b not in S:
                continue
            c = next((c for c in C if all(v in S for v in (a * c, a * b * c, a * a * b * c, a * a * b * b * c))), None)
            if c is None:
                continue
            d = next((d for d in D if all(v in S for v in (a * d, b * d, a * b * d, a * a * d, a * a * b * d))), None)
            if d is None:
                continue
            return PatternParams(a, b, c, d)
    return None


# ---------------------------------------------------------------------------
# powers


@dataclass(frozen=True)
class PowerPattern:
    x: int
    r: int
    length: int

    @property
    def values(self) -> list[int]:
        return [self.x**i for i in range(1, self.length + 1)]


def build_power_pattern(x: int, r: int, schur_value: int, n: int | None = None) -> PowerPattern:
    if x < 2:
        raise ValueError("base must be at least 2")
    if schur_value < 1:
        raise ValueError("pattern length must be positive")
    top = x**schur_value
    cap = INT64_MAX if n is None else min(n, INT64_MAX)
    if top > cap:
        raise OverflowError(f"{x}^{schur_value} = {top} exceeds {'the universe' if n is not None and n < INT64_MAX else '2^63 - 1'}")
    return PowerPattern(x, r, schur_value)


def power_family_bound(n: int, schur_value: int) -> int:
    """floor(n^{1/s} / s^2), exactly."""
    return iroot(n, schur_value) // schur_value**2


def greedy_disjoint_power_family(n: int, r: int, schur_value: int) -> list[PowerPattern]:
    """Scan x = 2, 3, ... while x^s <= n and keep U_x when it misses every kept pattern."""
    if n < 2**schur_value:
        raise ValueError(f"need n >= 2^{schur_value}")
    taken: set[int] = set()
    family = []
    for x in range(2, iroot(n, schur_value) + 1):
        pattern = build_power_pattern(x, r, schur_value, n)
        vals = pattern.values
        if taken.isdisjoint(vals):
            taken.update(vals)
            family.append(pattern)
    bound = power_family_bound(n, schur_value)
    if len(family) < bound:
        raise AssertionError(f"family of size {len(family)} is below the guaranteed {bound}")
    return family


# ---------------------------------------------------------------------------
# interval colouring


@lru_cache(maxsize=None)
def _double_sum_value(r: int) -> int:
    res = double_sum_schur_number(r)
    if res.value is None:
        raise RuntimeError(f"S'({r}) could not be determined within budget")
    return res.value


@dataclass(frozen=True)
class IntervalColouringPlan:
    """Window I_i = (n^{i/s}, n^{(i+1)/s}] gets colour psi(i), i = 1..s-1, where s = S'(r)."""

    n: int
    r: int
    sprime: int
    psi: RColouring
    thresholds: tuple[int, ...]  # thresholds[i] = floor(n^{i/s}), i = 0..2s

    def index_of(self, value: int) -> int:
        """The i with n^i < value^s <= n^(i+1), for 1 <= value <= n^2."""
        return bisect_left(self.thresholds, value) - 1

    def window(self, i: int) -> tuple[int, int]:
        return self.thresholds[i] + 1, self.thresholds[i + 1]

    @property
    def floor_bound(self) -> int:
        """floor(n^{1/s}); elements at or below it lie in no window."""
        return self.thresholds[1]


def window_thresholds(n: int, s: int, upto: int) -> tuple[int, ...]:
    return tuple(iroot(n**i, s) for i in range(upto + 1))


def build_interval_colouring(n: int, r: int, sprime: int | None = None) -> IntervalColouringPlan:
    if n < 1 or r < 1:
        raise ValueError("need n >= 1 and r >= 1")
    s = _double_sum_value(r) if sprime is None else sprime
    psi = first_valid_colouring(s - 1, r, SumConstraintMode.SUMS_AND_SHIFTED)
    if psi is None:
        raise ValueError(f"no valid {r}-colouring of [1..{s - 1}] avoiding sums and shifted sums")
    return IntervalColouringPlan(n, r, s, psi, window_thresholds(n, s, 2 * s))


def colour_set_by_intervals(S: IntegerSet | Iterable[int], plan: IntervalColouringPlan) -> tuple[RColouring, list[int]]:
    colours: dict[int, int] = {}
    uncolourable: list[int] = []
    for x in S:
        i = plan.index_of(x)
        if 1 <= i <= plan.sprime - 1:
            colours[x] = plan.psi[i]
        else:
            uncolourable.append(x)
    return RColouring(plan.r, colours), uncolourable
