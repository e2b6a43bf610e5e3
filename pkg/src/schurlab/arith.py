"""Number-theoretic primitives: divisor sieve, D(n), product triples, tuple counts."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from schurlab.errors import BudgetExceeded

INT64_MAX = 2**63 - 1


def iroot(x: int, k: int) -> int:
    """Return floor(x ** (1/k)) exactly for a non-negative integer x."""
    if x < 0 or k < 1:
        raise ValueError("iroot needs x >= 0 and k >= 1")
    if x < 2 or k == 1:
        return x
    y = 1 << -(-x.bit_length() // k)
    if x < 1 << 900:
        y = min(y, int(x ** (1.0 / k)) + 2)
        if y**k <= x:
            y = 1 << -(-x.bit_length() // k)
    # integer Newton iteration from above lands on the floor root
    while True:
        z = ((k - 1) * y + x // y ** (k - 1)) // k
        if z >= y:
            return y
        y = z


def iroot_ceil(x: int, k: int) -> int:
    """Smallest integer m >= 0 with m ** k >= x."""
    m = iroot(x, k)
    return m if m**k >= x else m + 1


@dataclass(frozen=True)
class DivisorTable:
    """Divisor counts d[i] and prefix maxima dmax[m] = D(m) for 1 <= i, m <= n.

    Index 0 of both arrays is unused and holds 0.
    """

    n: int
    d: np.ndarray
    dmax: np.ndarray

    def divisor_count(self, i: int) -> int:
        self._check(i)
        return int(self.d[i])

    def D(self, m: int) -> int:
        self._check(m)
        return int(self.dmax[m])

    def _check(self, m: int) -> None:
        if not 1 <= m <= self.n:
            raise ValueError(f"{m} outside the table extent [1, {self.n}]")


def build_divisor_table(n: int) -> DivisorTable:
    if n < 1:
        raise ValueError(f"table extent must be positive, got {n}")
    d = np.zeros(n + 1, dtype=np.int64)
    # each divisor pair (i, m/i) with i < m/i adds 2; squares add 1
    i = 1
    while i * i <= n:
        d[i * i] += 1
        d[i * (i + 1) :: i] += 2
        i += 1
    dmax = np.maximum.accumulate(d)
    d.setflags(write=False)
    dmax.setflags(write=False)
    return DivisorTable(n=n, d=d, dmax=dmax)


def omega_bound(n: int, table: DivisorTable, exponent: int = 100) -> int:
    """omega(n) = D(n) ** exponent as an exact integer."""
    if n > table.n:
        raise ValueError(f"divisor table extent {table.n} is smaller than n={n}")
    return table.D(n) ** exponent


class ProductTriple(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def degenerate(self) -> bool:
        return self.a == self.b


def enumerate_product_triples(elements: Iterable[int], allow_degenerate: bool = True) -> list[ProductTriple]:
    """All (a, b, c) with a <= b, a * b = c and a, b, c in the set, sorted by (c, a).

    The element 1 never takes part in a triple: 1 * x = x is not a product of
    two smaller terms, and counting it would make every set containing 1
    trivially product-Schur.
    """
    els = _sorted_unique(elements)
    if not els or els[-1] < 4:
        return []
    top = els[-1]
    start = bisect_left(els, 2)
    out: list[ProductTriple] = []
    if len(els) > 256 and top <= 50_000_000:
        arr = np.asarray(els, dtype=np.int64)
        member = np.zeros(top + 1, dtype=bool)
        member[arr] = True
        for idx in range(start, len(els)):
            a = els[idx]
            hi = top // a
            if hi < a:
                break
            j = bisect_right(els, hi)
            if j <= idx:
                continue
            bs = arr[idx if allow_degenerate else idx + 1 : j]
            if bs.size == 0:
                continue
            prods = bs * a
            hits = bs[member[prods]]
            out.extend(ProductTriple(a, int(b), a * int(b)) for b in hits)
    else:
        member_set = set(els)
        for idx in range(start, len(els)):
            a = els[idx]
            hi = top // a
            if hi < a:
                break
            for b in els[idx if allow_degenerate else idx + 1 :]:
                if b > hi:
                    break
                if a * b in member_set:
                    out.append(ProductTriple(a, b, a * b))
    out.sort(key=lambda t: (t.c, t.a))
    return out


def _sorted_unique(elements: Iterable[int]) -> list[int]:
    if hasattr(elements, "to_list"):
        return elements.to_list()  # IntegerSet is already sorted and unique
    return sorted({int(x) for x in elements})


@dataclass(frozen=True)
class TupleCountQuery:
    """k-tuples (a_1..a_k) in [n]^k with prod a_i^e_i <= n and a_i >= t where e_i >= 2."""

    exponents: tuple[int, ...]
    t: int
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if not self.exponents:
            raise ValueError("need k >= 1 exponents")
        if any(e < 1 for e in self.exponents):
            raise ValueError("exponents must be positive")
        if list(self.exponents) != sorted(self.exponents):
            raise ValueError("exponents must be non-decreasing")
        if not 1 <= self.t <= self.n:
            raise ValueError(f"need 1 <= t <= n, got t={self.t}, n={self.n}")

    @property
    def k(self) -> int:
        return len(self.exponents)

    @property
    def e(self) -> int:
        return sum(self.exponents)


class TupleCount(NamedTuple):
    count: int
    bound_numerator: int
    bound_denominator: int
    bound_holds: bool

    @property
    def bound(self) -> Fraction:
        return Fraction(self.bound_numerator, self.bound_denominator)


def count_bounded_product_tuples(
    q: TupleCountQuery,
    table: DivisorTable | None = None,
    budget: int = 10_000_000,
) -> TupleCount:
    """Count the tuples of the query and test them against n * t^(k-e) * D(n)^k.

    The last coordinate is counted arithmetically; ``budget`` caps the number of
    enumerated prefixes.
    """
    if table is None or table.n < q.n:
        table = build_divisor_table(q.n)
    exps = q.exponents
    lows = [q.t if e >= 2 else 1 for e in exps]
    k = len(exps)
    visited = 0

    def last_count(cap: int) -> int:
        # a_k with lows[-1] <= a_k and a_k ** e_k <= cap
        hi = iroot(cap, exps[-1])
        return max(0, hi - lows[-1] + 1)

    def rec(i: int, cap: int) -> int:
        nonlocal visited
        if i == k - 1:
            return last_count(cap)
        total = 0
        e = exps[i]
        a = lows[i]
        while True:
            p = a**e
            if p > cap:
                break
            visited += 1
            if visited > budget:
                raise BudgetExceeded(f"tuple enumeration exceeded {budget} prefixes")
            total += rec(i + 1, cap // p)
            a += 1
        return total

    count = rec(0, q.n)
    # bound = n * t^(k-e) * D^k; with k - e <= 0 compare count * t^(e-k) <= n * D^k
    numerator = q.n * table.D(q.n) ** k
    denominator = q.t ** (q.e - k)
    return TupleCount(count, numerator, denominator, count * denominator <= numerator)


def divisors_within(elements: Sequence[int], universe_cap: int = 20_000_000) -> dict[int, list[int]]:
    """Map each element k to the sorted list of its proper divisors in the set (excluding 1)."""
    els = _sorted_unique(elements)
    out: dict[int, list[int]] = {k: [] for k in els}
    if not els:
        return out
    top = els[-1]
    start = bisect_left(els, 2)
    cost = sum(top // a for a in els[start:])
    if top <= universe_cap and cost <= 50_000_000:
        member = np.zeros(top + 1, dtype=bool)
        member[np.asarray(els, dtype=np.int64)] = True
        for a in els[start:]:
            if 2 * a > top:
                break
            multiples = np.flatnonzero(member[2 * a :: a])
            for m in (2 * a + a * multiples).tolist():
                out[m].append(a)
    else:
        for j, k in enumerate(els):
            out[k] = [d for d in els[start:j] if k % d == 0]
    return out
