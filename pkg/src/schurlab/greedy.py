"""The two-colour greedy algorithm and its forbidden-configuration witnesses.

Elements are processed in increasing order.  k joins R unless k is a product
of two or three members of R; otherwise it joins B unless it is a product of
two members of B; otherwise the algorithm fails at k.  Every membership test
walks the divisors of k that lie in the input set, filtered by class.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields
from typing import Iterable, Mapping, Sequence

from schurlab.arith import divisors_within
from schurlab.sets import IntegerSet


class Status(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"


@dataclass(frozen=True)
class TwoColouring:
    R: IntegerSet
    B: IntegerSet

    def __post_init__(self) -> None:
        overlap = [x for x in self.R if x in self.B]
        if overlap:
            raise ValueError(f"colour classes overlap at {overlap[0]}")

    def as_assignment(self) -> dict[int, int]:
        """R -> colour 1, B -> colour 2."""
        out = {x: 1 for x in self.R}
        out.update({x: 2 for x in self.B})
        return out


@dataclass(frozen=True)
class GreedyOutcome:
    status: Status
    colouring: TwoColouring
    failed_element: int | None = None
    b_witness: tuple[int, int] | None = None
    r_witness: tuple[int, int, int] | None = None  # (d, e, f) with f = 1 for a two-factor product

    def __post_init__(self) -> None:
        if self.status is Status.FAILURE:
            k = self.failed_element
            if k is None or self.b_witness is None or self.r_witness is None:
                raise ValueError("a failure needs the failed element and both witnesses")
            a, b = self.b_witness
            d, e, f = self.r_witness
            if a * b != k or d * e * f != k:
                raise ValueError("witness factorisations must multiply to the failed element")

    @property
    def success(self) -> bool:
        return self.status is Status.SUCCESS


def _pair_in(k: int, divs: Sequence[int], allowed) -> tuple[int, int] | None:
    # lex-smallest (x, y), x <= y, x * y = k, both in the class
    for x in divs:
        if x * x > k:
            break
        if allowed(x) and k % x == 0 and allowed(k // x):
            return x, k // x
    return None


def _triple_in(k: int, divs: Sequence[int], allowed) -> tuple[int, int, int] | None:
    # lex-smallest (x, y, z), x <= y <= z, x * y * z = k, all in the class
    cand = [x for x in divs if allowed(x)]
    for i, x in enumerate(cand):
        if x * x * x > k:
            break
        rest = k // x
        for y in cand[i:]:
            if y * y > rest:
                break
            if rest % y == 0 and allowed(rest // y):
                return x, y, rest // y
    return None


def r_factorisation(k: int, divs: Sequence[int], in_r) -> tuple[int, int, int] | None:
    """A factorisation of k in R.R (returned with a trailing 1) or else in R.R.R."""
    pair = _pair_in(k, divs, in_r)
    if pair is not None:
        return pair[0], pair[1], 1
    return _triple_in(k, divs, in_r)


def greedy_two_colour(S: IntegerSet | Iterable[int], divisors: Mapping[int, Sequence[int]] | None = None) -> GreedyOutcome:
    if not isinstance(S, IntegerSet):
        els = sorted({int(x) for x in S})
        S = IntegerSet(max(els, default=1), els)
    if divisors is None:
        divisors = divisors_within(S)
    colour: dict[int, int] = {}
    in_r = lambda x: colour.get(x) == 1  # noqa: E731
    in_b = lambda x: colour.get(x) == 2  # noqa: E731
    for k in S:
        divs = divisors[k]
        if r_factorisation(k, divs, in_r) is None:
            colour[k] = 1
            continue
        if _pair_in(k, divs, in_b) is None:
            colour[k] = 2
            continue
        partial = _colouring(S.n, colour)
        return GreedyOutcome(Status.FAILURE, partial, k, _pair_in(k, divs, in_b), r_factorisation(k, divs, in_r))
    return GreedyOutcome(Status.SUCCESS, _colouring(S.n, colour))


def _colouring(n: int, colour: Mapping[int, int]) -> TwoColouring:
    return TwoColouring(
        IntegerSet(n, (x for x, c in colour.items() if c == 1)),
        IntegerSet(n, (x for x, c in colour.items() if c == 2)),
    )


# ---------------------------------------------------------------------------
# forbidden configurations


@dataclass(frozen=True)
class ForbiddenConfiguration:
    a: int
    b: int
    c: int
    d: int
    e: int
    f: int
    x: int
    y: int
    z: int
    u: int
    v: int
    w: int

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, fl.name) for fl in fields(self))

    @classmethod
    def from_sequence(cls, values: Sequence[int]) -> "ForbiddenConfiguration":
        if len(values) != 12:
            raise ValueError(f"a forbidden configuration has 12 entries, got {len(values)}")
        return cls(*(int(v) for v in values))

    def csv_row(self) -> str:
        return ",".join(str(v) for v in self.as_tuple())

    @property
    def inner(self) -> set[int]:
        """The set A = {x, y, z, d, e, f, u, v, w} without 1."""
        return {self.x, self.y, self.z, self.d, self.e, self.f, self.u, self.v, self.w} - {1}


def check_forbidden_configuration(cfg: ForbiddenConfiguration, S: IntegerSet | Iterable[int]) -> tuple[bool, list[str]]:
    violations: list[str] = []
    t = cfg.as_tuple()
    if any(v < 1 for v in t):
        return False, ["entries must be positive integers"]
    a, b, c, d, e, f, x, y, z, u, v, w = t
    if not (c == a * b == d * e * f):
        violations.append("(i): c = ab = def fails")
    if a != x * y * z:
        violations.append("(i): a = xyz fails")
    if b != u * v * w:
        violations.append("(i): b = uvw fails")
    members = S if isinstance(S, IntegerSet) else set(S)
    for name in ("a", "b", "c", "d", "e", "x", "y", "u", "v"):
        if getattr(cfg, name) not in members:
            violations.append(f"(ii): {name}={getattr(cfg, name)} not in S")
    for name in ("f", "z", "w"):
        val = getattr(cfg, name)
        if val != 1 and val not in members:
            violations.append(f"(ii): {name}={val} not in S or 1")
    others = {"c": c, "d": d, "e": e, "f": f, "x": x, "y": y, "z": z, "u": u, "v": v, "w": w}
    for head, hv in (("a", a), ("b", b)):
        for name, val in others.items():
            if hv == val:
                violations.append(f"(iii): {head} equals {name}")
    A = cfg.inner
    AA = {p * q for p in A for q in A}
    AAA = {p * q for p in AA for q in A}
    hit2 = sorted(A & AA)
    hit3 = sorted(A & AAA)
    if hit2:
        violations.append(f"(iv): {hit2[0]} lies in both A and A.A")
    if hit3:
        violations.append(f"(iv): {hit3[0]} lies in both A and A.A.A")
    return not violations, violations


def extract_forbidden_configuration(outcome: GreedyOutcome, S: IntegerSet) -> ForbiddenConfiguration:
    """Rebuild the 12-tuple behind a greedy failure.

    The B-witness (a, b) is factorised back into R with the same divisor
    search the algorithm uses: two-factor forms first, then the
    lexicographically smallest three-factor form.
    """
    if outcome.status is not Status.FAILURE:
        raise ValueError("extraction needs a failed greedy outcome")
    if 1 in S:
        raise ValueError("extraction requires 1 not in S")
    R, B = outcome.colouring.R, outcome.colouring.B
    c = outcome.failed_element
    a, b = outcome.b_witness
    d, e, f = outcome.r_witness
    for name, val in (("a", a), ("b", b)):
        if val not in B:
            raise ValueError(f"B-witness {name}={val} is not in the B class")
    for name, val in (("d", d), ("e", e)):
        if val not in R:
            raise ValueError(f"R-witness {name}={val} is not in the R class")
    if f != 1 and f not in R:
        raise ValueError(f"R-witness f={f} is not in the R class")
    in_r = lambda t: t in R  # noqa: E731
    divisors = divisors_within(S)
    facs = []
    for val in (a, b):
        fac = r_factorisation(val, divisors[val], in_r)
        if fac is None:
            raise ValueError(f"{val} in B has no factorisation in R")
        facs.append(fac)
    (x, y, z), (u, v, w) = facs
    return ForbiddenConfiguration(a, b, c, d, e, f, x, y, z, u, v, w)


def effective_size(cfg: ForbiddenConfiguration) -> int:
    return len(set(cfg.as_tuple()) - {1})
