"""Independent brute-force oracles shared by the test modules.

None of these reuse library code paths: they are deliberately naive.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def brute_divisor_count(i: int) -> int:
    return sum(1 for d in range(1, i + 1) if i % d == 0)


def brute_product_triples(elements, allow_degenerate=True) -> set[tuple[int, int, int]]:
    """All (a, b, c) with a <= b, a * b = c, all three in the set, 1 excluded."""
    s = {x for x in elements if x >= 2}
    out = set()
    for a in s:
        for b in s:
            if a <= b and a * b in s and (allow_degenerate or a != b):
                out.add((a, b, a * b))
    return out


def exhaustive_product_schur(elements, r: int = 2, allow_degenerate: bool = True) -> bool:
    """True iff every r-colouring of the set has a monochromatic product triple.

    Enumerates all r^k colourings at once as an integer array.
    """
    els = sorted(set(elements))
    triples = brute_product_triples(els, allow_degenerate)
    k = len(els)
    if not triples:
        return False
    pos = {x: i for i, x in enumerate(els)}
    codes = np.arange(r**k, dtype=np.int64)
    digits = np.empty((k, r**k), dtype=np.int8)
    for i in range(k):
        digits[i] = codes % r
        codes //= r
    hit = np.zeros(r**k, dtype=bool)
    for a, b, c in triples:
        da, db, dc = digits[pos[a]], digits[pos[b]], digits[pos[c]]
        hit |= (da == db) & (db == dc)
    return bool(hit.all())


def naive_valid(colours: list[int], mode: str) -> bool:
    """colours[i] is the colour of i + 1; checks every forbidden relation directly."""
    m = len(colours)
    for a in range(1, m + 1):
        for b in range(a, m + 1):
            for c, shifted in ((a + b, False), (a + b + 1, True)):
                if c > m or (shifted and mode == "sums"):
                    continue
                if mode == "weak" and not shifted and (a, b) == (1, 1):
                    continue
                if colours[a - 1] == colours[b - 1] == colours[c - 1]:
                    return False
    return True


def naive_max_colourable(r: int, mode: str, cap: int = 60) -> int:
    """Largest m with a valid r-colouring of [1..m], by plain backtracking without pruning tricks."""
    best = 0
    colours: list[int] = []

    def extend() -> None:
        nonlocal best
        best = max(best, len(colours))
        if len(colours) >= cap:
            return
        for c in range(r):
            colours.append(c)
            if naive_valid_last(colours, mode):
                extend()
            colours.pop()

    extend()
    return best


def naive_valid_last(colours: list[int], mode: str) -> bool:
    # only relations whose largest member is the newest element
    c = len(colours)
    col = colours[c - 1]
    for a in range(1, c):
        b = c - a
        if b >= a and colours[a - 1] == colours[b - 1] == col:
            if not (mode == "weak" and (a, b) == (1, 1)):
                return False
        b = c - 1 - a
        if mode != "sums" and b >= a and colours[a - 1] == colours[b - 1] == col:
            return False
    return True


def all_colourings(k: int, r: int):
    return itertools.product(range(1, r + 1), repeat=k)


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
