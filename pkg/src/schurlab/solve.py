"""Exact decision procedures.

* ``is_product_schur``: can a finite set be r-coloured with no monochromatic
  ab = c?  Backtracking with unit propagation on the triple hypergraph.
* ``schur_number`` and friends: exhaustive bitmask search over colourings of
  [1..n] for sums, sums plus shifted sums, and the weak shifted variant that
  exempts 1 + 1 = 2.
"""

from __future__ import annotations

import enum
import string
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

from schurlab.arith import ProductTriple, enumerate_product_triples
from schurlab.errors import BudgetExceeded
from schurlab.sets import IntegerSet

LETTERS = string.ascii_uppercase
DEFAULT_PRODUCT_BUDGET = 2_000_000
DEFAULT_SCHUR_BUDGET = 500_000_000


@dataclass(frozen=True)
class RColouring:
    """Colours 1..r assigned to the elements of a finite domain."""

    r: int
    assignment: Mapping[int, int]

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("need at least one colour")
        bad = [c for c in self.assignment.values() if not 1 <= c <= self.r]
        if bad:
            raise ValueError(f"colour {bad[0]} outside 1..{self.r}")

    def __getitem__(self, x: int) -> int:
        return self.assignment[x]

    def __len__(self) -> int:
        return len(self.assignment)

    @property
    def domain(self) -> list[int]:
        return sorted(self.assignment)

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.r)]
        for x in self.domain:
            out[self.assignment[x] - 1].append(x)
        return out

    def to_string(self) -> str:
        """Letter string for a colouring of [1..m], colour 1 -> 'A'."""
        dom = self.domain
        if dom != list(range(1, len(dom) + 1)):
            raise ValueError("only colourings of an initial segment [1..m] have a string form")
        return "".join(LETTERS[self.assignment[i] - 1] for i in dom)

    @classmethod
    def from_string(cls, s: str, r: int | None = None) -> "RColouring":
        s = s.strip().upper()
        if any(ch not in LETTERS for ch in s):
            raise ValueError(f"colouring strings use letters A..Z, got {s!r}")
        colours = [LETTERS.index(ch) + 1 for ch in s]
        used = max(colours, default=1)
        return cls(r if r is not None else used, {i + 1: c for i, c in enumerate(colours)})


def monochromatic_triples(colouring: Mapping[int, int] | RColouring, triples: Iterable[ProductTriple]) -> list[ProductTriple]:
    """Triples whose three entries are all coloured and share one colour."""
    col = colouring.assignment if isinstance(colouring, RColouring) else colouring
    out = []
    for t in triples:
        ca = col.get(t.a)
        if ca is not None and ca == col.get(t.b) and ca == col.get(t.c):
            out.append(t)
    return out


# ---------------------------------------------------------------------------
# product-Schur decision


class Verdict(enum.Enum):
    SCHUR = "product-Schur"
    NOT_SCHUR = "not product-Schur"
    UNKNOWN = "unknown"


@dataclass
class ProductSchurDecision:
    verdict: Verdict
    witness: RColouring | None
    r: int
    triples: int
    core_size: int
    nodes: int

    @property
    def is_schur(self) -> bool | None:
        if self.verdict is Verdict.UNKNOWN:
            return None
        return self.verdict is Verdict.SCHUR


class _HypergraphColourer:
    """Colour vertices 0..V-1 with r colours so that no edge is monochromatic.

    Edges have two or three distinct vertices.  Vertices of degree < r are
    peeled first (they can always be coloured last); the remaining core is
    split into connected components and each is searched by DFS in static
    max-degree order with unit propagation and first-use colour symmetry
    breaking.
    """

    def __init__(self, num_vertices: int, edges: Sequence[tuple[int, ...]], r: int, budget: int):
        self.V = num_vertices
        self.edges = [tuple(e) for e in edges]
        self.r = r
        self.budget = budget
        self.nodes = 0
        self.inc: list[list[int]] = [[] for _ in range(num_vertices)]
        for i, e in enumerate(self.edges):
            for v in e:
                self.inc[v].append(i)
        self.core_size = 0

    def solve(self) -> list[int] | None:
        r = self.r
        alive_v = [True] * self.V
        alive_e = [True] * len(self.edges)
        deg = [len(x) for x in self.inc]
        peeled: list[int] = []
        queue = [v for v in range(self.V) if deg[v] < r]
        while queue:
            v = queue.pop()
            if not alive_v[v]:
                continue
            alive_v[v] = False
            peeled.append(v)
            for ei in self.inc[v]:
                if not alive_e[ei]:
                    continue
                alive_e[ei] = False
                for u in self.edges[ei]:
                    if u != v and alive_v[u]:
                        deg[u] -= 1
                        if deg[u] < r:
                            queue.append(u)
        colour = [-1] * self.V
        core = [v for v in range(self.V) if alive_v[v]]
        self.core_size = len(core)
        for comp in self._components(core, alive_e):
            if not self._search(comp, alive_e, colour):
                return None
        # peeled vertices see fewer than r live edges when coloured in reverse
        for v in reversed(peeled):
            banned = 0
            for ei in self.inc[v]:
                others = [u for u in self.edges[ei] if u != v]
                cs = {colour[u] for u in others}
                if len(cs) == 1:
                    c = cs.pop()
                    if c >= 0:
                        banned |= 1 << c
            c = 0
            while banned >> c & 1:
                c += 1
            if c >= r:
                raise AssertionError("peeling invariant violated")
            colour[v] = c
        return colour

    def _components(self, core: list[int], alive_e: list[bool]) -> list[list[int]]:
        seen = set()
        comps = []
        for s in core:
            if s in seen:
                continue
            seen.add(s)
            comp, stack = [], [s]
            while stack:
                v = stack.pop()
                comp.append(v)
                for ei in self.inc[v]:
                    if alive_e[ei]:
                        for u in self.edges[ei]:
                            if u not in seen:
                                seen.add(u)
                                stack.append(u)
            comps.append(comp)
        return comps

    def _search(self, comp: list[int], alive_e: list[bool], colour: list[int]) -> bool:
        r = self.r
        edges = self.edges
        inc = {v: [edges[ei] for ei in self.inc[v] if alive_e[ei]] for v in comp}
        order = sorted(comp, key=lambda v: (-len(inc[v]), v))
        full = (1 << r) - 1
        dom = {v: full for v in comp}
        used = [0] * r
        trail: list[tuple[int, int, int]] = []  # (kind, vertex, old) kind 0 = domain, 1 = assignment

        def assign(v: int, c: int) -> bool:
            pending = [(v, c)]
            while pending:
                v, c = pending.pop()
                if colour[v] >= 0:
                    if colour[v] != c:
                        return False
                    continue
                if not dom[v] >> c & 1:
                    return False
                self.nodes += 1
                colour[v] = c
                used[c] += 1
                trail.append((1, v, c))
                bit = 1 << c
                for e in inc[v]:
                    if len(e) == 2:
                        u = e[0] if e[1] == v else e[1]
                        targets = (u,)
                    else:
                        others = [u for u in e if u != v]
                        a, b = others
                        if colour[a] == c and colour[b] == c:
                            return False
                        if colour[a] == c:
                            targets = (b,)
                        elif colour[b] == c:
                            targets = (a,)
                        else:
                            continue
                    for u in targets:
                        cu = colour[u]
                        if cu >= 0:
                            if cu == c:
                                return False
                            continue
                        d = dom[u]
                        if d & bit:
                            nd = d & ~bit
                            if nd == 0:
                                return False
                            trail.append((0, u, d))
                            dom[u] = nd
                            if nd & (nd - 1) == 0:
                                pending.append((u, nd.bit_length() - 1))
            return True

        def undo(mark: int) -> None:
            while len(trail) > mark:
                kind, v, old = trail.pop()
                if kind == 0:
                    dom[v] = old
                else:
                    colour[v] = -1
                    used[old] -= 1

        def choices(v: int) -> list[int]:
            out = []
            fresh = False
            for c in range(r):
                if not dom[v] >> c & 1:
                    continue
                if used[c] == 0:
                    if fresh:
                        continue
                    fresh = True
                out.append(c)
            return out

        # iterative DFS: frames hold (vertex, order position, candidate colours, next index, trail mark)
        stack: list[list] = []
        pos = 0
        while True:
            while pos < len(order) and colour[order[pos]] >= 0:
                pos += 1
            if pos == len(order):
                return True
            v = order[pos]
            stack.append([v, pos, choices(v), 0, len(trail)])
            while True:
                if not stack:
                    undo(0)
                    return False
                frame = stack[-1]
                undo(frame[4])
                if frame[3] >= len(frame[2]):
                    stack.pop()
                    continue
                c = frame[2][frame[3]]
                frame[3] += 1
                if self.nodes > self.budget:
                    undo(0)
                    raise BudgetExceeded(f"product-Schur search exceeded {self.budget} nodes")
                if assign(frame[0], c):
                    pos = frame[1]
                    break


def is_product_schur(
    S: IntegerSet | Iterable[int],
    r: int = 2,
    allow_degenerate: bool = True,
    budget: int = DEFAULT_PRODUCT_BUDGET,
    triples: Sequence[ProductTriple] | None = None,
) -> ProductSchurDecision:
    """Decide whether every r-colouring of S has a monochromatic product.

    Returns an explicit UNKNOWN verdict when the node budget runs out.
    Elements that lie in no triple (including 1) get colour 1 in the witness.
    """
    if r < 1:
        raise ValueError("need r >= 1")
    elements = S.to_list() if isinstance(S, IntegerSet) else sorted({int(x) for x in S})
    if triples is None:
        triples = enumerate_product_triples(elements, allow_degenerate)
    constrained = sorted({x for t in triples for x in t})
    index = {x: i for i, x in enumerate(constrained)}
    edges = []
    for t in triples:
        if t.a == t.b:
            edges.append((index[t.a], index[t.c]))
        else:
            edges.append((index[t.a], index[t.b], index[t.c]))
    solver = _HypergraphColourer(len(constrained), edges, r, budget)
    try:
        colours = solver.solve()
    except BudgetExceeded:
        return ProductSchurDecision(Verdict.UNKNOWN, None, r, len(triples), solver.core_size, solver.nodes)
    if colours is None:
        return ProductSchurDecision(Verdict.SCHUR, None, r, len(triples), solver.core_size, solver.nodes)
    assignment = {x: 1 for x in elements}
    for x, c in zip(constrained, colours):
        assignment[x] = c + 1
    witness = RColouring(r, assignment)
    return ProductSchurDecision(Verdict.NOT_SCHUR, witness, r, len(triples), solver.core_size, solver.nodes)


# ---------------------------------------------------------------------------
# Schur numbers


class SumConstraintMode(enum.Enum):
    SUMS = "sums"
    SUMS_AND_SHIFTED = "shifted"
    WEAK_SHIFTED = "weak"

    @classmethod
    def parse(cls, value: "str | SumConstraintMode") -> "SumConstraintMode":
        if isinstance(value, cls):
            return value
        aliases = {"sums": cls.SUMS, "shifted": cls.SUMS_AND_SHIFTED, "sums_and_shifted": cls.SUMS_AND_SHIFTED,
                   "weak": cls.WEAK_SHIFTED, "weak_shifted": cls.WEAK_SHIFTED}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown mode {value!r}; expected sums, shifted or weak") from None


class SumViolation(NamedTuple):
    a: int
    b: int
    c: int
    kind: str  # "sum" (a + b = c) or "shifted" (a + b + 1 = c)


def verify_sum_colouring(colouring: RColouring, mode: SumConstraintMode | str = SumConstraintMode.SUMS) -> tuple[bool, SumViolation | None]:
    """Scan (a, b, c) with a <= b in lex order for a forbidden monochromatic relation."""
    mode = SumConstraintMode.parse(mode)
    col = colouring.assignment
    n = len(col)
    if sorted(col) != list(range(1, n + 1)):
        raise ValueError("colouring must be total on [1..n]")
    shifted = mode is not SumConstraintMode.SUMS
    for a in range(1, n + 1):
        ca = col[a]
        for b in range(a, n + 1):
            if col[b] != ca:
                continue
            c = a + b
            if c <= n and col[c] == ca and not (mode is SumConstraintMode.WEAK_SHIFTED and a == b == 1):
                return False, SumViolation(a, b, c, "sum")
            if shifted and c + 1 <= n and col[c + 1] == ca:
                return False, SumViolation(a, b, c + 1, "shifted")
    return True, None


@dataclass
class SchurNumberResult:
    """Outcome of an exhaustive search over colourings of [1..m].

    ``max_colourable`` is the largest m admitting a valid colouring (a lower
    bound when ``complete`` is false); ``value`` is max_colourable + 1, the
    least n that cannot be coloured, and is None when the search was cut off.
    """

    r: int
    mode: SumConstraintMode
    max_colourable: int
    complete: bool
    witness: RColouring | None
    nodes: int
    elapsed: float = field(default=0.0, compare=False)

    @property
    def value(self) -> int | None:
        return self.max_colourable + 1 if self.complete else None


def _forbid(mask: int, k: int, mode: SumConstraintMode) -> int:
    """New forbidden positions created by adding k to a class whose mask (already including k) is ``mask``."""
    f = mask << k
    if mode is not SumConstraintMode.SUMS:
        f |= mask << (k + 1)
    if k == 1 and mode is SumConstraintMode.WEAK_SHIFTED:
        f &= ~(1 << 2)
    return f


def _search_colourings(r: int, mode: SumConstraintMode, budget: int, target: int | None = None):
    """DFS over colourings of 1, 2, 3, ... with first-use symmetry breaking.

    Without ``target`` it explores the whole tree and returns the deepest
    colouring; with ``target`` it returns the first (lex-smallest) colouring
    of [1..target].  Forward check: once every colour is in use, a position
    forbidden for all colours caps how deep the branch can go.
    """
    masks = [0] * r
    forb = [0] * r
    seq: list[int] = []
    best = 0
    best_seq: list[int] = []
    nodes = 0
    found = None

    def rec(k: int, used: int) -> bool:
        nonlocal best, best_seq, nodes, found
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"Schur search exceeded {budget} nodes")
        if k - 1 > best:
            best = k - 1
            best_seq = list(seq)
        if target is not None and k - 1 == target:
            found = list(seq)
            return True
        if used == r:
            allf = forb[0]
            for c in range(1, r):
                allf &= forb[c]
            allf >>= k
            if allf:
                reach = k + (allf & -allf).bit_length() - 2
                if (target is not None and reach < target) or (target is None and reach <= best):
                    return False
        bit = 1 << k
        for c in range(min(used + 1, r)):
            if forb[c] & bit:
                continue
            old_m, old_f = masks[c], forb[c]
            m = old_m | bit
            masks[c] = m
            forb[c] = old_f | _forbid(m, k, mode)
            seq.append(c)
            done = rec(k + 1, max(used, c + 1))
            seq.pop()
            masks[c], forb[c] = old_m, old_f
            if done:
                return True
        return False

    complete = True
    try:
        rec(1, 0)
    except BudgetExceeded:
        complete = False
    return best, best_seq, found, nodes, complete


def _run_search(r: int, mode: SumConstraintMode, budget: int) -> SchurNumberResult:
    if r < 1:
        raise ValueError("need r >= 1")
    t0 = time.perf_counter()
    best, seq, _, nodes, complete = _search_colourings(r, mode, budget)
    witness = RColouring(r, {i + 1: c + 1 for i, c in enumerate(seq)}) if seq else RColouring(r, {})
    return SchurNumberResult(r, mode, best, complete, witness, nodes, time.perf_counter() - t0)


def schur_number(r: int, mode: SumConstraintMode | str = SumConstraintMode.SUMS, budget: int = DEFAULT_SCHUR_BUDGET) -> SchurNumberResult:
    """Least n such that every r-colouring of [n] has a forbidden monochromatic relation."""
    return _run_search(r, SumConstraintMode.parse(mode), budget)


def double_sum_schur_number(r: int, budget: int = DEFAULT_SCHUR_BUDGET) -> SchurNumberResult:
    return _run_search(r, SumConstraintMode.SUMS_AND_SHIFTED, budget)


def weak_double_sum_max(r: int, budget: int = DEFAULT_SCHUR_BUDGET) -> SchurNumberResult:
    """Largest n colourable with no a + b = c or a + b + 1 = c, except 1 + 1 = 2."""
    return _run_search(r, SumConstraintMode.WEAK_SHIFTED, budget)


def first_valid_colouring(m: int, r: int, mode: SumConstraintMode | str, budget: int = DEFAULT_SCHUR_BUDGET) -> RColouring | None:
    """The lex-first valid r-colouring of [1..m], or None if there is none."""
    mode = SumConstraintMode.parse(mode)
    if m == 0:
        return RColouring(r, {})
    _, _, found, _, complete = _search_colourings(r, mode, budget, target=m)
    if found is None:
        if not complete:
            raise BudgetExceeded(f"no colouring of [1..{m}] found within {budget} nodes")
        return None
    return RColouring(r, {i + 1: c + 1 for i, c in enumerate(found)})
