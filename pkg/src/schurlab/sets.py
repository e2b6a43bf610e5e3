"""Finite integer sets inside a universe [n], plus the set-file format.

Set files are plain text: a header line ``n=<n>`` followed by one decimal
element per line, in increasing order.
"""

from __future__ import annotations

import os
from typing import Iterable, Iterator

import numpy as np

DENSE_LIMIT = 50_000_000


class IntegerSet:
    """An immutable subset of [n] with constant-time membership.

    Universes up to ``DENSE_LIMIT`` use a dense boolean bitmap; larger ones
    (planted instances at n ~ 10^11, say) fall back to a hash set.
    """

    __slots__ = ("n", "_elements", "_bitmap", "_hashed")

    def __init__(self, n: int, elements: Iterable[int] = ()):
        n = int(n)
        if n < 1:
            raise ValueError(f"universe size must be positive, got {n}")
        els = sorted({int(x) for x in elements})
        if els and (els[0] < 1 or els[-1] > n):
            bad = els[0] if els[0] < 1 else els[-1]
            raise ValueError(f"element {bad} outside [1, {n}]")
        self.n = n
        self._elements = tuple(els)
        if n <= DENSE_LIMIT:
            bitmap = np.zeros(n + 1, dtype=bool)
            if els:
                bitmap[np.asarray(els, dtype=np.int64)] = True
            bitmap.setflags(write=False)
            self._bitmap = bitmap
            self._hashed = None
        else:
            self._bitmap = None
            self._hashed = frozenset(els)

    @classmethod
    def from_mask(cls, n: int, mask: np.ndarray) -> "IntegerSet":
        """Build from a boolean array where mask[i - 1] says whether i is present."""
        idx = np.flatnonzero(mask) + 1
        out = cls.__new__(cls)
        out.n = int(n)
        out._elements = tuple(idx.tolist())
        if n <= DENSE_LIMIT:
            bitmap = np.zeros(n + 1, dtype=bool)
            bitmap[1:] = mask
            bitmap.setflags(write=False)
            out._bitmap, out._hashed = bitmap, None
        else:
            out._bitmap, out._hashed = None, frozenset(out._elements)
        return out

    @property
    def dense(self) -> bool:
        return self._bitmap is not None

    def __contains__(self, x: object) -> bool:
        try:
            i = int(x)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            return False
        if self._bitmap is not None:
            return 1 <= i <= self.n and bool(self._bitmap[i])
        return i in self._hashed

    def __iter__(self) -> Iterator[int]:
        return iter(self._elements)

    def __len__(self) -> int:
        return len(self._elements)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntegerSet):
            return NotImplemented
        return self.n == other.n and self._elements == other._elements

    def __hash__(self) -> int:
        return hash((self.n, self._elements))

    def __repr__(self) -> str:
        shown = ", ".join(map(str, self._elements[:8]))
        more = ", ..." if len(self._elements) > 8 else ""
        return f"IntegerSet(n={self.n}, {{{shown}{more}}})"

    def to_list(self) -> list[int]:
        return list(self._elements)

    def min(self) -> int | None:
        return self._elements[0] if self._elements else None

    def max(self) -> int | None:
        return self._elements[-1] if self._elements else None

    def without(self, *values: int) -> "IntegerSet":
        drop = set(values)
        return IntegerSet(self.n, (x for x in self._elements if x not in drop))

    def restrict_above(self, bound: int) -> "IntegerSet":
        return IntegerSet(self.n, (x for x in self._elements if x > bound))

    def issubset(self, other: "IntegerSet") -> bool:
        return all(x in other for x in self._elements)


def format_set(s: IntegerSet) -> str:
    lines = [f"n={s.n}"]
    lines.extend(str(x) for x in s)
    return "\n".join(lines) + "\n"


def parse_set(text: str) -> IntegerSet:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("set file must start with a header line 'n=<n>'")
    try:
        n = int(lines[0][2:])
        elements = [int(ln) for ln in lines[1:]]
    except ValueError as exc:
        raise ValueError(f"malformed set file: {exc}") from None
    if elements != sorted(set(elements)):
        raise ValueError("set file elements must be strictly increasing")
    return IntegerSet(n, elements)


def write_set(s: IntegerSet, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_set(s))


def read_set(path: str | os.PathLike) -> IntegerSet:
    with open(path, encoding="ascii") as fh:
        return parse_set(fh.read())
