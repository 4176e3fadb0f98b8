"""Exact linear algebra over any field of scalars (rank tests, kernels)."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _inv(c):
    return Fraction(1, c) if isinstance(c, int) else 1 / c


class Echelon:
    """Incrementally maintained row-echelon basis of a span."""

    def __init__(self, width: int):
        self.width = width
        self.rows: list[tuple[int, list]] = []     # (pivot column, row with 1 at pivot)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: Sequence) -> list:
        v = list(v)
        for col, row in self.rows:
            c = v[col]
            if c:
                v = [a - c * b for a, b in zip(v, row)]
        return v

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def add(self, v: Sequence) -> bool:
        """Insert ``v``; return True if it enlarged the span."""
        r = self.reduce(v)
        for col, c in enumerate(r):
            if c:
                inv = _inv(c)
                r = [a * inv for a in r]
                # keep rows fully reduced against the new pivot
                self.rows = [(pc, [a - row[col] * b for a, b in zip(row, r)]) for pc, row in self.rows]
                self.rows.append((col, r))
                return True
        return False


def rank(vectors: Sequence[Sequence]) -> int:
    if not vectors:
        return 0
    e = Echelon(len(vectors[0]))
    for v in vectors:
        e.add(v)
    return e.rank


def kernel(rows: Sequence[Sequence], width: int) -> list[list]:
    """Basis of {v : row . v = 0 for every row}."""
    e = Echelon(width)
    for r in rows:
        e.add(r)
    pivots = {col: row for col, row in e.rows}
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * width
        v[f] = 1
        for col, row in pivots.items():
            v[col] = -row[f]
        basis.append(v)
    return basis


def dot(a: Sequence, b: Sequence):
    acc = 0
    for x, y in zip(a, b):
        if x and y:
            acc = acc + x * y
    return acc
