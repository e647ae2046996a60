"""Exact rank of sparse rational vectors by incremental row reduction."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class EchelonBasis:
    """Reduced rows keyed by pivot column; add vectors one at a time.

    Each stored row has its pivot as its smallest column with coefficient 1,
    so reducing a new vector in increasing column order terminates.
    """

    def __init__(self):
        self.pivots: dict[int, dict[int, Fraction]] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
        v = {k: Fraction(x) for k, x in vec.items() if x}
        while v:
            c = min(v)
            row = self.pivots.get(c)
            if row is None:
                return v
            f = v[c]
            for k, x in row.items():
                w = v.get(k, 0) - f * x
                if w:
                    v[k] = w
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: Mapping[int, Fraction]) -> bool:
        """Insert ``vec``; True when it was independent of the rows so far."""
        v = self.reduce(vec)
        if not v:
            return False
        c = min(v)
        inv = 1 / v[c]
        self.pivots[c] = {k: x * inv for k, x in v.items()}
        return True


def rank(vectors: Iterable[Mapping[int, Fraction]]) -> int:
    basis = EchelonBasis()
    for vec in vectors:
        basis.add(vec)
    return len(basis)


def nullity(rows: Iterable[Mapping[int, Fraction]], ncols: int) -> int:
    return ncols - rank(rows)
