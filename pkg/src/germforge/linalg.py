"""Incremental exact Gaussian elimination on sparse rational rows.

Rows are fed one at a time.  Each accepted row is reduced against every
earlier pivot (in insertion order) and then normalized on its own pivot, the
smallest surviving column under ``col_key``.  This keeps the stored rows
triangular with respect to insertion order, so back substitution walks them
in reverse with all free columns set to zero.

With ``track=True`` every stored row remembers which input rows (and with
which multipliers) it is made of; an inconsistent row then yields the exact
linear combination of inputs that reads ``0 = c`` with ``c != 0``.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Optional, Tuple

Row = Dict[Hashable, Fraction]


class Inconsistent(Exception):
    def __init__(self, combination: Dict[int, Fraction], rhs: Fraction):
        super().__init__(f"0 = {rhs}")
        self.combination = combination
        self.rhs = rhs


class Eliminator:
    def __init__(self, col_key: Callable[[Hashable], object], track: bool = False):
        self.col_key = col_key
        self.track = track
        self._pivot_cols: List[Hashable] = []
        self._rows: List[Row] = []
        self._rhs: List[Fraction] = []
        self._prov: List[Dict[int, Fraction]] = []
        self._where: Dict[Hashable, int] = {}
        self.n_input = 0

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, row: Row, rhs: Fraction = Fraction(0), prov=None):
        """Reduce a row against all stored pivots; returns (row, rhs, prov)."""
        row = {c: Fraction(v) for c, v in row.items() if v}
        rhs = Fraction(rhs)
        where = self._where
        heap = [where[c] for c in row if c in where]
        heapq.heapify(heap)
        seen = set(heap)
        while heap:
            k = heapq.heappop(heap)
            col = self._pivot_cols[k]
            factor = row.get(col)
            if not factor:
                continue
            for c, v in self._rows[k].items():
                nv = row.get(c, 0) - factor * v
                if nv:
                    row[c] = nv
                    if c in where and where[c] not in seen:
                        seen.add(where[c])
                        heapq.heappush(heap, where[c])
                else:
                    row.pop(c, None)
            rhs -= factor * self._rhs[k]
            if prov is not None:
                for r, v in self._prov[k].items():
                    nv = prov.get(r, 0) - factor * v
                    if nv:
                        prov[r] = nv
                    else:
                        prov.pop(r, None)
        return row, rhs, prov

    def add_row(self, row: Row, rhs=0) -> int:
        """Insert an input row; returns its input index.

        Raises :class:`Inconsistent` when the row reduces to ``0 = c != 0``.
        """
        idx = self.n_input
        self.n_input += 1
        prov = {idx: Fraction(1)} if self.track else None
        row, rhs, prov = self.reduce(row, rhs, prov)
        if not row:
            if rhs:
                raise Inconsistent(prov or {}, rhs)
            return idx
        piv = min(row, key=self.col_key)
        inv = 1 / row[piv]
        row = {c: v * inv for c, v in row.items()}
        rhs *= inv
        if prov is not None:
            prov = {r: v * inv for r, v in prov.items()}
        self._where[piv] = len(self._rows)
        self._pivot_cols.append(piv)
        self._rows.append(row)
        self._rhs.append(rhs)
        self._prov.append(prov or {})
        return idx

    def in_span(self, row: Row) -> Tuple[bool, Optional[Dict[int, Fraction]]]:
        """Whether ``row`` lies in the span of the inputs, with the combination."""
        red, _, prov = self.reduce(row, Fraction(0), {} if self.track else None)
        if red:
            return False, None
        # prov holds minus the combination used to cancel ``row``
        return True, ({r: -v for r, v in prov.items()} if prov is not None else None)

    def solve(self) -> Dict[Hashable, Fraction]:
        """A particular solution with every free column set to zero."""
        sol: Dict[Hashable, Fraction] = {}
        for k in range(len(self._rows) - 1, -1, -1):
            piv = self._pivot_cols[k]
            acc = self._rhs[k]
            for c, v in self._rows[k].items():
                if c != piv:
                    x = sol.get(c)
                    if x:
                        acc -= v * x
            if acc:
                sol[piv] = acc
        return sol


def replay(rows: List[Tuple[Row, Fraction]], combination: Dict[int, Fraction]) -> Tuple[Row, Fraction]:
    """Form ``sum c_i * (row_i, rhs_i)``; a valid obstruction gives ``({}, nonzero)``."""
    acc: Row = {}
    rhs = Fraction(0)
    for i, c in combination.items():
        row, b = rows[i]
        for col, v in row.items():
            nv = acc.get(col, 0) + c * v
            if nv:
                acc[col] = nv
            else:
                acc.pop(col, None)
        rhs += c * b
    return acc, rhs
