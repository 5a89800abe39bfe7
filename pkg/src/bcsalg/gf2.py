"""Linear algebra over GF(2) with rows stored as Python int bitmasks."""
from __future__ import annotations


class Gf2System:
    """Incrementally built linear system ``row · t = rhs`` over GF(2).

    Rows are bitmasks over unknowns ``0..n-1``. The basis is kept reduced on
    pivots so that consistency checks are a single reduction pass.
    """

    def __init__(self, n: int):
        self.n = n
        self.pivots: dict[int, tuple[int, int]] = {}

    def copy(self) -> "Gf2System":
        s = Gf2System(self.n)
        s.pivots = dict(self.pivots)
        return s

    def reduce(self, row: int, rhs: int) -> tuple[int, int]:
        for p, (prow, prhs) in self.pivots.items():
            if (row >> p) & 1:
                row ^= prow
                rhs ^= prhs
        return row, rhs

    def consistent_with(self, row: int, rhs: int) -> bool:
        row, rhs = self.reduce(row, rhs & 1)
        return row != 0 or rhs == 0

    def add(self, row: int, rhs: int) -> bool:
        """Add an equation; returns ``False`` (and leaves the system unchanged) if inconsistent."""
        row, rhs = self.reduce(row, rhs & 1)
        if row == 0:
            return rhs == 0
        p = row.bit_length() - 1
        for q, (qrow, qrhs) in list(self.pivots.items()):
            if (qrow >> p) & 1:
                self.pivots[q] = (qrow ^ row, qrhs ^ rhs)
        self.pivots[p] = (row, rhs)
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def lexmin_solution(self) -> list[int] | None:
        """Solution minimising ``(t_0, t_1, ...)`` lexicographically, or ``None``."""
        sys_ = self.copy()
        out = []
        for j in range(self.n):
            if sys_.add(1 << j, 0):
                out.append(0)
            elif sys_.add(1 << j, 1):
                out.append(1)
            else:
                return None
        return out


def solve(rows: list[int], rhs: list[int], n: int) -> list[int] | None:
    """Lexicographically least solution of ``rows[i] · t = rhs[i]``, or ``None``."""
    s = Gf2System(n)
    for r, b in zip(rows, rhs):
        if not s.add(r, b):
            return None
    return s.lexmin_solution()


def rank(rows: list[int], n: int) -> int:
    s = Gf2System(n)
    for r in rows:
        s.add(r, 0)
    return s.rank


def nullspace(rows: list[int], n: int) -> list[int]:
    """Basis of ``{t : rows · t = 0}`` as bitmasks, ordered by free variable."""
    s = Gf2System(n)
    for r in rows:
        s.add(r, 0)
    basis = []
    for f in range(n):
        if f in s.pivots:
            continue
        vec = 1 << f
        for p, (prow, _) in s.pivots.items():
            if (prow >> f) & 1:
                vec |= 1 << p
        basis.append(vec)
    return basis
