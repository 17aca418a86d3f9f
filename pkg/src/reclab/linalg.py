"""Linear systems over Z/p^k by p-adically pivoted elimination.

The pivot at each step is an entry of minimal p-valuation in the remaining
submatrix, so every pivot row is divisible by its own pivot's power of p.
A solve then costs at most ``max_pivot_valuation`` digits of precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import NoSolution
from .padic import val_int


@dataclass(frozen=True)
class Solution:
    x: list[int]
    precision: int  # x is determined mod p**precision
    pivot_columns: tuple[int, ...]


class ModularSolver:
    """Factor ``A`` once over Z/p^k and solve ``A x = b`` for many ``b``.

    ``column_order`` fixes how ties between equally good pivots are broken;
    permuting it yields a different (equally valid) particular solution of
    an underdetermined system.
    """

    def __init__(self, A: Sequence[Sequence[int]], p: int, k: int, column_order=None):
        self.p, self.k = p, k
        self.mod = p**k
        rows = len(A)
        cols = len(A[0]) if rows else 0
        self.shape = (rows, cols)
        M = [[int(a) % self.mod for a in row] for row in A]
        # T records the row operations so that T A = echelon.
        T = [[int(i == j) for j in range(rows)] for i in range(rows)]
        order = list(range(cols)) if column_order is None else list(column_order)
        if sorted(order) != list(range(cols)):
            raise ValueError("column_order must be a permutation of the columns")
        free = list(order)
        pivots: list[tuple[int, int, int]] = []  # (row, col, valuation)
        for r in range(rows):
            best = None
            for c in free:
                for rr in range(r, rows):
                    e = M[rr][c]
                    if e:
                        v = val_int(e, p, k)
                        if best is None or v < best[0]:
                            best = (v, rr, c)
                            if v == 0:
                                break
                if best is not None and best[0] == 0:
                    break
            if best is None:
                break
            v, rr, c = best
            M[r], M[rr] = M[rr], M[r]
            T[r], T[rr] = T[rr], T[r]
            unit_inv = pow(M[r][c] // p**v, -1, self.mod)
            for i in range(r + 1, rows):
                e = M[i][c]
                if e:
                    f = (e // p**v) * unit_inv % self.mod
                    Mi, Mr = M[i], M[r]
                    for j in range(cols):
                        if Mr[j]:
                            Mi[j] = (Mi[j] - f * Mr[j]) % self.mod
                    Ti, Tr = T[i], T[r]
                    for j in range(rows):
                        if Tr[j]:
                            Ti[j] = (Ti[j] - f * Tr[j]) % self.mod
            free.remove(c)
            pivots.append((r, c, v))
        self._M, self._T, self._pivots = M, T, pivots
        self.max_pivot_valuation = max((v for _, _, v in pivots), default=0)

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def solve(self, b: Sequence[int]) -> Solution:
        p, k, mod = self.p, self.k, self.mod
        rows, cols = self.shape
        if len(b) != rows:
            raise ValueError("right-hand side has wrong length")
        b = [int(x) % mod for x in b]
        rhs = [sum(t * x for t, x in zip(Trow, b)) % mod for Trow in self._T]
        for r in range(len(self._pivots), rows):
            if rhs[r]:
                raise NoSolution("inconsistent system")
        x = [0] * cols
        for r, c, v in reversed(self._pivots):
            acc = rhs[r] - sum(self._M[r][j] * x[j] for j in range(cols) if x[j])
            acc %= mod
            if acc % p**v:
                raise NoSolution("right-hand side not divisible by pivot")
            unit = self._M[r][c] // p**v
            x[c] = (acc // p**v) * pow(unit, -1, mod) % p ** (k - v)
        prec = k - self.max_pivot_valuation
        return Solution([xi % p**prec for xi in x], prec, tuple(c for _, c, _ in self._pivots))


def solve_mod(A, b, p: int, k: int, column_order=None) -> Solution:
    return ModularSolver(A, p, k, column_order).solve(b)


def kernel_mod_p(A, p: int) -> list[list[int]]:
    """Basis of the right kernel of ``A`` over F_p."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    M = [[int(a) % p for a in row] for row in A]
    pivot_cols = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if M[i][c]), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [x * inv % p for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        pivot_cols.append(c)
        r += 1
        if r == rows:
            break
    basis = []
    for fc in (c for c in range(cols) if c not in pivot_cols):
        v = [0] * cols
        v[fc] = 1
        for i, pc in enumerate(pivot_cols):
            v[pc] = -M[i][fc] % p
        basis.append(v)
    return basis
