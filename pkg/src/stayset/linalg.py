"""Exact Gaussian elimination over the rationals."""
from __future__ import annotations

from fractions import Fraction


class SingularSystemError(ArithmeticError):
    pass


def solve(a: list, b: list) -> list:
    """Solve ``a x = b`` exactly.

    ``a`` is a list of sparse rows (``dict`` column -> coefficient).  The pivot
    for column k is the lowest-indexed remaining row with a nonzero entry;
    with exact arithmetic any nonzero pivot is as good as another.
    """
    n = len(b)
    rows = [dict(r) for r in a]
    rhs = list(b)
    order = []  # pivot row per column
    used = [False] * n
    for k in range(n):
        piv = next((i for i in range(n) if not used[i] and rows[i].get(k, 0) != 0), None)
        if piv is None:
            raise SingularSystemError(f"no pivot in column {k}")
        used[piv] = True
        order.append(piv)
        prow = rows[piv]
        inv = 1 / Fraction(prow[k])
        for c in prow:
            prow[c] *= inv
        rhs[piv] *= inv
        for i in range(n):
            if i == piv:
                continue
            f = rows[i].get(k, 0)
            if f == 0:
                continue
            ri = rows[i]
            for c, v in prow.items():
                nv = ri.get(c, 0) - f * v
                if nv == 0:
                    ri.pop(c, None)
                else:
                    ri[c] = nv
            rhs[i] -= f * rhs[piv]
    return [rhs[order[k]] for k in range(n)]
