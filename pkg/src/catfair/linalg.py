"""Small exact linear algebra over Fractions (right-hand sides may be LexCost)."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence


def solve_exact(rows: Sequence[Sequence], rhs: Sequence) -> Optional[list]:
    """Solve the square system ``rows @ x = rhs``; None if singular.

    ``rows`` holds rationals; ``rhs`` entries only need ``+``, ``-`` and
    multiplication by a Fraction, so LexCost works.
    """
    n = len(rows)
    a = [[Fraction(x) for x in r] for r in rows]
    b = list(rhs)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        b[col] = b[col] * inv
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                ar, ac = a[r], a[col]
                a[r] = [x - f * y for x, y in zip(ar, ac)]
                b[r] = b[r] - b[col] * f
    return b


def rank(rows: Sequence[Sequence]) -> int:
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return 0
    width = len(a[0])
    r = 0
    for col in range(width):
        piv = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, len(a)):
            if a[i][col] != 0:
                f = a[i][col] / a[r][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return r
