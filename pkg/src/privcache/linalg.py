"""Exact linear algebra and linear programming by basis enumeration.

Constraint matrices are rational.  Right-hand sides and objective
coefficients may be any values that support ``+``, ``-``, multiplication by
a Fraction, and ordered comparison with ``0``; in practice Fractions and
:class:`~privcache.logexact.LogRational`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, islice
from math import comb
from typing import Iterator, Sequence

from .errors import SizeLimit


def _matrix(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in rows]


def row_reduce(rows: Sequence[Sequence], rhs: Sequence | None = None):
    """Reduced row echelon form.

    Returns ``(R, r, pivots)`` where ``R`` is the reduced matrix, ``r`` the
    transformed right-hand side (or ``None``) and ``pivots`` the pivot
    columns in order.
    """
    R = _matrix(rows)
    r = list(rhs) if rhs is not None else None
    m = len(R)
    n = len(R[0]) if m else 0
    pivots: list[int] = []
    row = 0
    for col in range(n):
        pivot = next((i for i in range(row, m) if R[i][col] != 0), None)
        if pivot is None:
            continue
        R[row], R[pivot] = R[pivot], R[row]
        if r is not None:
            r[row], r[pivot] = r[pivot], r[row]
        inv = 1 / R[row][col]
        R[row] = [v * inv for v in R[row]]
        if r is not None:
            r[row] = r[row] * inv
        for i in range(m):
            if i != row and R[i][col] != 0:
                f = R[i][col]
                R[i] = [a - f * b for a, b in zip(R[i], R[row])]
                if r is not None:
                    r[i] = r[i] - r[row] * f
        pivots.append(col)
        row += 1
        if row == m:
            break
    return R, r, pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows or not rows[0]:
        return 0
    return len(row_reduce(rows)[2])


def candidate_bases(A: Sequence[Sequence]) -> int:
    """Number of column subsets :func:`basic_feasible_solutions` would try."""
    return comb(len(A[0]), rank(A)) if A and A[0] else 1


def nullity(rows: Sequence[Sequence]) -> int:
    """Dimension of the right null space (columns minus rank)."""
    return len(rows[0]) - rank(rows)


def solve_square(rows: Sequence[Sequence], rhs: Sequence):
    """Solve a square system exactly; ``None`` if it is singular."""
    R, r, pivots = row_reduce(rows, rhs)
    if len(pivots) < len(rows):
        return None
    return r


def basic_feasible_solutions(
    A: Sequence[Sequence], b: Sequence, guard: int | None = None, limit: int | None = None
) -> Iterator[tuple[tuple[int, ...], tuple]]:
    """Yield ``(basis, x)`` for every basic feasible solution of ``A x = b, x >= 0``.

    Redundant equality rows are dropped after checking they are consistent.
    The same point may be produced by several bases when it is degenerate;
    callers dedupe.  ``guard`` raises :class:`SizeLimit` when the number of
    candidate bases exceeds it; ``limit`` silently stops after that many.
    """
    n = len(A[0]) if A else 0
    R, r, pivots = row_reduce(A, b) if A else ([], [], [])
    k = len(pivots)
    for i in range(k, len(R)):
        if not r[i] == 0:
            return
    if guard is not None and comb(n, k) > guard:
        raise SizeLimit(f"{comb(n, k)} candidate bases exceed the guard of {guard}")
    A_red = R[:k]
    b_red = r[:k]
    zero = Fraction(0)
    for basis in islice(combinations(range(n), k), limit):
        sub = [[row[j] for j in basis] for row in A_red]
        xb = solve_square(sub, b_red) if k else []
        if xb is None:
            continue
        if any(v < 0 for v in xb):
            continue
        x = [zero] * n
        for j, v in zip(basis, xb):
            x[j] = v
        yield basis, tuple(x)


def dot(c: Sequence, x: Sequence):
    total = Fraction(0)
    for ci, xi in zip(c, x):
        if xi != 0 and ci != 0:
            total = total + ci * xi
    return total


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: object = None
    x: tuple | None = None
    optima: list[tuple] = field(default_factory=list)
    bases_examined: int = 0


def lp_maximize(A: Sequence[Sequence], b: Sequence, c: Sequence, guard: int | None = None) -> LPResult:
    """Maximize ``c.x`` subject to ``A x = b, x >= 0`` by enumerating vertices.

    All optimal vertices are returned in ``optima`` (ties are decided exactly).
    Unboundedness is detected by a second enumeration over the recession cone
    normalized by ``sum(d) = 1``.
    """
    n = len(c)
    best = None
    optima: list[tuple] = []
    seen = set()
    examined = 0
    for _, x in basic_feasible_solutions(A, b, guard):
        examined += 1
        if x in seen:
            continue
        seen.add(x)
        v = dot(c, x)
        if best is None or v > best:
            best, optima = v, [x]
        elif v == best:
            optima.append(x)
    if best is None:
        return LPResult("infeasible", bases_examined=examined)
    cone_A = [list(row) for row in A] + [[1] * n]
    cone_b = [0] * len(A) + [1]
    for _, d in basic_feasible_solutions(cone_A, cone_b, guard):
        if dot(c, d) > 0:
            return LPResult("unbounded", bases_examined=examined)
    return LPResult("optimal", best, optima[0], optima, examined)
