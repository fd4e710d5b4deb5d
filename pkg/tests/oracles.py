"""Independent reference implementations used only by the tests.

Nothing here imports the package's algorithms; each oracle recomputes its
quantity from definitions by brute force.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import sympy


def h(masses) -> float:
    return -sum(float(p) * math.log2(float(p)) for p in masses if p)


def mutual_information(joint: dict) -> float:
    """Float I(A;B) straight from the definition sum p log p/(pa pb)."""
    pa, pb = {}, {}
    for (a, b), p in joint.items():
        pa[a] = pa.get(a, 0) + p
        pb[b] = pb.get(b, 0) + p
    return sum(float(p) * math.log2(float(p / (pa[a] * pb[b]))) for (a, b), p in joint.items() if p)


def best_prefix_lengths(masses) -> tuple[Fraction, tuple[int, ...]]:
    """Minimum expected length over every length vector that satisfies Kraft (lengths <= n - 1)."""
    n = len(masses)
    if n == 1:
        return Fraction(0), (0,)
    best = None
    for lengths in itertools.product(range(1, n), repeat=n):
        if sum(Fraction(1, 2**l) for l in lengths) <= 1:
            e = sum(Fraction(p) * l for p, l in zip(masses, lengths))
            if best is None or e < best[0]:
                best = (e, lengths)
    return best


def glb_cumulative_min(dists) -> list[Fraction]:
    """Sorted partial sums, elementwise minimum, then differences."""
    n = max(len(d) for d in dists)
    sums = []
    for d in dists:
        s = sorted((Fraction(v) for v in d), reverse=True) + [Fraction(0)] * (n - len(d))
        sums.append(list(itertools.accumulate(s)))
    mins = [min(col) for col in zip(*sums)]
    return [mins[0]] + [b - a for a, b in zip(mins, mins[1:])]


def majorizes(p, q) -> bool:
    """True when ``q`` is majorized by ``p`` (all sorted partial sums of p dominate)."""
    n = max(len(p), len(q))
    ps = list(itertools.accumulate(sorted(list(map(Fraction, p)) + [0] * (n - len(p)), reverse=True)))
    qs = list(itertools.accumulate(sorted(list(map(Fraction, q)) + [0] * (n - len(q)), reverse=True)))
    return all(a >= b for a, b in zip(ps, qs))


# ---- Example 1 from first principles: bits, caches and XORs written out by hand ----

EX1_Y1 = {(0, 0): Fraction(1, 16), (1, 1): Fraction(1, 16), (1, 0): Fraction(7, 16), (0, 1): Fraction(7, 16)}
EX1_Y2 = {(0, 0): Fraction(1, 10), (1, 1): Fraction(1, 10), (1, 0): Fraction(2, 5), (0, 1): Fraction(2, 5)}


def ex1_message(bits1, bits2, d) -> int:
    """Two users, two files, one bit per subfile: user 1 holds first bits, user 2 second bits.

    Segment for the pair {1, 2}: (file d1, bit held by user 2) xor (file d2, bit held by user 1).
    """
    files = {1: bits1, 2: bits2}
    return files[d[0]][1] ^ files[d[1]][0]


def ex1_joint_xc(d) -> dict:
    """P(X, C) with X = 2*Y1^1 + Y2^1."""
    out = {}
    for b1, p1 in EX1_Y1.items():
        for b2, p2 in EX1_Y2.items():
            x = 2 * b1[0] + b2[0]
            c = ex1_message(b1, b2, d)
            out[(x, c)] = out.get((x, c), 0) + p1 * p2
    return out


# ---- exact LP oracle on sympy: basic feasible solutions of [A 0; p 1] z = [b; cap] ----


def _sym_entropy_bits(masses):
    return sum(-sympy.Rational(p) * sympy.log(sympy.Rational(p), 2) for p in masses if p)


def sympy_lp_bound(p_c, p_x_given_c) -> sympy.Expr:
    """H(C|X) + max sum p_c a over {A a = b, a >= 0, sum p_c a <= beta - H(C|X)} by enumerating all bases.

    Rows with no support in ``P_X`` are removed first.  Built only from the raw
    ``P_C`` and ``P_{X|C}``; uses sympy for ranks, solves and sign decisions.
    """
    p_c = [sympy.Rational(v) for v in p_c]
    P = sympy.Matrix([[sympy.Rational(v) for v in row] for row in p_x_given_c])
    t, q = P.shape
    p_x = [sum(P[i, j] * p_c[j] for j in range(q)) for i in range(t)]
    rows = [i for i in range(t) if p_x[i] != 0]
    cols = [j for j in range(q) if p_c[j] != 0]
    P = P.extract(rows, cols)
    p_c = [p_c[j] for j in cols]
    p_x = [p_x[i] for i in rows]
    t, q = P.shape
    # P(c|x) = P(x|c) P(c) / P(x)
    c_given_x = [[P[i, j] * p_c[j] / p_x[i] for j in range(q)] for i in range(t)]
    h_c_given_x_each = [_sym_entropy_bits(r) for r in c_given_x]
    h_c_given_x = sum(p_x[i] * h_c_given_x_each[i] for i in range(t))
    A = sympy.Matrix([[p_c[j] - c_given_x[i][j] for j in range(q)] for i in range(t)])
    b = [h_c_given_x_each[i] - h_c_given_x for i in range(t)]
    beta = sympy.log(q - P.rank() + 1, 2)
    cap = beta - h_c_given_x
    big = A.row_join(sympy.zeros(t, 1)).col_join(sympy.Matrix([p_c + [1]]))
    rhs = sympy.Matrix(b + [cap])
    n = q + 1
    r = big.rank()
    # keep a maximal set of independent rows, checking the dropped ones stay consistent
    keep = []
    for i in range(big.rows):
        if big.extract(keep + [i], list(range(n))).rank() > len(keep):
            keep.append(i)
    A_red, b_red = big.extract(keep, list(range(n))), rhs.extract(keep, [0])
    best = None
    for basis in itertools.combinations(range(n), r):
        B = A_red.extract(list(range(r)), list(basis))
        if B.det() == 0:
            continue
        xb = B.LUsolve(b_red)
        z = [0] * n
        for j, v in zip(basis, xb):
            z[j] = sympy.expand_log(v, force=True)
        if any(sympy.N(v, 60) < -sympy.Float(10) ** -50 for v in z):
            continue
        full = big * sympy.Matrix(z) - rhs
        if any(abs(sympy.N(v, 60)) > sympy.Float(10) ** -50 for v in full):
            continue
        obj = sum(p_c[j] * z[j] for j in range(q))
        if best is None or sympy.N(obj - best, 60) > 0:
            best = obj
    return sympy.expand_log(h_c_given_x + best, force=True)


def transport_vertices(rows, cols):
    """Vertices of the transportation polytope with the given marginals, via north-west corner on every ordering."""
    out = set()
    for ro in itertools.permutations(range(len(rows))):
        for co in itertools.permutations(range(len(cols))):
            r = [Fraction(rows[i]) for i in ro]
            c = [Fraction(cols[j]) for j in co]
            cells = {}
            i = j = 0
            while i < len(r) and j < len(c):
                m = min(r[i], c[j])
                if m:
                    cells[(ro[i], co[j])] = m
                r[i] -= m
                c[j] -= m
                if r[i] == 0:
                    i += 1
                else:
                    j += 1
            out.add(tuple(sorted(cells.items())))
    return out


def min_entropy_coupling(rows, cols) -> float:
    """Brute-force minimum joint entropy over couplings with the given marginals (concave, so a vertex)."""
    return min(h(m for _, m in v) for v in transport_vertices(rows, cols))
