"""Zero-leakage disclosure machinery for a joint pmf of ``(X, C)``.

Everything here works on the supports of ``X`` and ``C`` (zero-mass symbols
have no conditional law).  The feasible set of disclosure columns is the
polytope ``{p >= 0 : P_{X|C} p = P_X}``; a variable ``U`` with ``U - C - X``
and ``I(U;X) = 0`` is a convex decomposition of ``P_C`` into points of that
polytope.  Mutual information ``I(C;U) = H(C) - sum_u w_u H(p_u)`` is linear
in the weights, so the best disclosure ``g0`` is a linear program over the
polytope's vertices; the minimum entropy of an optimal ``U`` is a concave
minimization over the optimal face, attained at one of its vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import NamedTuple

from .errors import NotApplicable, SizeLimit, ValidationError
from .linalg import basic_feasible_solutions, dot, lp_maximize, rank
from .logexact import LogRational, exact_entropy
from .prob import FiniteDistribution, JointTable

POLYTOPE_GUARD = 16
K_SEARCH_GUARD = 10**6


@dataclass(frozen=True)
class SupportView:
    """``(X, C)`` restricted to their supports, with exact conditionals."""

    x_labels: tuple
    c_labels: tuple
    p_x: tuple[Fraction, ...]
    p_c: tuple[Fraction, ...]
    joint: tuple[tuple[Fraction, ...], ...]  # joint[i][j] = P(x_i, c_j)

    @classmethod
    def of(cls, j: JointTable) -> "SupportView":
        mx = j.marginal_masses(0)
        mc = j.marginal_masses(1)
        xs = tuple(sorted(mx))
        cs = tuple(sorted(mc))
        rows = tuple(tuple(j.entries.get((x, c), Fraction(0)) for c in cs) for x in xs)
        return cls(xs, cs, tuple(mx[x] for x in xs), tuple(mc[c] for c in cs), rows)

    @property
    def t(self) -> int:
        return len(self.x_labels)

    @property
    def q(self) -> int:
        return len(self.c_labels)

    def x_given_c(self) -> list[list[Fraction]]:
        return [[self.joint[i][j] / self.p_c[j] for j in range(self.q)] for i in range(self.t)]

    def c_given_x(self, i: int) -> list[Fraction]:
        return [self.joint[i][j] / self.p_x[i] for j in range(self.q)]

    def h_c_given_x(self) -> LogRational:
        return exact_entropy(v for row in self.joint for v in row) - exact_entropy(self.p_x)


class Membership(NamedTuple):
    member: bool | None  # True when certified, None when unknown
    reason: str


def membership_phat(j: JointTable) -> Membership:
    """Certify ``g0 = h0`` through the two deterministic-function sufficient conditions."""
    sv = SupportView.of(j)
    x_of_c = all(sum(1 for i in range(sv.t) if sv.joint[i][c]) == 1 for c in range(sv.q))
    if x_of_c:
        return Membership(True, "X is a deterministic function of C on the support")
    c_of_x = all(sum(1 for c in range(sv.q) if sv.joint[i][c]) == 1 for i in range(sv.t))
    if c_of_x:
        return Membership(True, "C is a deterministic function of X on the support")
    return Membership(None, "neither variable determines the other; membership not certified")


@dataclass(frozen=True)
class PrivacyPolytope:
    support: SupportView
    vertices: tuple[tuple[Fraction, ...], ...]

    @property
    def dimension(self) -> int:
        return self.support.q


def enumerate_polytope(j: JointTable, guard: int = POLYTOPE_GUARD) -> PrivacyPolytope:
    """All vertices of ``{p >= 0 : P_{X|C} p = P_X, sum p = 1}``, in enumeration order."""
    sv = SupportView.of(j)
    if sv.q > guard:
        raise SizeLimit(f"|C| support of {sv.q} exceeds the polytope guard {guard}")
    A = sv.x_given_c() + [[Fraction(1)] * sv.q]
    b = list(sv.p_x) + [Fraction(1)]
    seen: dict = {}
    for _, v in basic_feasible_solutions(A, b):
        seen.setdefault(v, None)
    return PrivacyPolytope(sv, tuple(seen))


@dataclass(frozen=True)
class Decomposition:
    """Weights and disclosure columns (over the support of ``C``) mixing to ``P_C``."""

    weights: tuple[Fraction, ...]
    columns: tuple[tuple[Fraction, ...], ...]
    c_labels: tuple = ()

    def __post_init__(self):
        if sum(self.weights, Fraction(0)) != 1 or any(w < 0 for w in self.weights):
            raise ValidationError("decomposition weights must be a distribution")
        for col in self.columns:
            if sum(col, Fraction(0)) != 1 or any(v < 0 for v in col):
                raise ValidationError("decomposition columns must be distributions")

    def mixture(self) -> tuple[Fraction, ...]:
        q = len(self.columns[0])
        return tuple(sum((w * col[c] for w, col in zip(self.weights, self.columns)), Fraction(0)) for c in range(q))

    def entropy(self) -> LogRational:
        return exact_entropy(self.weights)

    def to_json(self) -> dict:
        return {
            "c_labels": list(self.c_labels),
            "weights": [str(w) for w in self.weights],
            "columns": [[str(v) for v in col] for col in self.columns],
        }


def _decomposition(vertices, w, c_labels) -> Decomposition:
    pairs = [(wi, v) for wi, v in zip(w, vertices) if wi]
    return Decomposition(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), tuple(c_labels))


def _vertex_system(poly: PrivacyPolytope):
    sv = poly.support
    V = [[v[c] for v in poly.vertices] for c in range(sv.q)]
    return V, list(sv.p_c)


@dataclass(frozen=True)
class G0Result:
    value: LogRational
    decomposition: Decomposition
    optimal_weights: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    polytope: PrivacyPolytope = field(repr=False)

    def __float__(self):
        return float(self.value)


def solve_g0(j: JointTable, polytope: PrivacyPolytope | None = None, guard: int = K_SEARCH_GUARD) -> G0Result:
    """Largest ``I(C;U)`` under ``U - C - X`` and ``I(U;X) = 0``, exactly.

    The objective ``H(C) - sum_v w_v H(v)`` is maximized over weights on the
    polytope vertices that mix to ``P_C``; every optimal vertex of that
    weight system is returned so callers can search the optimal face.
    """
    poly = polytope or enumerate_polytope(j)
    V, b = _vertex_system(poly)
    cost = [-exact_entropy(v) for v in poly.vertices]
    res = lp_maximize(V, b, cost, guard=guard)
    if res.status != "optimal":
        raise NotApplicable(f"no zero-leakage decomposition of P_C exists ({res.status})")
    value = exact_entropy(poly.support.p_c) + res.value
    return G0Result(value, _decomposition(poly.vertices, res.x, poly.support.c_labels), tuple(res.optima), poly)


@dataclass(frozen=True)
class KResult:
    value: LogRational
    decomposition: Decomposition
    exact: bool  # False when the search stopped at the guard (value is then an upper bound)
    g0: G0Result = field(repr=False)

    def __float__(self):
        return float(self.value)


def k_min_entropy(j: JointTable, guard: int = K_SEARCH_GUARD) -> KResult:
    """Smallest ``H(U)`` among ``g0``-optimal zero-leakage decompositions.

    ``H(w)`` is concave in the weights, so its minimum over the optimal face
    is attained at a vertex of the weight system; those vertices are exactly
    the optimal basic solutions collected by :func:`solve_g0`.  If the weight
    system has more candidate bases than ``guard`` the search is truncated
    and the result is flagged as an upper bound.
    """
    member = membership_phat(j)
    if not member.member:
        raise NotApplicable(member.reason)
    poly = enumerate_polytope(j)
    V, _ = _vertex_system(poly)
    n_bases = comb(len(poly.vertices), rank(V))
    exact = n_bases <= guard
    if exact:
        g0 = solve_g0(j, poly, guard=guard)
        candidates = g0.optimal_weights
    else:
        g0 = None
        candidates = _truncated_optima(poly, guard)
    best_w, best_h = None, None
    for w in candidates:
        h = exact_entropy(w)
        if best_h is None or h < best_h:
            best_w, best_h = w, h
    decomposition = _decomposition(poly.vertices, best_w, poly.support.c_labels)
    if g0 is None:
        g0 = G0Result(exact_entropy(poly.support.p_c) - _avg_vertex_entropy(poly, best_w), decomposition, (best_w,), poly)
    return KResult(best_h, decomposition, exact, g0)


def _avg_vertex_entropy(poly, w) -> LogRational:
    return dot([exact_entropy(v) for v in poly.vertices], w)


def _truncated_optima(poly: PrivacyPolytope, guard: int):
    V, b = _vertex_system(poly)
    cost = [-exact_entropy(v) for v in poly.vertices]
    best, optima = None, []
    for _, w in basic_feasible_solutions(V, b, limit=guard):
        v = dot(cost, w)
        if best is None or v > best:
            best, optima = v, [w]
        elif v == best and w not in optima:
            optima.append(w)
    if best is None:
        raise NotApplicable("no decomposition found within the search guard")
    return optima


class OptimizerCheck(NamedTuple):
    functional: bool  # H(C|U,X) = 0
    markov: bool  # I(X;U|C) = 0
    independent: bool  # I(X;U) = 0


def verify_optimizer(j: JointTable, d: Decomposition) -> OptimizerCheck:
    """Exact checks of the three optimizer conditions on the law induced by ``d``.

    ``P(u, c, x) = w_u * p_u(c) * P(x|c)``; columns are indexed like the
    support of ``C`` (``d.c_labels`` must match it when given).
    """
    sv = SupportView.of(j)
    if d.c_labels and tuple(d.c_labels) != sv.c_labels:
        raise ValidationError("decomposition columns do not match the support of C")
    if tuple(d.mixture()) != sv.p_c:
        return OptimizerCheck(False, False, False)
    pxc = sv.x_given_c()
    law = {}
    for u, (w, col) in enumerate(zip(d.weights, d.columns)):
        for c in range(sv.q):
            for i in range(sv.t):
                m = w * col[c] * pxc[i][c]
                if m:
                    law[(u, c, i)] = m
    functional = True
    seen: dict = {}
    for (u, c, i) in law:
        if seen.setdefault((u, i), c) != c:
            functional = False
    # U - C - X holds by construction; recompute it from the joint anyway
    markov = True
    for c in range(sv.q):
        pc = sv.p_c[c]
        for u in range(len(d.weights)):
            puc = sum((law.get((u, c, i), Fraction(0)) for i in range(sv.t)), Fraction(0))
            for i in range(sv.t):
                if law.get((u, c, i), Fraction(0)) * pc != puc * sv.joint[i][c]:
                    markov = False
    independent = True
    for u, w in enumerate(d.weights):
        for i in range(sv.t):
            pux = sum((law.get((u, c, i), Fraction(0)) for c in range(sv.q)), Fraction(0))
            if pux != w * sv.p_x[i]:
                independent = False
    return OptimizerCheck(functional, markov, independent)


@dataclass(frozen=True)
class AxyBxy:
    A: tuple[tuple[Fraction, ...], ...]
    b: tuple[LogRational, ...]
    support: SupportView


def build_axy_bxy(j: JointTable) -> AxyBxy:
    """Rows ``P_C - P_{C|x}`` and entries ``H(C|x) - H(C|X)`` for every ``x`` in the support."""
    sv = SupportView.of(j)
    h = sv.h_c_given_x()
    A, b = [], []
    for i in range(sv.t):
        col = sv.c_given_x(i)
        A.append(tuple(pc - p for pc, p in zip(sv.p_c, col)))
        b.append(exact_entropy(col) - h)
    return AxyBxy(tuple(A), tuple(b), sv)


def joint_from_direct(p_c, p_x_given_c) -> JointTable:
    """Joint of ``(X, C)`` from ``P_C`` and the ``|X| x |C|`` matrix ``P_{X|C}``."""
    p_c = FiniteDistribution(tuple(p_c))
    rows = [[Fraction(v) for v in row] for row in p_x_given_c]
    if any(len(r) != len(p_c) for r in rows):
        raise ValidationError("P_{X|C} must have one column per symbol of C")
    for c in range(len(p_c)):
        if sum(r[c] for r in rows) != 1:
            raise ValidationError(f"column {c} of P_(X|C) does not sum to one")
    entries = {(x, c): rows[x][c] * p_c[c] for x in range(len(rows)) for c in range(len(p_c)) if rows[x][c] and p_c[c]}
    return JointTable(entries, (len(rows), len(p_c)))
