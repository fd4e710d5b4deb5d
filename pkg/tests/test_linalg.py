from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from privcache.errors import SizeLimit
from privcache.linalg import basic_feasible_solutions, lp_maximize, nullity, rank, row_reduce, solve_square
from privcache.logexact import LogRational

F = Fraction
small = st.integers(-3, 3)


@st.composite
def matrices(draw, max_m=3, max_n=5):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    return [[F(draw(small)) for _ in range(n)] for _ in range(m)]


@given(matrices())
def test_rank_matches_sympy(A):
    assert rank(A) == sympy.Matrix(A).rank()
    assert nullity(A) == len(A[0]) - sympy.Matrix(A).rank()


def test_row_reduce_tracks_rhs():
    R, r, piv = row_reduce([[2, 4], [1, 3]], [F(2), F(2)])
    assert piv == [0, 1]
    assert r == [F(-1), F(1)]


def test_solve_square_singular():
    assert solve_square([[1, 2], [2, 4]], [1, 2]) is None


def test_bfs_of_simplex():
    pts = {x for _, x in basic_feasible_solutions([[1, 1, 1]], [F(1)])}
    assert pts == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}


def test_bfs_redundant_rows():
    A = [[1, 1, 0], [2, 2, 0], [0, 0, 1]]
    pts = {x for _, x in basic_feasible_solutions(A, [F(1), F(2), F(1)])}
    assert pts == {(1, 0, 1), (0, 1, 1)}
    assert list(basic_feasible_solutions(A, [F(1), F(3), F(1)])) == []


def test_bfs_guard():
    with pytest.raises(SizeLimit):
        list(basic_feasible_solutions([[1] * 30], [F(1)], guard=10))


def test_lp_statuses():
    assert lp_maximize([[1, 1]], [F(1)], [F(1), F(2)]).value == 2
    assert lp_maximize([[1, -1]], [F(0)], [F(1), F(0)]).status == "unbounded"
    assert lp_maximize([[1, 1]], [F(-1)], [F(1), F(1)]).status == "infeasible"


def test_lp_ties_report_all_optima():
    res = lp_maximize([[1, 1, 1]], [F(1)], [F(1), F(1), F(0)])
    assert res.value == 1
    assert sorted(res.optima) == [(0, 1, 0), (1, 0, 0)]


def test_lp_with_log_rhs():
    # maximize a1 subject to a1 + a2 = log2(3), a >= 0
    res = lp_maximize([[1, 1]], [LogRational.log2(3)], [F(1), F(0)])
    assert res.value == LogRational.log2(3)


@settings(max_examples=150)
@given(
    st.integers(1, 3).flatmap(
        lambda m: st.tuples(
            st.just(m),
            st.integers(m, 5).flatmap(
                lambda n: st.tuples(
                    st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m),
                    st.lists(st.integers(0, 4), min_size=m, max_size=m),
                    st.lists(small, min_size=n, max_size=n),
                )
            ),
        )
    )
)
def test_lp_matches_scipy(case):
    _, (A, b, c) = case
    res = lp_maximize(A, [F(v) for v in b], [F(v) for v in c])
    ref = linprog(-np.array(c, float), A_eq=np.array(A, float), b_eq=np.array(b, float), bounds=(0, None), method="highs")
    if ref.status == 2:
        assert res.status == "infeasible"
    elif ref.status == 3:
        assert res.status == "unbounded"
    else:
        assert res.status == "optimal"
        assert float(res.value) == pytest.approx(-ref.fun, abs=1e-7)
