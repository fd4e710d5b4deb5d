"""Hypothesis strategies for exact distributions, kernels and joints."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from privcache.common_info import joint_from_direct
from privcache.prob import ConditionalKernel, FiniteDistribution, JointTable


@st.composite
def distributions(draw, min_size=1, max_size=6, denom=12, allow_zero=True):
    n = draw(st.integers(min_size, max_size))
    lo = 0 if allow_zero else 1
    w = draw(st.lists(st.integers(lo, denom), min_size=n, max_size=n).filter(lambda v: sum(v) > 0))
    total = sum(w)
    return FiniteDistribution(tuple(Fraction(v, total) for v in w))


@st.composite
def kernels(draw, max_rows=6, max_cols=4):
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    return ConditionalKernel.from_columns([draw(distributions(rows, rows)).masses for _ in range(cols)])


@st.composite
def joints(draw, max_a=4, max_b=4):
    a = draw(st.integers(1, max_a))
    b = draw(st.integers(1, max_b))
    d = draw(distributions(a * b, a * b, denom=8))
    return JointTable({(i // b, i % b): p for i, p in enumerate(d) if p}, (a, b))


@st.composite
def phat_joints(draw, max_q=6, max_t=3):
    """Joints of (X, C) where one coordinate determines the other on the support."""
    q = draw(st.integers(1, max_q))
    p_c = draw(distributions(q, q, allow_zero=False))
    if draw(st.booleans()):
        t = draw(st.integers(1, min(max_t, q)))
        labels = draw(st.lists(st.integers(0, t - 1), min_size=q, max_size=q))
        rows = [[1 if labels[c] == x else 0 for c in range(q)] for x in range(t)]
        return joint_from_direct(p_c.masses, rows)
    # C a function of X: every x maps to one c; masses of x sharing a c split randomly
    t = draw(st.integers(1, max_t))
    target = draw(st.lists(st.integers(0, q - 1), min_size=t, max_size=t))
    entries = {}
    for c in range(q):
        owners = [x for x in range(t) if target[x] == c]
        if not owners:
            entries[(0, c)] = None
            continue
        split = draw(distributions(len(owners), len(owners), allow_zero=False))
        for x, s in zip(owners, split):
            entries[(x, c)] = p_c[c] * s
    # columns with no owner: fold their mass into an owned column to keep C = g(X)
    free = sum((p_c[c] for (x, c), v in entries.items() if v is None), Fraction(0))
    clean = {k: v for k, v in entries.items() if v is not None}
    first = next(iter(clean))
    clean[first] += free
    return JointTable(clean, (t, q))


@st.composite
def direct_scenarios(draw):
    """A direct scenario over an arbitrary small joint of (X, C) with X fully supported."""
    from privcache.scheme import DirectLayer, Scenario

    j = draw(joints(max_a=3, max_b=4))
    t, q = j.shape
    if len(j.marginal_masses(0)) != t:
        # give every x some mass so |X| matches the support
        extra = {(x, 0): Fraction(1, 8) for x in range(t) if x not in j.marginal_masses(0)}
        entries = {k: v * (1 - Fraction(len(extra), 8)) for k, v in j.entries.items()}
        entries.update(extra)
        j = JointTable(entries, (t, q))
    return Scenario("random-direct", t, t, j, DirectLayer(q))


@st.composite
def caching_scenarios(draw):
    """Two users, two two-bit files, half-size caches; X is a function of the files' bits."""
    from privcache.caching import make_params
    from privcache.scheme import CachingLayer, Scenario

    params = make_params(2, 2, 2, 1)
    y = draw(distributions(16, 16, denom=6))
    bits = draw(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=2, unique=True))
    x_size = 1 << len(bits)

    def x_of(files):
        v = 0
        for n, b in bits:
            v = 2 * v + ((files[n] >> (1 - b)) & 1)
        return v

    entries = {}
    for i, p in enumerate(y):
        if p:
            files = (i // 4, i % 4)
            entries[(x_of(files), files)] = p
    return Scenario("random-caching", x_size, x_size, JointTable(entries, (x_size, (4, 4))), CachingLayer(params))
