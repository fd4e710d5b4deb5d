"""Exact discrete probability: distributions, joint tables, kernels, entropy.

Masses are :class:`fractions.Fraction` throughout.  Information quantities
are returned as floats computed from the exact masses, except where an exact
zero can be certified (independence is decided on the rationals).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import ValidationError


def parse_rational(value) -> Fraction:
    """Parse ``"a/b"``, a decimal string, an int or a Fraction exactly.

    Floats are converted through their shortest repr, so ``0.6`` becomes
    ``3/5`` rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"not a probability: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse rational {value!r}") from exc
    raise ValidationError(f"cannot parse rational {value!r}")


def _plogp(p: Fraction) -> float:
    if p == 0:
        return 0.0
    x = float(p)
    return -x * math.log2(x)


@dataclass(frozen=True)
class FiniteDistribution:
    """Probability masses over the alphabet ``0 .. len(masses)-1``.

    Zero-mass symbols are kept, so ``len(d)`` is the declared alphabet size.
    """

    masses: tuple[Fraction, ...]

    def __post_init__(self):
        masses = tuple(parse_rational(m) for m in self.masses)
        if not masses:
            raise ValidationError("empty distribution")
        for i, m in enumerate(masses):
            if m < 0 or m > 1:
                raise ValidationError(f"mass {m} at index {i} outside [0, 1]")
        total = sum(masses)
        if total != 1:
            raise ValidationError(f"masses sum to {total}, not 1")
        object.__setattr__(self, "masses", masses)

    @classmethod
    def of(cls, *masses) -> "FiniteDistribution":
        return cls(tuple(masses))

    @classmethod
    def point(cls, index: int, size: int) -> "FiniteDistribution":
        return cls(tuple(Fraction(int(i == index)) for i in range(size)))

    @classmethod
    def uniform(cls, size: int) -> "FiniteDistribution":
        return cls((Fraction(1, size),) * size)

    def __len__(self):
        return len(self.masses)

    def __getitem__(self, i):
        return self.masses[i]

    def __iter__(self):
        return iter(self.masses)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.masses) if m)

    def order(self) -> list[int]:
        """Indices sorted by decreasing mass; ties keep original order."""
        return sorted(range(len(self.masses)), key=lambda i: (-self.masses[i], i))

    def sorted_desc(self) -> tuple[Fraction, ...]:
        return tuple(self.masses[i] for i in self.order())

    def prune(self) -> "FiniteDistribution":
        return FiniteDistribution(tuple(m for m in self.masses if m))

    def padded(self, size: int) -> "FiniteDistribution":
        if size < len(self):
            raise ValidationError("cannot pad to a smaller alphabet")
        return FiniteDistribution(self.masses + (Fraction(0),) * (size - len(self)))

    def entropy(self) -> float:
        return entropy(self)

    def to_json(self) -> list[str]:
        return [str(m) for m in self.masses]


def entropy(d: FiniteDistribution | Iterable) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    masses = d.masses if isinstance(d, FiniteDistribution) else [parse_rational(m) for m in d]
    return max(0.0, math.fsum(_plogp(p) for p in masses))


def binary_entropy(p) -> float:
    p = parse_rational(p)
    return entropy([p, 1 - p])


@dataclass(frozen=True)
class ConditionalKernel:
    """A column-stochastic matrix: one distribution over rows per conditioning symbol.

    ``labels`` names the conditioning symbols (defaults to ``0..n-1``); it lets
    a kernel built from the support of ``X`` remember which ``x`` each column
    belongs to.
    """

    columns: tuple[FiniteDistribution, ...]
    labels: tuple[Hashable, ...] = ()

    def __post_init__(self):
        cols = tuple(c if isinstance(c, FiniteDistribution) else FiniteDistribution(tuple(c)) for c in self.columns)
        if not cols:
            raise ValidationError("kernel has no columns")
        rows = len(cols[0])
        if any(len(c) != rows for c in cols):
            raise ValidationError("kernel columns have different lengths")
        labels = tuple(self.labels) or tuple(range(len(cols)))
        if len(labels) != len(cols) or len(set(labels)) != len(labels):
            raise ValidationError("kernel labels must be unique, one per column")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], labels: Sequence = ()) -> "ConditionalKernel":
        return cls(tuple(FiniteDistribution(tuple(c)) for c in columns), tuple(labels))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], labels: Sequence = ()) -> "ConditionalKernel":
        """Build from a row-major matrix whose columns are the distributions."""
        return cls.from_columns(list(zip(*rows)), labels)

    @property
    def n_rows(self) -> int:
        return len(self.columns[0])

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    def column(self, label) -> FiniteDistribution:
        return self.columns[self.labels.index(label)]

    def as_rows(self) -> list[list[Fraction]]:
        return [[c[r] for c in self.columns] for r in range(self.n_rows)]


@dataclass(frozen=True)
class JointTable:
    """A joint pmf of two coordinates stored sparsely.

    ``entries`` maps ``(a, b)`` to a positive mass.  ``shape`` declares the
    alphabet of each coordinate: an int ``n`` means keys ``0..n-1``; a tuple
    of ints means keys are tuples whose i-th entry lies in ``0..shape[i]-1``.
    Absent keys have zero mass.
    """

    entries: Mapping[tuple, Fraction]
    shape: tuple = field(default=())

    def __post_init__(self):
        clean: dict[tuple, Fraction] = {}
        for key, p in dict(self.entries).items():
            p = parse_rational(p)
            if p < 0:
                raise ValidationError(f"negative mass at {key}")
            if len(key) != 2:
                raise ValidationError(f"joint key {key!r} must have two coordinates")
            if p:
                clean[key] = clean.get(key, Fraction(0)) + p
        total = sum(clean.values(), Fraction(0))
        if total != 1:
            raise ValidationError(f"joint masses sum to {total}, not 1")
        shape = tuple(self.shape)
        if not shape:
            shape = tuple(max(k[i] for k in clean) + 1 for i in range(2))
        for key in clean:
            for coord, size in zip(key, shape):
                if not _in_alphabet(coord, size):
                    raise ValidationError(f"index {coord!r} outside declared alphabet {size!r}")
        object.__setattr__(self, "entries", dict(sorted(clean.items())))
        object.__setattr__(self, "shape", shape)

    @classmethod
    def product(cls, a: FiniteDistribution, b: FiniteDistribution) -> "JointTable":
        return cls({(i, j): pa * pb for i, pa in enumerate(a) for j, pb in enumerate(b)}, (len(a), len(b)))

    @classmethod
    def from_kernel(cls, marginal: FiniteDistribution, kernel: ConditionalKernel) -> "JointTable":
        """Joint of ``(X, Y)`` from ``P_X`` and ``P_{Y|X}``; kernel labels index ``marginal``."""
        entries = {}
        for x, col in zip(kernel.labels, kernel.columns):
            for y, p in enumerate(col):
                if marginal[x] and p:
                    entries[(x, y)] = marginal[x] * p
        return cls(entries, (len(marginal), kernel.n_rows))

    def alphabet_size(self, axis: int) -> int:
        size = self.shape[axis]
        return math.prod(size) if isinstance(size, tuple) else size

    def marginal_masses(self, axis: int) -> dict:
        out: dict = defaultdict(Fraction)
        for key, p in self.entries.items():
            out[key[axis]] += p
        return dict(out)

    def marginal(self, axis: int) -> FiniteDistribution:
        """Marginal over an integer-indexed coordinate as a dense distribution."""
        size = self.shape[axis]
        if not isinstance(size, int):
            raise ValidationError("dense marginal needs an integer alphabet")
        m = self.marginal_masses(axis)
        return FiniteDistribution(tuple(m.get(i, Fraction(0)) for i in range(size)))

    def swap(self) -> "JointTable":
        return JointTable({(b, a): p for (a, b), p in self.entries.items()}, self.shape[::-1])

    def kernel(self, given: int = 0) -> ConditionalKernel:
        """``P_{other|given}`` over the support of the conditioning coordinate."""
        other = 1 - given
        if not isinstance(self.shape[other], int):
            raise ValidationError("kernel rows need an integer alphabet")
        cond = self.marginal_masses(given)
        labels = sorted(cond)
        cols = {g: [Fraction(0)] * self.shape[other] for g in labels}
        for key, p in self.entries.items():
            cols[key[given]][key[other]] += p / cond[key[given]]
        return ConditionalKernel(tuple(FiniteDistribution(tuple(cols[g])) for g in labels), tuple(labels))

    def is_product(self) -> bool:
        """Exact test that the table equals the product of its marginals."""
        ma = self.marginal_masses(0)
        mb = self.marginal_masses(1)
        if len(self.entries) != len(ma) * len(mb):
            return False
        return all(self.entries.get((a, b), 0) == pa * pb for a, pa in ma.items() for b, pb in mb.items())


def _in_alphabet(coord, size) -> bool:
    if isinstance(size, int):
        return isinstance(coord, int) and 0 <= coord < size
    return (
        isinstance(coord, tuple)
        and len(coord) == len(size)
        and all(isinstance(c, int) and 0 <= c < s for c, s in zip(coord, size))
    )


def joint_entropy(j: JointTable) -> float:
    return entropy(j.entries.values())


def mutual_information(j: JointTable) -> float:
    """``I(A;B)`` in bits; exactly ``0.0`` when the table factorizes."""
    if j.is_product():
        return 0.0
    ha = entropy(j.marginal_masses(0).values())
    hb = entropy(j.marginal_masses(1).values())
    return max(0.0, ha + hb - joint_entropy(j))


def conditional_entropy(j: JointTable, given: int = 0) -> float:
    """Entropy of the other coordinate given coordinate ``given``.

    With the default, a table over ``(X, C)`` yields ``H(C|X)``.
    """
    return max(0.0, joint_entropy(j) - entropy(j.marginal_masses(given).values()))


def push_forward(j: JointTable, f: Callable | Mapping, size=None) -> JointTable:
    """Apply a deterministic map to the second coordinate and sum preimages.

    ``f`` may be a callable or a mapping; a missing key (or ``None``) on a
    reachable value raises :class:`ValidationError`.  ``size`` declares the
    output alphabet and defaults to the input's.
    """
    lookup = f.get if isinstance(f, Mapping) else f
    out: dict = defaultdict(Fraction)
    for (a, b), p in j.entries.items():
        try:
            image = lookup(b)
        except (KeyError, IndexError) as exc:
            raise ValidationError(f"map undefined on reachable value {b!r}") from exc
        if image is None:
            raise ValidationError(f"map undefined on reachable value {b!r}")
        out[(a, image)] += p
    return JointTable(dict(out), (j.shape[0], size if size is not None else j.shape[1]))


def prune(j: JointTable) -> JointTable:
    """Relabel both coordinates onto their supports (sorted order)."""
    ma = sorted(j.marginal_masses(0))
    mb = sorted(j.marginal_masses(1))
    ia = {a: i for i, a in enumerate(ma)}
    ib = {b: i for i, b in enumerate(mb)}
    return JointTable({(ia[a], ib[b]): p for (a, b), p in j.entries.items()}, (len(ma), len(mb)))


def partial_sums(masses: Sequence[Fraction]) -> list[Fraction]:
    out, acc = [], Fraction(0)
    for m in masses:
        acc += m
        out.append(acc)
    return out


def is_majorized_by(q: FiniteDistribution, p: FiniteDistribution) -> bool:
    """``q ≺ p``: every partial sum of sorted ``q`` is at most that of sorted ``p``."""
    n = max(len(q), len(p))
    sq = partial_sums(q.padded(n).sorted_desc())
    sp = partial_sums(p.padded(n).sorted_desc())
    return all(a <= b for a, b in zip(sq, sp))


def majorization_glb(ds: Sequence[FiniteDistribution]) -> FiniteDistribution:
    """Greatest lower bound in the majorization order.

    Partial sums of the result are the pointwise minimum of the inputs'
    sorted partial sums; the minimum of concave sequences is concave, so the
    differences come out non-increasing without any repair step.
    """
    if not ds:
        raise ValidationError("need at least one distribution")
    n = max(len(d) for d in ds)
    sums = [partial_sums(d.padded(n).sorted_desc()) for d in ds]
    lower = [min(s[k] for s in sums) for k in range(n)]
    return FiniteDistribution(tuple(b - a for a, b in zip([Fraction(0)] + lower[:-1], lower)))
