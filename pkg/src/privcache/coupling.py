"""Greedy minimum-entropy coupling and the functional representation it induces.

Given the columns ``P_{C|X=x}`` of a kernel, the greedy procedure repeatedly
takes the largest remaining mass in every column, emits an atom whose mass is
the smallest of those maxima, and subtracts that mass from each column's
chosen row.  The atoms define a variable ``U`` independent of ``X`` such
that ``C`` is a deterministic function of ``(U, X)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping

from .errors import EncodingError, ValidationError
from .prob import ConditionalKernel, FiniteDistribution, JointTable


def _argmax(col: list[Fraction]) -> int:
    best = 0
    for i, v in enumerate(col):
        if v > col[best]:
            best = i
    return best


def greedy_qstar(k: ConditionalKernel) -> FiniteDistribution:
    """Mass sequence of the min-of-column-maxima construction.

    Every column is kept in descending order; the smallest first-row entry is
    emitted, subtracted from every first-row entry, and the columns re-sorted,
    until the emitted masses sum to one.
    """
    if not isinstance(k, ConditionalKernel):
        raise ValidationError("greedy_qstar expects a ConditionalKernel")
    cols = [sorted((m for m in c if m), reverse=True) for c in k.columns]
    out: list[Fraction] = []
    remaining = Fraction(1)
    while remaining:
        q = min(c[0] for c in cols)
        out.append(q)
        remaining -= q
        for c in cols:
            c[0] -= q
            c.sort(reverse=True)
            while c and c[-1] == 0:
                c.pop()
    return FiniteDistribution(tuple(out))


@dataclass(frozen=True)
class CouplingAtom:
    mass: Fraction
    outcome: tuple[tuple[Hashable, int], ...]  # (x label, row) for every column

    @property
    def outcome_per_x(self) -> dict:
        return dict(self.outcome)


@dataclass(frozen=True)
class CouplingTable:
    atoms: tuple[CouplingAtom, ...]
    kernel: ConditionalKernel

    def __post_init__(self):
        if sum((a.mass for a in self.atoms), Fraction(0)) != 1:
            raise ValidationError("atom masses do not sum to one")
        if any(a.mass <= 0 for a in self.atoms):
            raise ValidationError("atoms must have positive mass")
        if not self.marginals_match():
            raise ValidationError("coupling does not reproduce the kernel columns")

    def marginals_match(self) -> bool:
        """Exact check that atoms with outcome ``c`` under ``x`` sum to ``P(c|x)``."""
        for x, col in zip(self.kernel.labels, self.kernel.columns):
            acc = [Fraction(0)] * len(col)
            for a in self.atoms:
                outcome = a.outcome_per_x
                if x not in outcome:
                    return False
                acc[outcome[x]] += a.mass
            if tuple(acc) != col.masses:
                return False
        return True

    @property
    def masses(self) -> tuple[Fraction, ...]:
        return tuple(a.mass for a in self.atoms)

    def to_json(self) -> list[dict]:
        return [
            {"mass": str(a.mass), "outcome": {str(x): c for x, c in a.outcome}}
            for a in self.atoms
        ]


def greedy_coupling(k: ConditionalKernel) -> CouplingTable:
    """Greedy coupling of the kernel's columns.

    Ties are broken toward the lowest row index; the emitted mass sequence is
    identical to :func:`greedy_qstar`.
    """
    residual = [list(c.masses) for c in k.columns]
    atoms = []
    remaining = Fraction(1)
    while remaining:
        rows = [_argmax(c) for c in residual]
        q = min(c[r] for c, r in zip(residual, rows))
        for c, r in zip(residual, rows):
            c[r] -= q
        remaining -= q
        atoms.append(CouplingAtom(q, tuple(zip(k.labels, rows))))
    return CouplingTable(tuple(atoms), k)


@dataclass(frozen=True)
class SamplerTable:
    """Conditional law of the atom index given a realized ``(x, c)`` pair."""

    rows: Mapping[tuple, FiniteDistribution]
    n_atoms: int

    def row(self, x, c) -> FiniteDistribution:
        try:
            return self.rows[(x, c)]
        except KeyError:
            raise EncodingError(f"pair (x={x!r}, c={c!r}) is unreachable under the kernel") from None

    def replace(self, key, dist: FiniteDistribution) -> "SamplerTable":
        rows = dict(self.rows)
        rows[key] = dist
        return SamplerTable(rows, self.n_atoms)

    def argmax(self) -> "SamplerTable":
        """Deterministic variant that always picks the likeliest atom; leaks in general."""
        rows = {}
        for key, d in self.rows.items():
            rows[key] = FiniteDistribution.point(d.order()[0], self.n_atoms)
        return SamplerTable(rows, self.n_atoms)


@dataclass(frozen=True)
class FunctionalRepresentation:
    p_u: FiniteDistribution
    f: Mapping[tuple, int]  # (u, x) -> c
    sampler: SamplerTable

    def decode(self, u: int, x) -> int:
        return self.f[(u, x)]


def functional_representation(t: CouplingTable) -> FunctionalRepresentation:
    p_u = FiniteDistribution(t.masses)
    f = {}
    for u, a in enumerate(t.atoms):
        for x, c in a.outcome:
            f[(u, x)] = c
    rows = {}
    n = len(t.atoms)
    for x, col in zip(t.kernel.labels, t.kernel.columns):
        for c, pc in enumerate(col):
            if not pc:
                continue
            rows[(x, c)] = FiniteDistribution(
                tuple(a.mass / pc if f[(u, x)] == c else Fraction(0) for u, a in enumerate(t.atoms))
            )
    return FunctionalRepresentation(p_u, f, SamplerTable(rows, n))


@dataclass(frozen=True)
class UConstraintReport:
    functional: bool  # H(C|X,U) = 0
    independent: bool  # I(U;X) = 0

    def __iter__(self):
        return iter((self.functional, self.independent))


def verify_u_constraints(joint: JointTable, p_u: FiniteDistribution, f: Mapping, sampler: SamplerTable) -> UConstraintReport:
    """Exactly check that ``C`` is a function of ``(U, X)`` and that ``U`` is independent of ``X``.

    ``joint`` is the pmf of ``(X, C)``.  The first flag requires every atom
    the sampler can emit for ``(x, c)`` to map back to ``c`` under ``f``; the
    second requires ``sum_c P(c|x) s(x, c)(u) = P_U(u)`` for every ``x``.
    """
    kernel = joint.kernel(given=0)
    functional = True
    independent = True
    for x, col in zip(kernel.labels, kernel.columns):
        mix = [Fraction(0)] * len(p_u)
        for c, pc in enumerate(col):
            if not pc:
                continue
            try:
                row = sampler.row(x, c)
            except EncodingError:
                functional = independent = False
                continue
            if len(row) != len(p_u):
                independent = False
                continue
            for u, s in enumerate(row):
                if s:
                    if f.get((u, x)) != c:
                        functional = False
                    mix[u] += pc * s
        if tuple(mix) != p_u.masses:
            independent = False
    return UConstraintReport(functional, independent)
