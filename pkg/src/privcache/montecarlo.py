"""Seeded Monte Carlo simulation of the two-part codec.

A :class:`McTables` flattens one demand plan into arrays: the ``(x, y)``
states with their cumulative law, the sampler rows in CSR form, codeword
bits and lengths, a binary code tree for the receiver and the ``f(u, x)``
table.  The loop itself lives in :mod:`privcache.kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import SizeLimit
from .kernels import get_backend

BATCH = 1 << 16
COUNTS_GUARD = 10**7


def _cdf(masses) -> np.ndarray:
    acc, out = Fraction(0), []
    for m in masses:
        acc += m
        out.append(float(acc))
    out[-1] = 1.0
    return np.asarray(out, dtype=np.float64)


@dataclass(frozen=True)
class McTables:
    state_cdf: np.ndarray
    state_x: np.ndarray
    state_c: np.ndarray
    state_row: np.ndarray
    row_ptr: np.ndarray
    row_atom: np.ndarray
    row_cdf: np.ndarray
    code_bits: np.ndarray
    code_len: np.ndarray
    trie_child: np.ndarray
    trie_symbol: np.ndarray
    f_table: np.ndarray
    x_size: int
    part1_bits: int
    otp: bool
    states: tuple  # (x, y) per state, for receiver checks

    @property
    def n_atoms(self) -> int:
        return len(self.code_len)

    @classmethod
    def from_plan(cls, plan) -> "McTables":
        tables = plan.tables
        rep = tables.rep
        n_atoms = len(rep.p_u)
        x_size = plan.x_size
        states, masses, sx, sc, srow = [], [], [], [], []
        row_index: dict = {}
        row_ptr, row_atom, row_cdf = [0], [], []
        for (x, y), p in plan.joint_xy.entries.items():
            c = tables.deliver(y)
            key = (x, c)
            if key not in row_index:
                row = rep.sampler.row(x, c)
                support = [u for u, s in enumerate(row) if s]
                row_index[key] = len(row_index)
                row_atom.extend(support)
                row_cdf.extend(_cdf([row[u] for u in support]))
                row_ptr.append(len(row_atom))
            states.append((x, y))
            masses.append(p)
            sx.append(x)
            sc.append(c)
            srow.append(row_index[key])

        words = [tables.code.encode(u) for u in range(n_atoms)]
        child = [[-1, -1]]
        symbol = [-1]
        for u, wd in enumerate(words):
            node = 0
            for ch in wd:
                b = int(ch)
                if child[node][b] < 0:
                    child[node][b] = len(child)
                    child.append([-1, -1])
                    symbol.append(-1)
                node = child[node][b]
            symbol[node] = u

        f_table = np.full((n_atoms, x_size), -1, dtype=np.int64)
        for (u, x), c in rep.f.items():
            f_table[u, x] = c

        i64 = np.int64
        return cls(
            state_cdf=_cdf(masses),
            state_x=np.asarray(sx, dtype=i64),
            state_c=np.asarray(sc, dtype=i64),
            state_row=np.asarray(srow, dtype=i64),
            row_ptr=np.asarray(row_ptr, dtype=i64),
            row_atom=np.asarray(row_atom, dtype=i64),
            row_cdf=np.asarray(row_cdf, dtype=np.float64),
            code_bits=np.asarray([int(wd, 2) if wd else 0 for wd in words], dtype=i64),
            code_len=np.asarray([len(wd) for wd in words], dtype=i64),
            trie_child=np.asarray(child, dtype=i64),
            trie_symbol=np.asarray(symbol, dtype=i64),
            f_table=f_table,
            x_size=x_size,
            part1_bits=tables.part1_bits,
            otp=tables.otp,
            states=tuple(states),
        )


@dataclass(frozen=True)
class McStats:
    samples: int
    total_length: int
    total_length_sq: int
    mismatches: int
    counts: np.ndarray  # counts[x, x_tilde * n_atoms + u]
    backend: str

    @property
    def mean_length(self) -> float | None:
        return self.total_length / self.samples if self.samples else None

    @property
    def std_error(self) -> float | None:
        n = self.samples
        if n < 2:
            return None
        mean = Fraction(self.total_length, n)
        var = (Fraction(self.total_length_sq, n) - mean * mean) * Fraction(n, n - 1)
        return math.sqrt(float(var) / n)

    def empirical_leakage(self) -> float | None:
        """Plug-in ``I(X; C)`` from the response counts (biased upward for small samples)."""
        if not self.samples:
            return None
        c = self.counts.astype(np.float64)
        n = c.sum()
        px = c.sum(axis=1, keepdims=True) / n
        pc = c.sum(axis=0, keepdims=True) / n
        pj = c / n
        mask = pj > 0
        return float(np.sum(pj[mask] * np.log2(pj[mask] / (px @ pc)[mask])))

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "total_length": self.total_length,
            "mean_length": self.mean_length,
            "std_error": self.std_error,
            "mismatches": self.mismatches,
            "empirical_leakage": self.empirical_leakage(),
        }


def simulate(plan, samples: int, rng: np.random.Generator, backend: str | None = None, tables: McTables | None = None) -> McStats:
    """Draw ``samples`` responses of the plan's codec and tally length, decode errors and ``(x, response)`` counts.

    Each sample consumes three uniforms (state, key, atom) from ``rng`` in
    blocks of :data:`BATCH`, so the result depends only on the seed.
    """
    name, run = get_backend(backend)
    t = tables or McTables.from_plan(plan)
    width = t.x_size * t.n_atoms
    if t.x_size * width > COUNTS_GUARD:
        raise SizeLimit(f"response count table of {t.x_size}x{width} exceeds {COUNTS_GUARD} cells")
    counts = np.zeros((t.x_size, width), dtype=np.int64)
    total = total_sq = bad = 0
    done = 0
    while done < samples:
        n = min(BATCH, samples - done)
        u = rng.random((n, 3))
        a, b, c = run(
            u,
            t.state_cdf,
            t.state_x,
            t.state_c,
            t.state_row,
            t.row_ptr,
            t.row_atom,
            t.row_cdf,
            t.code_bits,
            t.code_len,
            t.trie_child,
            t.trie_symbol,
            t.f_table,
            t.x_size,
            t.part1_bits,
            t.otp,
            counts,
        )
        total += int(a)
        total_sq += int(b)
        bad += int(c)
        done += n
    return McStats(samples, total, total_sq, bad, counts, name)


def demand_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """Independent generators for ``n`` demands, split deterministically from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]
