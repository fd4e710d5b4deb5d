"""Two-part response code: one-time pad on the private symbol, prefix code on ``U``.

The response is ``C = (C1, C2)`` where ``C1`` is ``x + w mod |X|`` written in
``ceil(log2 |X|)`` bits and ``C2`` is the prefix codeword of the atom ``u``
drawn from the sampler for the realized ``(x, c)``.  A receiver holding ``w``
undoes the pad, parses ``u``, recovers ``c = f(u, x)`` and hands ``c`` to the
message decoder (the coded-caching user decoder, or the identity).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .coupling import FunctionalRepresentation
from .errors import DecodeFailure, EncodingError, KeyMismatch, SizeLimit, ValidationError
from .prob import FiniteDistribution, JointTable, mutual_information


@dataclass(frozen=True)
class SharedKey:
    w: int
    T: int

    def __post_init__(self):
        if not 0 <= self.w < self.T:
            raise ValidationError(f"key {self.w} outside [0, {self.T})")


def otp_encrypt(x: int, w: SharedKey, modulus: int) -> int:
    if w.T != modulus:
        raise KeyMismatch(f"key alphabet {w.T} != modulus {modulus}")
    if not 0 <= x < modulus:
        raise ValidationError(f"plaintext {x} outside [0, {modulus})")
    return (x + w.w) % modulus


def otp_decrypt(xt: int, w: SharedKey, modulus: int) -> int:
    if w.T != modulus:
        raise KeyMismatch(f"key alphabet {w.T} != modulus {modulus}")
    return (xt - w.w) % modulus


def fixed_width(n: int) -> int:
    """Bits needed to write one of ``n`` symbols with a fixed-length code."""
    return math.ceil(math.log2(n)) if n > 1 else 0


@dataclass(frozen=True)
class PrefixCode:
    codewords: dict  # symbol -> bit string

    def __post_init__(self):
        if not self.is_prefix_free():
            raise ValidationError("codewords are not prefix-free")

    def is_prefix_free(self) -> bool:
        words = sorted(self.codewords.values())
        return all(not b.startswith(a) for a, b in zip(words, words[1:]))

    @property
    def lengths(self) -> dict:
        return {s: len(c) for s, c in self.codewords.items()}

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 2 ** len(c)) for c in self.codewords.values()), Fraction(0))

    def expected_length(self, d: FiniteDistribution) -> Fraction:
        total = Fraction(0)
        for s, p in enumerate(d):
            if p:
                if s not in self.codewords:
                    raise EncodingError(f"symbol {s} has positive mass but no codeword")
                total += p * len(self.codewords[s])
        return total

    def encode(self, symbol: int) -> str:
        try:
            return self.codewords[symbol]
        except KeyError:
            raise EncodingError(f"symbol {symbol} has no codeword") from None

    def decode(self, bits: str) -> tuple[int, int]:
        """Parse one codeword from the front of ``bits``; returns ``(symbol, consumed)``."""
        table = self._reverse()
        for n in range(0, len(bits) + 1):
            s = table.get(bits[:n])
            if s is not None:
                return s, n
        raise DecodeFailure(f"no codeword is a prefix of {bits!r}")

    def _reverse(self) -> dict:
        rev = self.__dict__.get("_rev")
        if rev is None:
            rev = {c: s for s, c in self.codewords.items()}
            object.__setattr__(self, "_rev", rev)
        return rev

    def to_json(self) -> dict:
        return {str(s): c for s, c in sorted(self.codewords.items())}


def huffman_lengths(d: FiniteDistribution) -> dict[int, int]:
    support = d.support
    if len(support) == 1:
        return {support[0]: 0}
    # (mass, smallest symbol in subtree, symbols): equal masses merge lowest index first
    heap = [(d[s], s, (s,)) for s in support]
    heapq.heapify(heap)
    depth = {s: 0 for s in support}
    while len(heap) > 1:
        m1, k1, s1 = heapq.heappop(heap)
        m2, k2, s2 = heapq.heappop(heap)
        for s in s1 + s2:
            depth[s] += 1
        heapq.heappush(heap, (m1 + m2, min(k1, k2), s1 + s2))
    return depth


def canonical_code(lengths: dict[int, int]) -> PrefixCode:
    order = sorted(lengths, key=lambda s: (lengths[s], s))
    code, prev, words = 0, 0, {}
    for i, s in enumerate(order):
        n = lengths[s]
        if i:
            code = (code + 1) << (n - prev)
        else:
            code <<= n
        words[s] = format(code, f"0{n}b") if n else ""
        prev = n
    return PrefixCode(words)


def build_prefix_code(d: FiniteDistribution) -> PrefixCode:
    """Optimal (Huffman) prefix code for the support of ``d``, canonically assigned."""
    return canonical_code(huffman_lengths(d))


@dataclass(frozen=True)
class TwoPartCodeword:
    part1: str
    part2: str

    @property
    def bits(self) -> str:
        return self.part1 + self.part2

    def __len__(self):
        return len(self.part1) + len(self.part2)


@dataclass(frozen=True)
class CodecTables:
    """Everything the encoder and decoders share for one demand vector.

    ``deliver`` maps a database realization to the message index ``c``;
    ``receive(k, side, c)`` is user ``k``'s message decoder given its side
    information (cache) and the recovered ``c``.
    """

    demand: tuple
    x_size: int
    deliver: Callable
    rep: FunctionalRepresentation
    code: PrefixCode
    receive: Callable
    otp: bool = True

    @property
    def part1_bits(self) -> int:
        return fixed_width(self.x_size)


def _check_demand(d, tables: CodecTables):
    if tuple(d) != tuple(tables.demand):
        raise EncodingError(f"tables were built for demand {tables.demand}, not {tuple(d)}")


def encode_with_atom(x: int, y, w: SharedKey, tables: CodecTables, u: int) -> TwoPartCodeword:
    c = tables.deliver(y)
    row = tables.rep.sampler.row(x, c)
    if not row[u]:
        raise EncodingError(f"atom {u} cannot be emitted for (x={x}, c={c})")
    xt = otp_encrypt(x, w, tables.x_size) if tables.otp else x
    width = tables.part1_bits
    part1 = format(xt, f"0{width}b") if width else ""
    return TwoPartCodeword(part1, tables.code.encode(u))


def encode_response(x: int, y, w: SharedKey, d, tables: CodecTables, rng: np.random.Generator) -> TwoPartCodeword:
    _check_demand(d, tables)
    row = tables.rep.sampler.row(x, tables.deliver(y))
    u = int(rng.choice(len(row), p=[float(p) for p in row]))
    return encode_with_atom(x, y, w, tables, u)


def decode_response(cw: TwoPartCodeword, w: SharedKey, side, d, tables: CodecTables, k: int):
    """Recover user ``k``'s demanded content from the codeword, key and side information."""
    _check_demand(d, tables)
    width = tables.part1_bits
    bits = cw.bits
    if len(bits) < width:
        raise DecodeFailure("codeword shorter than its fixed part")
    xt = int(bits[:width], 2) if width else 0
    x = otp_decrypt(xt, w, tables.x_size) if tables.otp else xt
    u, used = tables.code.decode(bits[width:])
    if width + used != len(bits):
        raise DecodeFailure("trailing bits after the prefix codeword")
    try:
        c = tables.rep.decode(u, x)
    except KeyError:
        raise DecodeFailure(f"no message for atom {u} under x={x}") from None
    return tables.receive(k, side, c)


EXACT_GUARD = 10**6


@dataclass(frozen=True)
class Leakage:
    bits: float
    independent: bool  # exact rational certificate that I(X;C) = 0


def _state_count(plan) -> int:
    atoms = len(plan.rep.p_u)
    return len(plan.joint_xy.entries) * plan.tables.x_size * atoms


def _check_guard(plan, guard: int):
    n = _state_count(plan)
    if n > guard:
        raise SizeLimit(f"exact enumeration needs {n} tuples (guard {guard}); use Monte Carlo mode")


def enumerate_responses(plan, guard: int = EXACT_GUARD):
    """Yield ``(x, y, w, u, mass, codeword)`` over the full support of the scheme."""
    _check_guard(plan, guard)
    tables = plan.tables
    T = tables.x_size
    for (x, y), pxy in plan.joint_xy.entries.items():
        row = tables.rep.sampler.row(x, tables.deliver(y))
        for wv in range(T):
            key = SharedKey(wv, T)
            for u, s in enumerate(row):
                if s:
                    yield x, y, key, u, pxy * s / T, encode_with_atom(x, y, key, tables, u)


def exact_leakage(source, d=None, guard: int = EXACT_GUARD) -> Leakage:
    """``I(X; C)`` from the exact rational joint of the private symbol and the response.

    ``source`` is a demand plan, or a scenario together with a demand ``d``.
    """
    plan = source.plan(d) if hasattr(source, "plan") else source
    index: dict = {}
    entries: dict = {}
    for x, _, _, _, mass, cw in enumerate_responses(plan, guard):
        ci = index.setdefault((cw.part1, cw.part2), len(index))
        entries[(x, ci)] = entries.get((x, ci), Fraction(0)) + mass
    joint = JointTable(entries, (plan.x_size, len(index)))
    independent = joint.is_product()
    return Leakage(0.0 if independent else mutual_information(joint), independent)


def exact_expected_length(source, d=None, guard: int = EXACT_GUARD) -> Fraction:
    plan = source.plan(d) if hasattr(source, "plan") else source
    return sum((mass * len(cw) for *_, mass, cw in enumerate_responses(plan, guard)), Fraction(0))


@dataclass(frozen=True)
class LosslessReport:
    ok: bool
    checked: int
    counterexample: tuple | None = None


def verify_lossless(source, d=None, guard: int = EXACT_GUARD) -> LosslessReport:
    """Decode every response in the support, for every user, and compare with the truth."""
    plan = source.plan(d) if hasattr(source, "plan") else source
    checked = 0
    for x, y, key, u, _, cw in enumerate_responses(plan, guard):
        for k in plan.layer.users:
            side = plan.layer.side_info(k, y)
            try:
                got = decode_response(cw, key, side, plan.demand, plan.tables, k)
            except DecodeFailure:
                got = None
            checked += 1
            if got != plan.layer.target(k, y, plan.demand):
                return LosslessReport(False, checked, (x, y, key.w, u, k))
    return LosslessReport(True, checked)
