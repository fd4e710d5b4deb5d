"""Uncoded placement and XOR-multicast delivery for ``K`` users and ``N`` files.

Users and files are 1-based, as are demand vectors ``d = (d_1, ..., d_K)``.
A file is an ``F``-bit integer whose first bit is the most significant one.
Each file is cut into ``C(K, p)`` contiguous subfiles, assigned to the
``p``-subsets of users in colexicographic order; user ``k`` caches every
subfile whose subset contains ``k``.  For every ``(p+1)``-subset ``g`` the
server sends the XOR over ``j in g`` of subfile ``(d_j, g - {j})``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import comb

from .errors import DecodeFailure, IndivisibleFile, UnsupportedMemoryPoint, ValidationError
from .prob import JointTable, parse_rational, push_forward

Subset = tuple[int, ...]


def colex_subsets(K: int, size: int) -> list[Subset]:
    return sorted(combinations(range(1, K + 1), size), key=lambda s: s[::-1])


@dataclass(frozen=True)
class CachingParams:
    N: int
    K: int
    F: int
    M: Fraction
    p: int
    subfile_size: int

    @cached_property
    def subsets(self) -> list[Subset]:
        return colex_subsets(self.K, self.p)

    @cached_property
    def gammas(self) -> list[Subset]:
        return colex_subsets(self.K, self.p + 1)

    @cached_property
    def subset_index(self) -> dict[Subset, int]:
        return {s: i for i, s in enumerate(self.subsets)}

    @property
    def n_subfiles(self) -> int:
        return comb(self.K, self.p)

    @property
    def message_bits(self) -> int:
        return len(self.gammas) * self.subfile_size

    @property
    def mn_rate(self) -> Fraction:
        """Delivery load in files, ``K(1 - M/N) / (1 + KM/N)``."""
        return self.K * (1 - self.M / self.N) / (1 + Fraction(self.K) * self.M / self.N)

    def demands(self) -> list[tuple[int, ...]]:
        return list(product(range(1, self.N + 1), repeat=self.K))

    def check_demand(self, d) -> tuple[int, ...]:
        d = tuple(int(v) for v in d)
        if len(d) != self.K or any(not 1 <= v <= self.N for v in d):
            raise ValidationError(f"demand {d} is not in [N]^K with N={self.N}, K={self.K}")
        return d

    def subfile(self, file: int, omega: Subset) -> int:
        block = self.subset_index[omega]
        shift = self.F - (block + 1) * self.subfile_size
        return (file >> shift) & ((1 << self.subfile_size) - 1)

    def assemble(self, blocks: dict[Subset, int]) -> int:
        value = 0
        for omega in self.subsets:
            value = (value << self.subfile_size) | blocks[omega]
        return value


def make_params(N: int, K: int, F: int, M) -> CachingParams:
    """Validate a memory point ``M`` with integer ``p = MK/N`` and an evenly split file."""
    M = parse_rational(M)
    if not (isinstance(N, int) and isinstance(K, int) and isinstance(F, int)):
        raise ValidationError("N, K and F must be integers")
    if K < 1 or N < K:
        raise ValidationError(f"need N >= K >= 1, got N={N}, K={K}")
    if F < 1:
        raise ValidationError("F must be positive")
    if not 0 <= M <= N:
        raise ValidationError(f"cache size M={M} outside [0, N]")
    p = M * K / N
    if p.denominator != 1:
        raise UnsupportedMemoryPoint(f"MK/N = {p} is not an integer")
    p = int(p)
    n_sub = comb(K, p)
    if F % n_sub:
        raise IndivisibleFile(f"F={F} is not divisible by C({K},{p})={n_sub}")
    return CachingParams(N, K, F, M, p, F // n_sub)


@dataclass(frozen=True)
class DatabaseRealization:
    files: tuple[int, ...]
    F: int

    def __post_init__(self):
        for i, f in enumerate(self.files):
            if not 0 <= f < (1 << self.F):
                raise ValidationError(f"file {i + 1} does not fit in {self.F} bits")

    def file(self, n: int) -> int:
        return self.files[n - 1]


@dataclass(frozen=True)
class CacheContent:
    user: int
    subfiles: dict  # (n, omega) -> int

    def bits(self, params: CachingParams) -> int:
        return len(self.subfiles) * params.subfile_size


@dataclass(frozen=True)
class DeliveryMessage:
    segments: tuple[tuple[Subset, int], ...]
    subfile_size: int

    @property
    def bits(self) -> int:
        return len(self.segments) * self.subfile_size

    def to_index(self) -> int:
        value = 0
        for _, payload in self.segments:
            value = (value << self.subfile_size) | payload
        return value

    @classmethod
    def from_index(cls, params: CachingParams, value: int) -> "DeliveryMessage":
        if not 0 <= value < (1 << params.message_bits):
            raise DecodeFailure(f"message index {value} does not fit in {params.message_bits} bits")
        mask = (1 << params.subfile_size) - 1
        L = len(params.gammas)
        segs = []
        for i, g in enumerate(params.gammas):
            shift = (L - 1 - i) * params.subfile_size
            segs.append((g, (value >> shift) & mask))
        return cls(tuple(segs), params.subfile_size)

    def to_bits(self) -> str:
        return format(self.to_index(), f"0{self.bits}b") if self.bits else ""


def placement(params: CachingParams, db: DatabaseRealization) -> list[CacheContent]:
    caches = []
    for k in range(1, params.K + 1):
        sub = {}
        for n in range(1, params.N + 1):
            for omega in params.subsets:
                if k in omega:
                    sub[(n, omega)] = params.subfile(db.file(n), omega)
        caches.append(CacheContent(k, sub))
    return caches


def delivery(params: CachingParams, db: DatabaseRealization, d) -> DeliveryMessage:
    d = params.check_demand(d)
    segs = []
    for g in params.gammas:
        payload = 0
        for j in g:
            rest = tuple(v for v in g if v != j)
            payload ^= params.subfile(db.file(d[j - 1]), rest)
        segs.append((g, payload))
    return DeliveryMessage(tuple(segs), params.subfile_size)


def user_decode(params: CachingParams, k: int, cache: CacheContent, msg: DeliveryMessage, d) -> int:
    """Reconstruct file ``d_k`` for user ``k`` from its cache and the multicast."""
    d = params.check_demand(d)
    if cache.user != k:
        raise DecodeFailure(f"cache belongs to user {cache.user}, not {k}")
    if msg.subfile_size != params.subfile_size or [g for g, _ in msg.segments] != params.gammas:
        raise DecodeFailure("delivery message does not match the caching parameters")
    payloads = dict(msg.segments)
    want = d[k - 1]
    blocks = {}
    try:
        for omega in params.subsets:
            if k in omega:
                blocks[omega] = cache.subfiles[(want, omega)]
                continue
            g = tuple(sorted(omega + (k,)))
            value = payloads[g]
            for j in g:
                if j != k:
                    value ^= cache.subfiles[(d[j - 1], tuple(v for v in g if v != j))]
            blocks[omega] = value
    except KeyError as exc:
        raise DecodeFailure(f"user {k} is missing subfile {exc.args[0]}") from None
    return params.assemble(blocks)


def induced_joint(p_xy: JointTable, params: CachingParams, d) -> JointTable:
    """Push ``P_{X,Y}`` through the delivery map; keys of ``Y`` are file tuples.

    The message alphabet is declared as all ``2**message_bits`` values.
    """
    d = params.check_demand(d)
    cache: dict = {}

    def message(y):
        if y not in cache:
            cache[y] = delivery(params, DatabaseRealization(tuple(y), params.F), d).to_index()
        return cache[y]

    return push_forward(p_xy, message, size=1 << params.message_bits)


def file_to_hex(value: int, F: int) -> str:
    return format(value, f"0{max(1, -(-F // 4))}x")


def hex_to_file(text: str, F: int) -> int:
    try:
        value = int(text, 16)
    except ValueError as exc:
        raise ValidationError(f"bad hex file {text!r}") from exc
    if value >= (1 << F):
        raise ValidationError(f"file {text!r} has more than {F} bits")
    return value
