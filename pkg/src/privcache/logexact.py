"""Exact numbers of the form ``r + sum_q c_q * log2(q)``.

Entropies of rational distributions, and the logarithm of an integer, live in
this set: ``r`` and every ``c_q`` are rationals and ``q`` ranges over odd
primes (``log2(2) == 1`` is folded into ``r``).  Because logarithms of
distinct primes are linearly independent over the rationals, equality is a
structural comparison of coefficients.  Sign tests of non-zero values fall
back to high-precision evaluation with :mod:`mpmath`.

The type is closed under addition and multiplication by rationals, which is
all that linear programs with rational constraint matrices need.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Union

import mpmath

Scalar = Union[int, Fraction]


@lru_cache(maxsize=4096)
def _factorize(n: int) -> tuple[tuple[int, int], ...]:
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


class LogRational:
    """An exact value ``rational + sum(coeff[q] * log2(q))``."""

    __slots__ = ("rational", "logs", "_hash")

    def __init__(self, rational: Scalar = 0, logs: Mapping[int, Fraction] | None = None):
        self.rational = Fraction(rational)
        clean = {}
        for q, c in (logs or {}).items():
            c = Fraction(c)
            if c:
                clean[int(q)] = c
        self.logs = dict(sorted(clean.items()))
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def log2(cls, value: Scalar) -> "LogRational":
        """Exact ``log2(value)`` for a positive rational."""
        value = Fraction(value)
        if value <= 0:
            raise ValueError("log2 of a non-positive number")
        rational = Fraction(0)
        logs: dict[int, Fraction] = {}
        for n, sign in ((value.numerator, 1), (value.denominator, -1)):
            for q, e in _factorize(n):
                if q == 2:
                    rational += sign * e
                else:
                    logs[q] = logs.get(q, Fraction(0)) + sign * e
        return cls(rational, logs)

    @classmethod
    def coerce(cls, value: "LogRational | Scalar") -> "LogRational":
        if isinstance(value, LogRational):
            return value
        if isinstance(value, (int, Rational)):
            return cls(Fraction(value))
        raise TypeError(f"cannot represent {value!r} exactly")

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        try:
            other = LogRational.coerce(other)
        except TypeError:
            return NotImplemented
        logs = dict(self.logs)
        for q, c in other.logs.items():
            logs[q] = logs.get(q, Fraction(0)) + c
        return LogRational(self.rational + other.rational, logs)

    __radd__ = __add__

    def __neg__(self):
        return LogRational(-self.rational, {q: -c for q, c in self.logs.items()})

    def __sub__(self, other):
        try:
            return self + (-LogRational.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LogRational):
            if other.logs and self.logs:
                raise TypeError("product of two transcendental LogRationals is not representable")
            if not other.logs:
                other = other.rational
            else:
                return other * self
        if not isinstance(other, (int, Rational)):
            return NotImplemented
        k = Fraction(other)
        return LogRational(self.rational * k, {q: c * k for q, c in self.logs.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LogRational):
            if other.logs:
                return NotImplemented
            other = other.rational
        if not isinstance(other, (int, Rational)):
            return NotImplemented
        return self * (1 / Fraction(other))

    # -- inspection ---------------------------------------------------
    def is_rational(self) -> bool:
        return not self.logs

    def is_zero(self) -> bool:
        return not self.logs and self.rational == 0

    def evaluate(self, dps: int = 50) -> mpmath.mpf:
        with mpmath.workdps(dps):
            total = mpmath.mpf(self.rational.numerator) / self.rational.denominator
            for q, c in self.logs.items():
                total += mpmath.mpf(c.numerator) / c.denominator * mpmath.log(q, 2)
            return +total

    def sign(self) -> int:
        if not self.logs:
            return (self.rational > 0) - (self.rational < 0)
        # non-zero by linear independence of prime logarithms
        for dps in (50, 200, 1000):
            v = self.evaluate(dps)
            if abs(v) > mpmath.mpf(10) ** (-(dps - 10)):
                return 1 if v > 0 else -1
        raise ArithmeticError(f"could not resolve the sign of {self!r}")

    def __float__(self) -> float:
        if not self.logs:
            return float(self.rational)
        return float(self.evaluate(40))

    # -- comparisons --------------------------------------------------
    def _cmp(self, other) -> int:
        return (self - LogRational.coerce(other)).sign()

    def __eq__(self, other):
        try:
            other = LogRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.rational == other.rational and self.logs == other.logs

    def __hash__(self):
        if self._hash is None:
            # rational values hash like the equal Fraction
            self._hash = hash(self.rational) if not self.logs else hash((self.rational, tuple(self.logs.items())))
        return self._hash

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __repr__(self):
        return f"LogRational({self})"

    def __str__(self):
        terms = []
        if self.rational or not self.logs:
            terms.append((self.rational, str(abs(self.rational))))
        for q, c in self.logs.items():
            coef = "" if abs(c) == 1 else f"{abs(c)}*"
            terms.append((c, f"{coef}log2({q})"))
        out = ("-" if terms[0][0] < 0 else "") + terms[0][1]
        for c, text in terms[1:]:
            out += (" - " if c < 0 else " + ") + text
        return out

    def to_json(self) -> dict:
        return {
            "rational": str(self.rational),
            "log2": {str(q): str(c) for q, c in self.logs.items()},
            "float": float(self),
        }


def exact_entropy(masses: Iterable[Scalar]) -> LogRational:
    """Shannon entropy in bits of rational masses, as an exact value."""
    total = LogRational(0)
    for p in masses:
        p = Fraction(p)
        if p:
            total = total - p * LogRational.log2(p)
    return total
