"""
Exact integer arithmetic underlying every exponential sum in the package.

Everything here works on Python ints, so there is no overflow to guard
against; inputs are expected to stay in the 64-bit range the deterministic
Miller-Rabin witness set covers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Tuple, Union

import numpy as np

__all__ = [
    "Rational",
    "SignFactor",
    "jacobi_symbol",
    "epsilon",
    "mod_inverse",
    "ext_gcd",
    "totient",
    "divisor_count",
    "is_prime",
    "factorize",
    "coprime_residues",
    "normalize_intervals",
    "interval_measure",
    "NotInvertibleError",
]


class NotInvertibleError(ValueError):
    """Raised when a residue has no inverse modulo m."""


@dataclass(frozen=True, init=False)
class Rational:
    """Reduced fraction p/q with q >= 1."""

    p: int
    q: int

    def __init__(self, p: int, q: int = 1):
        p, q = int(p), int(q)
        if q == 0:
            raise ZeroDivisionError("denominator must be non-zero")
        if q < 0:
            p, q = -p, -q
        g = math.gcd(p, q)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)

    @classmethod
    def from_fraction(cls, x: Fraction) -> "Rational":
        return cls(x.numerator, x.denominator)

    def as_fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    def inverse_numerator(self) -> int:
        """p-bar, the inverse of p modulo q."""
        return mod_inverse(self.p, self.q)

    def __float__(self) -> float:
        return self.p / self.q

    def __repr__(self) -> str:
        return f"Rational({self.p}, {self.q})"


_SIGN_VALUES = {1: 1 + 0j, -1: -1 + 0j, 1j: 1j, -1j: -1j, 0: 0j}


class SignFactor:
    """A value in {+1, -1, +i, -i, 0}.

    Closed under multiplication (with 0 absorbing).  Compares equal to the
    plain number it represents, so ``jacobi_symbol(2, 15) == 1`` works.
    """

    __slots__ = ("_v",)

    def __init__(self, value: Union[complex, int, "SignFactor"]):
        if isinstance(value, SignFactor):
            value = value._v
        v = complex(value)
        v = complex(round(v.real), round(v.imag))
        if v not in _SIGN_VALUES.values() or abs(complex(value) - v) > 1e-12:
            raise ValueError(f"{value!r} is not one of 1, -1, i, -i, 0")
        self._v = v

    @property
    def value(self) -> complex:
        return self._v

    def conjugate(self) -> "SignFactor":
        return SignFactor(self._v.conjugate())

    def inverse(self) -> "SignFactor":
        if self._v == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.conjugate()

    def __mul__(self, other):
        if isinstance(other, SignFactor):
            return SignFactor(self._v * other._v)
        return self._v * other

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SignFactor":
        if k < 0:
            return self.inverse() ** (-k)
        return SignFactor(self._v ** k) if k else SignFactor(1)

    def __neg__(self) -> "SignFactor":
        return SignFactor(-self._v)

    def __complex__(self) -> complex:
        return self._v

    def __int__(self) -> int:
        if self._v.imag:
            raise TypeError(f"{self} is not real")
        return int(self._v.real)

    def __eq__(self, other) -> bool:
        if isinstance(other, SignFactor):
            return self._v == other._v
        try:
            return self._v == complex(other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self._v)

    def __str__(self) -> str:
        return {1: "+1", -1: "-1", 1j: "+i", -1j: "-i", 0: "0"}[self._v]

    def __repr__(self) -> str:
        return f"SignFactor({self})"

    @classmethod
    def parse(cls, text: str) -> "SignFactor":
        t = text.strip().replace(" ", "")
        table = {"1": 1, "+1": 1, "-1": -1, "i": 1j, "+i": 1j, "-i": -1j, "0": 0}
        if t not in table:
            raise ValueError(f"cannot parse sign factor {text!r}")
        return cls(table[t])


def _jacobi_positive(a: int, n: int) -> int:
    # classical binary algorithm, n odd positive
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def jacobi_symbol(a: int, b: int) -> SignFactor:
    """Generalized quadratic residue symbol (a/b) for odd b of either sign.

    Negative denominators use (a/-b) = (a/-1)(a/b) with (a/-1) = sgn a and
    (0/-1) = 1.
    """
    a, b = int(a), int(b)
    if b % 2 == 0:
        raise ValueError(f"denominator must be odd, got {b}")
    if b < 0:
        sign = 1 if a >= 0 else -1
        return SignFactor(sign * _jacobi_positive(a, -b))
    return SignFactor(_jacobi_positive(a, b))


def epsilon(a: int) -> SignFactor:
    """1 if a = 1 mod 4, i if a = 3 mod 4."""
    a = int(a)
    if a % 2 == 0:
        raise ValueError(f"epsilon is only defined for odd integers, got {a}")
    return SignFactor(1) if a % 4 == 1 else SignFactor(1j)


def ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) = a*x + b*y, g >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m, in [0, m)."""
    a, m = int(a), int(m)
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return 0
    g, x, _ = ext_gcd(a % m, m)
    if g != 1:
        raise NotInvertibleError(f"{a} is not invertible modulo {m}")
    return x % m


def factorize(n: int) -> dict:
    """Prime factorization by trial division (fine for the sizes used here)."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    out: dict = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def totient(q: int) -> int:
    result = int(q)
    for p in factorize(q):
        result -= result // p
    return result


def divisor_count(q: int) -> int:
    return math.prod(e + 1 for e in factorize(q).values())


# deterministic for n < 3.3 * 10^24
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    n = int(n)
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


Interval = Tuple[Fraction, Fraction]
FULL_TORUS: Tuple[Interval, ...] = ((Fraction(0), Fraction(1)),)


def normalize_intervals(D: Union[None, Sequence, Iterable]) -> Tuple[Interval, ...]:
    """Sorted, merged tuple of half-open intervals [lo, hi) inside [0, 1].

    Accepts None (the full torus), a single (lo, hi) pair, or a sequence of
    pairs.  Endpoints are converted to exact Fractions; floats are taken at
    their exact binary value.
    """
    if D is None:
        return FULL_TORUS
    items = list(D)
    if len(items) == 2 and not isinstance(items[0], (tuple, list)):
        items = [tuple(items)]
    ivs = []
    for lo, hi in items:
        lo, hi = Fraction(lo), Fraction(hi)
        if not (0 <= lo <= hi <= 1):
            raise ValueError(f"interval [{lo}, {hi}) not inside [0, 1]")
        if hi > lo:
            ivs.append((lo, hi))
    ivs.sort()
    merged: list = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


def interval_measure(D) -> float:
    return float(sum(hi - lo for lo, hi in normalize_intervals(D)))


def coprime_residues(q: int, D=None) -> Iterator[int]:
    """Residues p in [0, q) with gcd(p, q) = 1 and p/q in D, increasing.

    For q = 1 the single residue 0 is produced (Z_1^x = {0}).
    """
    q = int(q)
    if q < 1:
        raise ValueError("q must be positive")
    ivs = normalize_intervals(D)
    for lo, hi in ivs:
        # p/q in [lo, hi)  <=>  lo*q <= p < hi*q
        start = max(0, math.ceil(lo * q))
        stop = min(q, math.ceil(hi * q))
        if stop <= start:
            continue
        if q < 1 << 62:
            ps = np.arange(start, stop, dtype=np.int64)
            yield from ps[np.gcd(ps, q) == 1].tolist()
        else:
            yield from (p for p in range(start, stop) if math.gcd(p, q) == 1)
