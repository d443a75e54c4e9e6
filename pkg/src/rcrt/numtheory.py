"""Exact integer and rational primitives.

Everything here works on Python ints and :class:`fractions.Fraction`, so
products of moduli never overflow and design quantities print exactly.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from itertools import combinations
from numbers import Rational

from .exceptions import DomainError, NotCoprimeError

PHI = (1 + math.sqrt(5)) / 2


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions, decimal strings ("363.64"), ratio strings
    ("136/7") or floats to an exact Fraction.

    Floats go through their shortest repr so that ``0.1`` becomes ``1/10``
    rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse {value!r} as a rational") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


def iroot_ceil(value, n: int) -> int:
    """Smallest integer t >= 1 with t**n >= value (exact)."""
    value = to_fraction(value)
    if n < 1:
        raise DomainError("root order must be positive")
    if value <= 1:
        return 1
    t = max(1, int(float(value) ** (1.0 / n)) - 1)
    while t**n >= value and t > 1:
        t -= 1
    while t**n < value:
        t += 1
    return t


def gcd_ext(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: returns ``(g, u, v)`` with ``u*a + v*b == g == gcd(a, b)``."""
    if a < 0 or b < 0:
        raise DomainError("gcd_ext expects non-negative inputs")
    if a == 0 and b == 0:
        raise DomainError("gcd(0, 0) is undefined")
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    return old_r, old_u, old_v


def pairwise_coprime(values) -> bool:
    return all(math.gcd(a, b) == 1 for a, b in combinations(values, 2))


@dataclass(frozen=True)
class RemainderChain:
    """Euclidean remainders sigma_1 > ... > sigma_{K+1} = 1 of a coprime pair."""

    gamma1: int
    gamma2: int
    sigma: tuple[int, ...]

    @property
    def depth(self) -> int:
        """Number of robust layers K (the chain holds K + 1 remainders)."""
        return len(self.sigma) - 1

    @property
    def quotients(self) -> tuple[int, ...]:
        """floor(sigma_{j-1} / sigma_j) for j = 1..K+1, with sigma_0 = gamma1."""
        prev = (self.gamma1,) + self.sigma[:-1]
        return tuple(p // s for p, s in zip(prev, self.sigma))

    def __len__(self):
        return len(self.sigma)

    def __iter__(self):
        return iter(self.sigma)

    def __getitem__(self, j):
        return self.sigma[j]


def remainder_chain(gamma1: int, gamma2: int) -> RemainderChain:
    """Run the Euclidean algorithm on (gamma2, gamma1) and keep the remainders.

    >>> remainder_chain(12, 17).sigma
    (5, 2, 1)
    """
    if not 1 < gamma1 < gamma2:
        raise DomainError(f"need 1 < gamma1 < gamma2, got ({gamma1}, {gamma2})")
    g = math.gcd(gamma1, gamma2)
    if g != 1:
        raise NotCoprimeError(gamma1, gamma2, g)
    sigma = []
    a, b = gamma2, gamma1
    while True:
        r = a % b
        sigma.append(r)
        if r == 1:
            break
        a, b = b, r
    return RemainderChain(gamma1, gamma2, tuple(sigma))


_fib_cache: dict[int, list[int]] = {}
_fib_lock = threading.Lock()


def fib_like(d: int, k: int) -> int:
    """k-th term of the sequence seeded (d, 1): F(0) = d, F(1) = 1, F(k) = F(k-1) + F(k-2)."""
    if k < 0:
        raise DomainError(f"index must be non-negative, got {k}")
    if d < 0:
        raise DomainError(f"seed must be non-negative, got {d}")
    seq = _fib_cache.get(d)
    if seq is None or len(seq) <= k:
        with _fib_lock:
            seq = list(_fib_cache.get(d, [d, 1]))
            while len(seq) <= k:
                seq.append(seq[-1] + seq[-2])
            _fib_cache[d] = seq
    return seq[k]


def fib_like_terms(d: int, count: int) -> list[int]:
    return [fib_like(d, k) for k in range(count)]


def check_linear_in_seed(d: int, k: int) -> bool:
    """F_{d,k} == F_{1,k-1} + d * F_{1,k-2} for k >= 2."""
    if k < 2:
        raise DomainError("identity is stated for k >= 2")
    return fib_like(d, k) == fib_like(1, k - 1) + d * fib_like(1, k - 2)


def check_mixed_docagne(d: int, s: int, t: int) -> bool:
    """F_{d,s} F_{1,t} - F_{d,s+1} F_{1,t-1} == (-1)^t F_{d,s-t} for s >= t >= 1."""
    if not s >= t >= 1:
        raise DomainError("identity is stated for s >= t >= 1")
    lhs = fib_like(d, s) * fib_like(1, t) - fib_like(d, s + 1) * fib_like(1, t - 1)
    return lhs == (-1) ** t * fib_like(d, s - t)


def ceil_div(a, b) -> int:
    """Exact ceiling of a / b for rationals."""
    return math.ceil(to_fraction(a) / to_fraction(b))
