"""Optimal moduli for a single full CRT layer.

Given a dynamic range threshold ``n_th`` and a modulus bound ``m_max`` the
moduli are ``m * gamma_i`` with pairwise coprime integers ``gamma_i``.  The
scale ``m = m_max / gamma_L`` is maximised by minimising the largest
``gamma_L`` subject to ``prod(gamma_1..gamma_{L-1}) >= rho`` where
``rho = n_th / m_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .exceptions import DomainError, InfeasibleDesignError
from .numtheory import iroot_ceil, pairwise_coprime, to_fraction

__all__ = [
    "DesignRequest",
    "ModuliSet",
    "BaselineReport",
    "design_flat",
    "design_flat_heuristic",
    "brute_force_flat",
    "compare_baselines",
    "truncate_scale",
    "smallest_b_l3",
    "smallest_b_l4",
    "quartet_case",
    "primes_upto",
    "is_prime",
]


@dataclass(frozen=True, init=False)
class DesignRequest:
    """Design constraints. Give any two of ``n_th``, ``m_max`` and ``rho``;
    with ``rho`` alone the modulus bound is normalised to 1."""

    L: int
    rho: Fraction
    m_max: Fraction
    n_th: Fraction

    def __init__(self, L, n_th=None, m_max=None, rho=None):
        n_th = None if n_th is None else to_fraction(n_th)
        m_max = None if m_max is None else to_fraction(m_max)
        rho = None if rho is None else to_fraction(rho)
        if rho is None:
            if n_th is None or m_max is None:
                raise DomainError("need rho, or both n_th and m_max")
            if m_max <= 0:
                raise DomainError("m_max must be positive")
            rho = n_th / m_max
        elif m_max is None:
            m_max = Fraction(1) if n_th is None else n_th / rho
        if n_th is None:
            n_th = rho * m_max
        if m_max <= 0:
            raise DomainError("m_max must be positive")
        if n_th != rho * m_max:
            raise DomainError("inconsistent n_th, m_max and rho")
        if rho <= 1:
            raise DomainError(f"rho must exceed 1, got {rho}")
        object.__setattr__(self, "L", int(L))
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "m_max", m_max)
        object.__setattr__(self, "n_th", n_th)


@dataclass(frozen=True)
class ModuliSet:
    gammas: tuple[int, ...]
    m: Fraction
    case: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(int(g) for g in self.gammas))
        object.__setattr__(self, "m", to_fraction(self.m))
        if list(self.gammas) != sorted(set(self.gammas)):
            raise DomainError(f"gammas must be strictly increasing: {self.gammas}")
        if self.gammas[0] < 2:
            raise DomainError("gammas must be at least 2")
        if not pairwise_coprime(self.gammas):
            raise DomainError(f"gammas are not pairwise coprime: {self.gammas}")
        if self.m <= 0:
            raise DomainError("scale m must be positive")

    @property
    def L(self) -> int:
        return len(self.gammas)

    @property
    def product(self) -> int:
        return math.prod(self.gammas)

    @property
    def full_range(self) -> Fraction:
        return self.m * self.product

    P = full_range

    @property
    def full_tolerance(self) -> Fraction:
        return self.m / 4

    tau = full_tolerance

    @property
    def m_max(self) -> Fraction:
        return self.m * self.gammas[-1]

    @property
    def moduli(self) -> tuple[float, ...]:
        return tuple(float(self.m * g) for g in self.gammas)

    def satisfies(self, req: DesignRequest) -> bool:
        """Check modulus bound and range threshold exactly."""
        return self.m * self.gammas[-1] <= req.m_max and self.full_range >= req.n_th


def _finalize(gammas, req: DesignRequest, case: str) -> ModuliSet:
    gammas = tuple(sorted(gammas))
    return ModuliSet(gammas, req.m_max / gammas[-1], case)


def smallest_b_l3(rho) -> int:
    """min{n >= 3 : n(n-1) >= rho}."""
    rho = to_fraction(rho)
    n = max(3, iroot_ceil(rho, 2))
    while n > 3 and (n - 1) * (n - 2) >= rho:
        n -= 1
    while n * (n - 1) < rho:
        n += 1
    return n


def smallest_b_l4(rho) -> int:
    """min{n >= 5 : n(n-1)(n-2) >= rho}."""
    rho = to_fraction(rho)
    n = max(5, iroot_ceil(rho, 3))
    while n > 5 and (n - 1) * (n - 2) * (n - 3) >= rho:
        n -= 1
    while n * (n - 1) * (n - 2) < rho:
        n += 1
    return n


def _design_l3(rho: Fraction) -> tuple[tuple[int, ...], str]:
    if rho <= 6:
        return (2, 3, 5), "trivial"
    b = smallest_b_l3(rho)
    if b % 2 == 0:
        return (b - 1, b, b + 1), "even-b"
    if b >= 5 and (b - 2) * b >= rho and (b + 1) % 3 != 0:
        return (b - 2, b, b + 1), "odd-b-shift"
    return (b, b + 1, b + 2), "odd-b-next"


def quartet_case(rho) -> str:
    """Row of the L = 4 case table selected for ``rho > 30``.

    Rows are tested in table order and the first match wins.
    """
    rho = to_fraction(rho)
    if rho <= 30:
        return "trivial"
    b = smallest_b_l4(rho)
    if b % 2 == 1:
        return "A1" if b % 3 != 1 else "A2"
    if (b - 3) * (b - 1) * b >= rho:
        if b % 6 in (2, 4):
            return "B1"
        if b % 5 != 3:
            return "B2"
        if (b - 5) * (b - 1) * (b + 1) >= rho and b % 7 != 5:
            return "B3.1"
        return "B3.2"
    if rho <= (b - 3) * (b - 1) * (b + 1):
        if b % 5 != 3:
            return "C1" if b % 3 != 1 else "C2"
        return "C3.1" if b % 3 != 1 else "C3.2"
    # The printed D2 condition also captures b = 3 (mod 5) with b = 1 (mod 3),
    # where {b-1, b+2} share the factor 3; the D1 quartet is coprime there.
    if b % 3 == 0 or (b % 5 == 3 and b % 3 != 1):
        return "D2"
    return "D1"


_QUARTETS = {
    "A1": (-2, -1, 0, 2),
    "A2": (-2, 0, 1, 2),
    "B1": (-3, -1, 0, 1),
    "B2": (-3, -1, 1, 2),
    "B3.1": (-5, -1, 1, 2),
    "B3.2": (-1, 1, 2, 3),
    "C1": (-3, -1, 1, 2),
    "C2": (-1, 0, 1, 3),
    "C3.1": (-1, 1, 2, 3),
    "C3.2": (-1, 0, 1, 3),
    "D1": (-1, 0, 1, 3),
    "D2": (-1, 1, 2, 3),
}

QUARTET_CASES = tuple(_QUARTETS)


def _design_l4(rho: Fraction) -> tuple[tuple[int, ...], str]:
    case = quartet_case(rho)
    if case == "trivial":
        return (2, 3, 5, 7), case
    b = smallest_b_l4(rho)
    return tuple(b + off for off in _QUARTETS[case]), case


def design_flat(req: DesignRequest) -> ModuliSet:
    """Closed-form optimal moduli for L = 2, 3, 4.

    >>> design_flat(DesignRequest(3, rho=10**4, m_max=100)).gammas
    (101, 102, 103)
    """
    if req.L == 2:
        g = math.ceil(req.rho)
        return _finalize((g, g + 1), req, "consecutive")
    if req.L == 3:
        gammas, case = _design_l3(req.rho)
        return _finalize(gammas, req, case)
    if req.L == 4:
        gammas, case = _design_l4(req.rho)
        return _finalize(gammas, req, case)
    if req.L in (5, 6):
        return design_flat_heuristic(req)
    raise DomainError(f"no construction for L = {req.L}; supported L is 2..6")


# -- heuristic ---------------------------------------------------------------


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return [i for i, flag in enumerate(sieve) if flag]


def _nearest_coprime_prime(target: int, members) -> int:
    """Scan outward from ``target`` (below first on ties) for a prime that is
    new and coprime to every member."""

    def ok(p):
        return p >= 2 and p not in members and is_prime(p) and all(q % p for q in members)

    for delta in range(0, 10 * target + 100):
        for cand in (target - delta, target + delta):
            if ok(cand):
                return cand
    raise InfeasibleDesignError(f"no coprime prime near {target}")


def _heuristic_l4(rho: Fraction) -> tuple[tuple[int, ...], str]:
    if rho <= 30:
        return (2, 3, 5, 7), "trivial"
    b = smallest_b_l4(rho)
    if b % 2 == 1:
        return _design_l4(rho)
    bp = b + 1
    # b' odd: reuse the odd-b rows with b' in place of b.
    if bp % 3 != 1:
        return (bp - 2, bp - 1, bp, bp + 2), "heuristic-A1"
    return (bp - 2, bp, bp + 1, bp + 2), "heuristic-A2"


def design_flat_heuristic(req: DesignRequest) -> ModuliSet:
    """Feasible, not certified optimal, moduli for L = 4, 5, 6.

    L = 4 with even b switches to b' = b + 1 and the odd-b quartets.  For
    L = 5, 6 a quartet sized for ``t**3`` (t ~ rho^(1/(L-1))) is extended with
    the primes nearest the size that keeps the product on track; t grows until
    the L - 1 smallest members reach ``rho``.
    """
    rho = req.rho
    if req.L == 4:
        gammas, case = _heuristic_l4(rho)
        return _finalize(gammas, req, case)
    if req.L not in (5, 6):
        raise DomainError(f"heuristic supports L in 4..6, got {req.L}")
    t = iroot_ceil(rho, req.L - 1)
    while True:
        members = list(_heuristic_l4(Fraction(t) ** 3)[0])
        while len(members) < req.L:
            counted = req.L - 1 - len(members)
            need = rho / math.prod(members)
            target = t if counted <= 0 else max(t, iroot_ceil(need, counted))
            members.append(_nearest_coprime_prime(target, members))
        members.sort()
        if math.prod(members[:-1]) >= rho:
            return _finalize(members, req, f"heuristic-L{req.L}")
        t += 1


# -- exhaustive oracle -------------------------------------------------------


def _search_below(top: int, count: int, need: int, pool) -> Optional[tuple[int, ...]]:
    """Lexicographically smallest increasing tuple of ``count`` values from
    ``pool`` (all < top), pairwise coprime and coprime to ``top``, whose
    product is at least ``need``."""
    cands = [a for a in pool if a < top and math.gcd(a, top) == 1]
    if len(cands) < count:
        return None
    # upper[i][r]: largest product of r candidates drawn from cands[i:]
    n = len(cands)

    def best_tail(i, r):
        if r == 0:
            return 1
        if n - i < r:
            return 0
        return math.prod(cands[n - r :])

    chosen: list[int] = []

    def dfs(start, prod):
        r = count - len(chosen)
        if r == 0:
            return prod >= need
        for i in range(start, n - r + 1):
            a = cands[i]
            if any(math.gcd(a, c) != 1 for c in chosen):
                continue
            if prod * a * best_tail(i + 1, r - 1) < need:
                continue
            chosen.append(a)
            if dfs(i + 1, prod * a):
                return True
            chosen.pop()
        return False

    return tuple(chosen) if dfs(0, 1) else None


def brute_force_flat(L: int, rho, gamma_cap: int, m_max=1, pool=None) -> ModuliSet:
    """Exhaustively minimise gamma_L (ties: lexicographically smallest tuple).

    ``pool`` restricts the admissible values (default: every integer >= 2).
    """
    rho = to_fraction(rho)
    if L < 2:
        raise DomainError("need at least two moduli")
    need = math.ceil(rho)
    values = list(range(2, gamma_cap + 1)) if pool is None else sorted(v for v in pool if 2 <= v <= gamma_cap)
    for top in values:
        lower = _search_below(top, L - 1, need, values)
        if lower is not None:
            gammas = lower + (top,)
            return ModuliSet(gammas, to_fraction(m_max) / top, "brute-force")
    raise InfeasibleDesignError(f"no feasible L={L} set with gamma_L <= {gamma_cap} for rho={rho}")


@dataclass(frozen=True)
class BaselineReport:
    closed_form: ModuliSet
    prime: ModuliSet
    structured: ModuliSet

    @property
    def improvement_over_prime(self) -> Fraction:
        return self.closed_form.m / self.prime.m

    @property
    def improvement_over_structured(self) -> Fraction:
        return self.closed_form.m / self.structured.m


def compare_baselines(req: DesignRequest, prime_cap: Optional[int] = None) -> BaselineReport:
    """Compare the closed-form triple against the best all-prime triple and
    the best {2^n - 1, 2^n, 2^n + 1} triple under the same constraints."""
    if req.L != 3:
        raise DomainError("baseline comparison is defined for L = 3")
    closed_form = design_flat(req)
    if prime_cap is None:
        prime_cap = 2 * iroot_ceil(req.rho, req.L - 1) + 50
    while True:
        try:
            prime = brute_force_flat(3, req.rho, prime_cap, req.m_max, pool=primes_upto(prime_cap))
            break
        except InfeasibleDesignError:
            prime_cap *= 2
    prime = replace(prime, case="prime-only")
    n = 2
    while (2**n - 1) * 2**n < req.rho:
        n += 1
    structured = ModuliSet((2**n - 1, 2**n, 2**n + 1), req.m_max / (2**n + 1), "structured")
    return BaselineReport(closed_form, prime, structured)


def truncate_scale(moduli: ModuliSet, decimals: int) -> ModuliSet:
    """Round m down to ``decimals`` decimal places; gammas are kept."""
    if decimals < 0:
        raise DomainError("decimals must be non-negative")
    scale = 10**decimals
    m_hat = Fraction(math.floor(moduli.m * scale), scale)
    if m_hat == 0:
        raise InfeasibleDesignError(f"m = {moduli.m} truncates to zero at {decimals} decimals")
    return replace(moduli, m=m_hat)
