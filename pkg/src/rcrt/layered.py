"""Two-moduli designs with exactly K robust layers.

The remainder chain of (gamma1, gamma2) fixes the layers: layer j covers
``[0, P_j)`` and tolerates per-residue errors below ``tau_j = m * sigma_j / 4``.
Pairs built from the seeded Fibonacci-like sequences F_{d,k} have a chain
of prescribed length, which is what :func:`design_layered` exploits.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from .exceptions import ConsistencyError, DomainError
from .flat import DesignRequest, design_flat
from .numtheory import PHI, RemainderChain, fib_like, remainder_chain, to_fraction

__all__ = [
    "LayeredDesign",
    "ScalingReport",
    "KStar",
    "kstar",
    "design_layered",
    "closed_form_small_K",
    "seed_candidate",
    "layered_from_pair",
    "infer_seed",
    "breakpoints_thm",
    "breakpoints_recursion",
    "staircase",
    "staircase_samples",
    "scaling_report",
    "exhaustive_layered_pair",
]


@dataclass(frozen=True)
class LayeredDesign:
    gamma1: int
    gamma2: int
    m: Fraction
    chain: RemainderChain
    breakpoints: tuple[Fraction, ...]
    tolerances: tuple[Fraction, ...]
    d: Optional[int] = None
    zeta: Optional[int] = None
    method: str = "pair"

    @property
    def K(self) -> int:
        return self.chain.depth

    @property
    def sigma(self) -> tuple[int, ...]:
        return self.chain.sigma

    @property
    def gammas(self) -> tuple[int, int]:
        return (self.gamma1, self.gamma2)

    @property
    def full_range(self) -> Fraction:
        return self.breakpoints[-1]

    @property
    def moduli(self) -> tuple[float, float]:
        return (float(self.m * self.gamma1), float(self.m * self.gamma2))

    def layer_of(self, x) -> int:
        """1-based layer j with P_{j-1} <= x < P_j."""
        if x < 0:
            raise DomainError(f"x must be non-negative, got {x}")
        j = bisect_right(self.breakpoints, x) + 1
        if j > len(self.breakpoints):
            raise DomainError(f"x = {x} lies outside [0, {self.full_range})")
        return j


class KStar(NamedTuple):
    exact: int
    binet: int


def kstar(rho) -> KStar:
    """Smallest K >= 1 with rho <= F_{1,K+2}, by scan and by Binet's estimate."""
    rho = to_fraction(rho)
    if rho <= 1:
        raise DomainError("rho must exceed 1")
    K = 1
    while fib_like(1, K + 2) < rho:
        K += 1
    est = math.log(float(rho) * math.sqrt(5)) / math.log(PHI) - 3
    return KStar(K, max(1, math.ceil(est)))


def breakpoints_recursion(gamma1: int, gamma2: int, m=1) -> list[Fraction]:
    """P_j = m N_j with N_{-1} = gamma1, N_0 = gamma2 and
    N_j = N_{j-2} + floor(sigma_{j-1} / sigma_j) (N_{j-1} - sigma_j)."""
    chain = remainder_chain(gamma1, gamma2)
    m = to_fraction(m)
    n_prev2, n_prev1 = gamma1, gamma2
    out = []
    for q, s in zip(chain.quotients, chain.sigma):
        n_j = n_prev2 + q * (n_prev1 - s)
        out.append(m * n_j)
        n_prev2, n_prev1 = n_prev1, n_j
    return out


def infer_seed(gamma1: int, gamma2: int) -> Optional[tuple[int, int]]:
    """Recover (d, zeta) when the pair is zeta F_{d,K+1} + F_{d,K} plus the
    gap F_{d,K+1}; None if the pair is not of that form."""
    chain = remainder_chain(gamma1, gamma2)
    K = chain.depth
    if K < 1:
        return None
    d = chain.sigma[-2] - 1
    if any(s != fib_like(d, K + 1 - i) for i, s in enumerate(chain.sigma)):
        return None
    zeta, rest = divmod(gamma1 - fib_like(d, K), fib_like(d, K + 1))
    if rest or zeta < 1 or gamma2 != gamma1 + fib_like(d, K + 1):
        return None
    return d, zeta


def layered_from_pair(gamma1: int, gamma2: int, m=1, d=None, zeta=None, method="pair") -> LayeredDesign:
    """Wrap an arbitrary coprime pair; seed metadata is inferred when absent."""
    m = to_fraction(m)
    chain = remainder_chain(gamma1, gamma2)
    if d is None and zeta is None:
        seed = infer_seed(gamma1, gamma2)
        if seed is not None:
            d, zeta = seed
    bps = tuple(breakpoints_recursion(gamma1, gamma2, m))
    taus = tuple(m * s / 4 for s in chain.sigma)
    return LayeredDesign(gamma1, gamma2, m, chain, bps, taus, d, zeta, method)


def seed_candidate(rho, K: int, d: int) -> tuple[int, int, int]:
    """(zeta_d, gamma1(d), gamma2(d)) for one seed."""
    rho = to_fraction(rho)
    f_k, f_k1 = fib_like(d, K), fib_like(d, K + 1)
    zeta = math.ceil((rho - f_k) / f_k1)
    g1 = zeta * f_k1 + f_k
    return zeta, g1, g1 + f_k1


def _check_chain(design: LayeredDesign, K: int):
    if design.K != K:
        raise ConsistencyError(f"{design.gammas} has {design.K} robust layers, expected {K}")
    expected = tuple(fib_like(design.d, K + 2 - j) for j in range(1, K + 2))
    if design.sigma != expected:
        raise ConsistencyError(f"chain {design.sigma} differs from {expected}")


def design_layered(rho, K: int, m_max=1, seeds=(1, 2, 3)) -> LayeredDesign:
    """Pair with exactly K robust layers minimising gamma2 over the seed family.

    K = 0 falls back to the consecutive pair of the flat L = 2 design.
    """
    rho = to_fraction(rho)
    m_max = to_fraction(m_max)
    if rho <= 1:
        raise DomainError("rho must exceed 1")
    if K < 0:
        raise DomainError("K must be non-negative")
    if K == 0:
        flat = design_flat(DesignRequest(2, rho=rho, m_max=m_max))
        return layered_from_pair(*flat.gammas, flat.m, method="flat")
    if rho <= fib_like(1, K + 2):
        g1, g2 = fib_like(1, K + 2), fib_like(1, K + 3)
        design = layered_from_pair(g1, g2, m_max / g2, d=1, zeta=1, method="fibonacci")
    else:
        best = None
        for d in seeds:
            zeta, g1, g2 = seed_candidate(rho, K, d)
            if best is None or g2 < best[3]:
                best = (d, zeta, g1, g2)
        d, zeta, g1, g2 = best
        design = layered_from_pair(g1, g2, m_max / g2, d=d, zeta=zeta, method="seed-scan")
    _check_chain(design, K)
    return design


def closed_form_small_K(rho, K: int, m_max=1) -> LayeredDesign:
    """Globally optimal pair for K in {1, 2} when rho > F_{1,K+2}."""
    rho = to_fraction(rho)
    m_max = to_fraction(m_max)
    if K not in (1, 2):
        raise DomainError("closed form exists only for K = 1, 2")
    if rho <= fib_like(1, K + 2):
        raise DomainError(f"closed form needs rho > {fib_like(1, K + 2)}")
    if K == 1:
        zeta = math.ceil((rho - 1) / 2)
        g1, d = 2 * zeta + 1, 1
        g2 = g1 + 2
    else:
        c = math.ceil(rho)
        if c % 12 == 3 and c >= 15:
            zeta, d = 3 * ((c - 3) // 12), 2
            g1, g2 = 4 * zeta + 3, 4 * zeta + 7
        else:
            zeta, d = math.ceil((rho - 2) / 3), 1
            g1, g2 = 3 * zeta + 2, 3 * zeta + 5
    design = layered_from_pair(g1, g2, m_max / g2, d=d, zeta=zeta, method="closed-form")
    _check_chain(design, K)
    return design


def breakpoints_thm(design: LayeredDesign) -> list[Fraction]:
    """Closed-form breakpoints of a seeded design.

    Odd j = 2i - 1 gives m gamma1 F_{zeta,2i}; even j = 2i gives
    m gamma2 F_{zeta-1,2i+1}; the last one is m gamma1 gamma2.
    """
    if design.d is None or design.zeta is None:
        raise DomainError("design carries no seed metadata")
    m, z = design.m, design.zeta
    out = []
    for j in range(1, design.K + 1):
        i = (j + 1) // 2
        if j % 2:
            out.append(m * design.gamma1 * fib_like(z, 2 * i))
        else:
            out.append(m * design.gamma2 * fib_like(z - 1, 2 * i + 1))
    out.append(m * design.gamma1 * design.gamma2)
    return out


def staircase(design: LayeredDesign, x) -> Fraction:
    """Per-residue error tolerance tau_j at amplitude x."""
    return design.tolerances[design.layer_of(x) - 1]


def staircase_samples(design: LayeredDesign) -> list[tuple[Fraction, Fraction]]:
    """(x, T(x)) at the start and the midpoint of every plateau."""
    out = []
    lo = Fraction(0)
    for hi, tau in zip(design.breakpoints, design.tolerances):
        out.append((lo, tau))
        out.append(((lo + hi) / 2, tau))
        lo = hi
    return out


@dataclass(frozen=True)
class ScalingReport:
    tau_ratios: tuple[Fraction, ...]
    p2_over_p1: Optional[Fraction]
    p1_over_pK1: Fraction
    p1_over_pK1_closed_form: Optional[Fraction]
    inverse_fib: Optional[Fraction]
    pK_over_pK1: Fraction
    inverse_d_plus_1: Optional[Fraction]
    two_step_ratios: dict

    @property
    def first_last_gap(self) -> Optional[Fraction]:
        """How far P_1/P_{K+1} sits from its 1/F_{d,K+1} approximation."""
        if self.inverse_fib is None:
            return None
        return self.inverse_fib - self.p1_over_pK1


def scaling_report(design: LayeredDesign) -> ScalingReport:
    K = design.K
    if K < 1:
        raise DomainError("scaling laws need K >= 1")
    P, tau = design.breakpoints, design.tolerances
    closed = inv_f = inv_d = None
    if design.d is not None and design.zeta is not None:
        d, z = design.d, design.zeta
        closed = Fraction(z + 1, (z + 1) * fib_like(d, K + 1) + fib_like(d, K))
        inv_f = Fraction(1, fib_like(d, K + 1))
        inv_d = Fraction(1, d + 1)
    return ScalingReport(
        tau_ratios=tuple(a / b for a, b in zip(tau, tau[1:])),
        p2_over_p1=P[1] / P[0] if K >= 2 else None,
        p1_over_pK1=P[0] / P[-1],
        p1_over_pK1_closed_form=closed,
        inverse_fib=inv_f,
        pK_over_pK1=P[K - 1] / P[K],
        inverse_d_plus_1=inv_d,
        two_step_ratios={j: P[j + 1] / P[j - 1] for j in range(1, K)},
    )


def exhaustive_layered_pair(rho, K: int, limit: Optional[int] = None) -> tuple[int, int]:
    """Smallest gamma2 (then smallest gamma1) over all coprime pairs with
    gamma1 >= rho and exactly K robust layers."""
    lo = max(2, math.ceil(to_fraction(rho)))
    g2 = lo + 1
    while limit is None or g2 <= limit:
        for g1 in range(lo, g2):
            if math.gcd(g1, g2) == 1 and remainder_chain(g1, g2).depth == K:
                return g1, g2
        g2 += 1
    raise DomainError(f"no pair with gamma2 <= {limit}")
