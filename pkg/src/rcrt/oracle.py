"""Exhaustive cross-checks of the constructions against brute force.

Each suite returns an :class:`OracleReport` listing per-case counts and
the first counterexample found, so the CLI can print a summary and
choose an exit code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exceptions import DomainError
from .flat import QUARTET_CASES, DesignRequest, brute_force_flat, design_flat, quartet_case
from .layered import breakpoints_thm, closed_form_small_K, design_layered, exhaustive_layered_pair
from .numtheory import check_linear_in_seed, check_mixed_docagne, fib_like, remainder_chain

SUITES = ("flat", "layered", "identities")


@dataclass
class CaseResult:
    name: str
    checked: int = 0
    failed: int = 0
    first_counterexample: Optional[str] = None

    def record(self, ok: bool, detail=None):
        self.checked += 1
        if not ok:
            self.failed += 1
            if self.first_counterexample is None:
                self.first_counterexample = str(detail() if callable(detail) else detail)

    @property
    def passed(self) -> bool:
        return self.failed == 0


@dataclass
class OracleReport:
    suite: str
    cases: list = field(default_factory=list)
    labels_hit: dict = field(default_factory=dict)

    def case(self, name) -> CaseResult:
        c = CaseResult(name)
        self.cases.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def lines(self) -> list[str]:
        out = []
        for c in self.cases:
            status = "PASS" if c.passed else "FAIL"
            line = f"[{status}] {self.suite}/{c.name}: {c.checked - c.failed}/{c.checked}"
            if c.first_counterexample:
                line += f"  first counterexample: {c.first_counterexample}"
            out.append(line)
        if self.labels_hit:
            hits = ", ".join(f"{k}:{v}" for k, v in self.labels_hit.items())
            out.append(f"        case labels hit: {hits}")
        return out


def _half_steps(lo, hi):
    v = Fraction(lo)
    while v <= hi:
        yield v
        v += Fraction(1, 2)


def flat_suite(rho_max=500, l4_max=20001, l4_step=10) -> OracleReport:
    """Closed forms against brute force: L = 2, 3 on a half-integer grid,
    L = 4 on ``31, 31 + step, ...`` with coverage of every quartet case label."""
    rep = OracleReport("flat")
    for L in (2, 3):
        c = rep.case(f"L={L}")
        for rho in _half_steps(2, rho_max):
            got = design_flat(DesignRequest(L, rho=rho))
            best = brute_force_flat(L, rho, got.gammas[-1])
            c.record(best.gammas[-1] == got.gammas[-1], lambda: (float(rho), got.gammas, best.gammas))
    c = rep.case("L=4")
    rep.labels_hit = {label: 0 for label in QUARTET_CASES}
    for rho in range(31, l4_max + 1, l4_step):
        got = design_flat(DesignRequest(4, rho=rho))
        rep.labels_hit[quartet_case(rho)] += 1
        best = brute_force_flat(4, rho, got.gammas[-1])
        c.record(best.gammas[-1] == got.gammas[-1], lambda: (rho, got.gammas, best.gammas))
    cov = rep.case("L=4 case coverage")
    for label, n in rep.labels_hit.items():
        cov.record(n > 0, f"label {label} never taken")
    return rep


def layered_suite(rho_max=400, k_max=2) -> OracleReport:
    """Construction against exhaustive pair search for ceil(rho) in [4, rho_max].

    For K <= 2 the construction (and the small-K closed form) must be
    optimal; for larger K it only has to have the right chain and may
    lose to the exhaustive optimum.
    """
    rep = OracleReport("layered")
    for K in range(1, k_max + 1):
        opt = rep.case(f"K={K} optimal" if K <= 2 else f"K={K} chain")
        closed = rep.case(f"K={K} closed form") if K <= 2 else None
        for c in range(4, rho_max + 1):
            for rho in (Fraction(c), Fraction(2 * c - 1, 2)):
                d = design_layered(rho, K)
                chain_ok = d.K == K and d.gamma1 >= rho
                if K <= 2:
                    ex = exhaustive_layered_pair(rho, K, limit=d.gamma2)
                    opt.record(chain_ok and ex[1] == d.gamma2, lambda: (float(rho), K, d.gammas, ex))
                    if rho > fib_like(1, K + 2):
                        cf = closed_form_small_K(rho, K)
                        closed.record(cf.gamma2 == d.gamma2, lambda: (float(rho), K, cf.gammas, d.gammas))
                else:
                    opt.record(chain_ok, lambda: (float(rho), K, d.gammas, d.sigma))
    return rep


def identities_suite(rho_max=500, k_max=10) -> OracleReport:
    rep = OracleReport("identities")
    c = rep.case("linear in seed")
    for d in range(21):
        for k in range(2, 31):
            c.record(check_linear_in_seed(d, k), (d, k))
    c = rep.case("mixed d'Ocagne")
    for d in range(11):
        for s in range(1, 26):
            for t in range(1, s + 1):
                c.record(check_mixed_docagne(d, s, t), (d, s, t))
    c = rep.case("consecutive coprime")
    for d in range(11):
        for k in range(1, 60):
            c.record(math.gcd(fib_like(d, k), fib_like(d, k + 1)) == 1, (d, k))
    c = rep.case("coprime families")
    for a in range(1, 10001):
        ok = (
            math.gcd(a, a + 1) == 1
            and math.gcd(2 * a - 1, 2 * a + 1) == 1
            and math.gcd(2 * a - 1, 2 * a + 3) == 1
            and math.gcd(2 * a + 1, 2 * a + 3) == 1
            and (a % 2 == 0 or math.gcd(a, a + 2) == 1)
        )
        c.record(ok, a)
    aux = rep.case("auxiliary identities")
    bps = rep.case("breakpoints closed form = recursion")
    chain = rep.case("chain is seeded sequence")
    for rho in range(2, rho_max + 1):
        for K in range(1, k_max + 1):
            d = design_layered(rho, K)
            for j in range(1, K + 1):
                lhs = d.gamma2 * fib_like(d.zeta - 1, j) - d.gamma1 * fib_like(d.zeta, j)
                aux.record(lhs == (-1) ** (j + 1) * d.sigma[j - 1], (rho, K, j, d.gammas))
            bps.record(tuple(breakpoints_thm(d)) == d.breakpoints, (rho, K, d.gammas))
            expected = tuple(fib_like(d.d, K + 2 - j) for j in range(1, K + 2))
            chain.record(remainder_chain(d.gamma1, d.gamma2).sigma == expected, (rho, K, d.gammas))
    return rep


def run_suite(name: str, **kw) -> OracleReport:
    """Run one suite; ``None`` keyword values fall back to the suite defaults."""
    suites = {"flat": flat_suite, "layered": layered_suite, "identities": identities_suite}
    if name not in suites:
        raise DomainError(f"unknown suite {name!r}")
    return suites[name](**{k: v for k, v in kw.items() if v is not None})
