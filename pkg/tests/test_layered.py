from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rcrt.exceptions import DomainError
from rcrt.layered import (
    breakpoints_recursion,
    breakpoints_thm,
    closed_form_small_K,
    design_layered,
    exhaustive_layered_pair,
    infer_seed,
    kstar,
    layered_from_pair,
    scaling_report,
    seed_candidate,
    staircase,
    staircase_samples,
)
from rcrt.numtheory import PHI, fib_like, remainder_chain


@pytest.mark.parametrize("rho, exact, binet", [(15, 5, 5), (150, 10, 10), (2, 1, 1)])
def test_kstar(rho, exact, binet):
    assert kstar(rho) == (exact, binet)


def test_kstar_is_minimal():
    for rho in range(2, 2000):
        k = kstar(rho).exact
        assert rho <= fib_like(1, k + 2)
        assert k == 1 or rho > fib_like(1, k + 1)


@pytest.mark.parametrize(
    "rho, K, pair, zeta",
    [
        (150, 1, (151, 153), 75),
        (150, 2, (152, 155), 50),
        (150, 3, (153, 158), 30),
        (5, 1, (5, 7), 2),
        (2, 4, (13, 21), 1),
        (2, 1, (3, 5), 1),
    ],
)
def test_design_examples(rho, K, pair, zeta):
    d = design_layered(rho, K)
    assert d.gammas == pair and d.zeta == zeta and d.K == K


def test_rows_with_seed_families():
    assert seed_candidate(150, 4, 1) == (19, 157, 165)
    d = design_layered(150, 4)
    assert d.gammas == (150, 161) and d.zeta == 13 and d.sigma == (11, 7, 4, 3, 1)
    # the chain (11, 7, 4, 3, 1) is the seed-2 sequence read backwards
    assert d.d == 2
    assert seed_candidate(250, 6, 1) == (12, 265, 286)
    d = design_layered(250, 6)
    assert d.gammas == (250, 279) and d.zeta == 8 and d.sigma == (29, 18, 11, 7, 4, 3, 1)


def test_k_zero_is_consecutive():
    d = design_layered(15, 0, 120)
    assert d.gammas == (15, 16) and d.K == 0 and d.m == Fraction(15, 2)
    assert d.full_range == 1800


def test_rayleigh_sweep_family():
    got = {K: design_layered(15, K, 120).gammas for K in (0, 1, 2, 3, 4, 10)}
    assert got == {0: (15, 16), 1: (15, 17), 2: (15, 19), 3: (18, 23), 4: (21, 29), 10: (233, 377)}


def test_design_domain():
    with pytest.raises(DomainError):
        design_layered(1, 2)
    with pytest.raises(DomainError):
        design_layered(10, -1)


@settings(max_examples=300, deadline=None)
@given(st.fractions(min_value=Fraction(11, 10), max_value=10**5, max_denominator=10), st.integers(1, 15))
def test_chain_matches_seed(rho, K):
    d = design_layered(rho, K)
    assert d.K == K
    assert d.gamma1 >= rho
    assert remainder_chain(*d.gammas).sigma == tuple(fib_like(d.d, K + 2 - j) for j in range(1, K + 2))
    assert d.full_range == d.m * d.gamma1 * d.gamma2
    assert all(a < b for a, b in zip(d.breakpoints, d.breakpoints[1:]))
    assert all(a > b for a, b in zip(d.tolerances, d.tolerances[1:]))
    assert d.tolerances == tuple(d.m * s / 4 for s in d.sigma)


@pytest.mark.parametrize(
    "rho, K, pair",
    [(150, 2, (152, 155)), (15, 2, (15, 19)), (150, 1, (151, 153))],
)
def test_closed_form_examples(rho, K, pair):
    assert closed_form_small_K(rho, K).gammas == pair


def test_closed_form_chain_for_twelve_l_plus_three():
    d = closed_form_small_K(15, 2)
    assert d.zeta == 3 and d.sigma == (4, 3, 1)


def test_closed_form_domain():
    with pytest.raises(DomainError):
        closed_form_small_K(100, 3)
    with pytest.raises(DomainError):
        closed_form_small_K(3, 2)


def test_small_K_optimality():
    for c in range(4, 401):
        for rho in (Fraction(c), Fraction(2 * c - 1, 2)):
            for K in (1, 2):
                d = design_layered(rho, K)
                assert exhaustive_layered_pair(rho, K)[1] == d.gamma2
                if rho > fib_like(1, K + 2):
                    assert closed_form_small_K(rho, K).gamma2 == d.gamma2


def test_k3_witness():
    assert exhaustive_layered_pair(19, 3) == (19, 26)
    d = design_layered(19, 3)
    assert d.gammas == (23, 28)
    assert Fraction(d.gamma2, 26) <= Fraction(108, 100)


def test_seed_scan_sufficiency():
    for rho in range(2, 501):
        for K in range(1, 9):
            if rho <= fib_like(1, K + 2):
                continue
            best = design_layered(rho, K).gamma2
            for dd in range(4, 11):
                assert seed_candidate(rho, K, dd)[2] >= best


def test_breakpoints_examples():
    assert breakpoints_recursion(34, 47) == [102, 141, 238, 376, 612, 1598]
    assert breakpoints_recursion(12, 17, Fraction(3, 2)) == [54, Fraction(255, 2), 306]
    assert breakpoints_recursion(5, 7, Fraction(136, 7)) == [Fraction(2040, 7), 680]
    d = design_layered(5, 1, 136)
    assert d.m == Fraction(136, 7)
    assert d.breakpoints == (Fraction(2040, 7), Fraction(680))
    assert d.tolerances == (Fraction(68, 7), Fraction(34, 7))
    assert breakpoints_thm(d) == [Fraction(2040, 7), 680]


def test_breakpoints_thm_equals_recursion():
    for rho in range(2, 501):
        for K in range(1, 11):
            d = design_layered(rho, K)
            assert tuple(breakpoints_thm(d)) == d.breakpoints
            assert d.breakpoints[0] == d.m * d.gamma1 * (d.zeta + 1)


def test_breakpoints_thm_needs_seed():
    with pytest.raises(DomainError):
        breakpoints_thm(layered_from_pair(12, 17))


def test_auxiliary_identities():
    for rho in range(2, 501):
        for K in range(1, 11):
            d = design_layered(rho, K)
            for j in range(1, K + 1):
                lhs = d.gamma2 * fib_like(d.zeta - 1, j) - d.gamma1 * fib_like(d.zeta, j)
                assert lhs == (-1) ** (j + 1) * d.sigma[j - 1]


def test_infer_seed():
    assert infer_seed(34, 47) == (1, 2)
    assert infer_seed(150, 161) == (2, 13)
    assert infer_seed(12, 17) is None
    assert infer_seed(9, 10) is None


def test_staircase():
    d = layered_from_pair(34, 47)
    assert staircase(d, 100) == Fraction(13, 4)
    assert staircase(d, 0) == Fraction(13, 4)
    assert staircase(d, 141) == Fraction(5, 4)
    assert staircase(d, Fraction(1597)) == Fraction(1, 4)
    with pytest.raises(DomainError):
        staircase(d, 1598)
    with pytest.raises(DomainError):
        staircase(d, -1)


def test_staircase_samples_cover_plateaus():
    d = layered_from_pair(34, 47)
    pts = staircase_samples(d)
    assert len(pts) == 2 * (d.K + 1)
    for x, t in pts:
        assert staircase(d, x) == t


def test_scaling_ratios_34_47():
    r = scaling_report(layered_from_pair(34, 47))
    assert r.tau_ratios[:2] == (Fraction(13, 8), Fraction(8, 5))
    assert r.p2_over_p1 == Fraction(47, 34)
    assert r.two_step_ratios[1] == Fraction(238, 102)
    assert abs(float(r.two_step_ratios[2]) - 2.667) < 1e-3
    assert r.pK_over_pK1 == Fraction(612, 1598) < r.inverse_d_plus_1
    assert r.p1_over_pK1 == r.p1_over_pK1_closed_form == Fraction(3, 47)
    assert r.first_last_gap == Fraction(1, 13) - Fraction(3, 47)


def test_scaling_needs_layers():
    with pytest.raises(DomainError):
        scaling_report(design_layered(10, 0))


def test_golden_ratio_limits():
    d = design_layered(2, 40)
    r = scaling_report(d)
    assert abs(float(r.tau_ratios[0]) - PHI) < 1e-4
    d = design_layered(2, 30)
    assert abs(float(scaling_report(d).two_step_ratios[25]) - PHI**2) < 1e-3


def test_two_step_ratios_between_two_and_three():
    for rho in range(2, 300, 7):
        for K in range(3, 12):
            r = scaling_report(design_layered(rho, K))
            for j in range(1, K - 1):
                assert 2 < r.two_step_ratios[j] < 3


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 60), st.integers(2, 200))
def test_p2_over_p1_is_gamma_ratio(K, rho):
    d = design_layered(rho, K)
    assert d.breakpoints[1] / d.breakpoints[0] == Fraction(d.gamma2, d.gamma1)
