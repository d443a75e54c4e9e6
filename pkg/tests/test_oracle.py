import pytest

from rcrt.exceptions import DomainError
from rcrt.flat import QUARTET_CASES
from rcrt.oracle import SUITES, run_suite


def test_flat_small():
    rep = run_suite("flat", rho_max=60, l4_max=400, l4_step=3)
    by_name = {c.name: c for c in rep.cases}
    assert all(by_name[n].passed for n in ("L=2", "L=3", "L=4")), rep.lines()
    # a short sweep cannot reach every quartet case
    assert not by_name["L=4 case coverage"].passed
    assert set(rep.labels_hit) <= set(QUARTET_CASES)


def test_flat_supplementary_hits_every_label():
    rep = run_suite("flat", rho_max=10, l4_max=20001, l4_step=10)
    assert rep.passed
    assert set(rep.labels_hit) == set(QUARTET_CASES)


def test_layered_small():
    rep = run_suite("layered", rho_max=80, k_max=2)
    assert rep.passed, rep.lines()


def test_identities_small():
    rep = run_suite("identities", rho_max=60, k_max=6)
    assert rep.passed, rep.lines()


def test_report_lines():
    rep = run_suite("layered", rho_max=20, k_max=1)
    lines = rep.lines()
    assert lines and all(("PASS" in ln) or ("FAIL" in ln) for ln in lines[:-1] or lines)


def test_unknown_suite():
    assert set(SUITES) == {"flat", "layered", "identities"}
    with pytest.raises(DomainError):
        run_suite("nope")
