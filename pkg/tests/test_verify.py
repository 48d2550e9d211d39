from gmpy2 import mpq

from thetaroot.domains import INT
from thetaroot.report import VerdictReport
from thetaroot.series import TruncSeries, invert, mul
from thetaroot.roots import xi0
from thetaroot.verify import (
    check_sign_pattern,
    check_thm1,
    check_thm2,
    check_thm3,
    hard_failures,
    run_suite,
)


def test_quick_suite_all_pass():
    reports = run_suite("quick", overrides={"order": 120, "n_max": 16})
    ids = [r.id for r in reports]
    assert len(ids) == len(set(ids))
    assert len(ids) == 20
    for r in reports:
        assert r.passed, (r.id, r.first_fail)
    assert hard_failures(reports) == []


def test_conjecture_items_marked():
    reports = run_suite("quick", overrides={"order": 60, "n_max": 10})
    noted = {r.id for r in reports if "conjecture" in r.notes}
    assert {"conj1.4", "conj1.5", "conj1.6"} <= noted


def test_thm_checks_on_true_series():
    xi = xi0(80)
    inv = invert(xi)
    inv2 = mul(inv, inv)
    assert check_thm1(xi).passed
    assert check_thm2(inv).passed
    r3 = check_thm3(inv2)
    assert r3.passed
    assert inv2[3] == 0  # the one exempted coefficient


def test_sign_flip_detected_at_right_index():
    xi = xi0(40)
    coeffs = list(xi.coeffs)
    coeffs[7] = -coeffs[7]
    bad = TruncSeries(INT, 40, coeffs)
    r = check_thm1(bad)
    assert not r.passed
    assert r.first_fail["index"] == 7


def test_thm3_zero_elsewhere_fails():
    xi = xi0(40)
    inv2 = mul(invert(xi), invert(xi))
    coeffs = list(inv2.coeffs)
    coeffs[5] = 0
    r = check_thm3(TruncSeries(INT, 40, coeffs))
    assert not r.passed
    assert r.first_fail["index"] == 5


def test_check_sign_pattern_constant_term():
    s = TruncSeries(INT, 4, [2, 1, 1, 1, 1])
    r = check_sign_pattern(s, "x", +1)
    assert not r.passed
    assert r.first_fail["index"] == 0


def test_hard_failures_skips_conjectures():
    ok = VerdictReport(id="a", order=5, passed=True)
    conj = VerdictReport(
        id="b", order=5, passed=False, first_fail={"index": 1},
        notes="empirical — conjecture",
    )
    real = VerdictReport(id="c", order=5, passed=False, first_fail={"index": 2})
    assert hard_failures([ok, conj, real]) == [real]
