import random

import pytest
from gmpy2 import mpq

from thetaroot.domains import INT, RAT, DomainError
from thetaroot.series import TruncSeries, invert, log, mul
from thetaroot.roots import xi0
from thetaroot.transforms import (
    b_polys,
    euler_product,
    finite_diff,
    inverse_euler,
    kaluza_check,
    log_convexity,
    mobius_sieve,
    s_alpha_member_from,
    s_alpha_series,
    s_alpha_test,
)


def test_mobius_sieve():
    assert mobius_sieve(12)[1:] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


def test_inverse_euler_round_trip_random():
    rng = random.Random(20260826)
    for _ in range(50):
        M = rng.randint(1, 24)
        coeffs = [1] + [rng.randint(-6, 6) for _ in range(M)]
        f = TruncSeries(INT, M, coeffs)
        # build a product from f's own exponents and check both directions
        ec = inverse_euler(f.to_domain(RAT), M)
        g = euler_product(ec, M)
        assert [mpq(c) for c in f.coeffs] == list(g.coeffs)


def test_inverse_euler_integer_series_integral():
    xi = xi0(30)
    ec = inverse_euler(xi, 30)
    assert ec.integral
    assert [int(c) for c in ec.values()[:10]] == [1, 1, 2, 4, 10, 23, 61, 157, 426, 1163]


def test_inverse_euler_needs_unit_constant():
    with pytest.raises(DomainError):
        inverse_euler(TruncSeries(INT, 4, [2, 1]), 4)


def test_inverse_euler_mobius_consistency():
    """n * [y^n] log f must equal sum over divisors m of n of m * c_m."""
    xi = xi0(24)
    ec = inverse_euler(xi, 24)
    L = log(xi.to_domain(RAT))
    for n in range(1, 25):
        s = sum(m * ec.c[m] for m in range(1, n + 1) if n % m == 0)
        assert mpq(s) == n * L[n]


def test_partition_function_exponents():
    N = 16
    parts = invert(TruncSeries(RAT, N, [1, -1]))  # 1/(1-y) repeated below
    # prod 1/(1-y^m) has every exponent 1
    from thetaroot.transforms import EulerCoeffs

    g = euler_product(EulerCoeffs(c=[None] + [1] * N, integral=True), N)
    assert [int(c) for c in g.coeffs[:9]] == [1, 1, 2, 3, 5, 7, 11, 15, 22]


def test_s_alpha_series_alpha_zero_is_log():
    f = TruncSeries(RAT, 12, [mpq(1), mpq(1), mpq(2)])
    assert s_alpha_series(f, 0, 12) == log(f)


def test_s_alpha_nesting():
    """Membership built from a nonnegative test series survives the weaker
    tests: alpha <= 0 with beta >= alpha, and beta a multiple of alpha."""
    rng = random.Random(5)
    N = 50
    g = TruncSeries(
        RAT, N, [mpq(0)] + [mpq(rng.randint(0, 8), rng.randint(1, 5)) for _ in range(N)]
    )
    for alpha, betas in ((-2, (-2, -1, 0, 1)), (mpq(-1, 2), (mpq(-1, 2), 0)),
                         (-1, (-1, mpq(-1, 2), 2))):
        f = s_alpha_member_from(g, alpha)
        for beta in betas:
            r = s_alpha_test(f, beta, N)
            assert r.passed, (alpha, beta, r.first_fail)
    # positive alpha: membership passes up to integer multiples
    f = s_alpha_member_from(g, 1)
    for beta in (1, 2, 3):
        assert s_alpha_test(f, beta, N).passed


def test_s_alpha_failure_detected():
    xi = xi0(20)
    r = s_alpha_test(xi, -3, 20)
    assert not r.passed
    assert r.first_fail["index"] == 3
    assert mpq(r.first_fail["value"]) == mpq(-2, 3)


def test_b_polys_endpoints():
    """b_m(0) recovers the log coefficients and b_m(1) the series itself."""
    f = xi0(25).to_domain(RAT)
    bs = b_polys(f, 25)
    L = log(f)
    for m in range(1, 26):
        assert bs[m - 1](0) == L[m]
        assert bs[m - 1](1) == f[m]
        assert bs[m - 1].degree() <= m - 1


def test_finite_diff():
    assert finite_diff([1, 4, 9, 16], 1) == [3, 5, 7]
    assert finite_diff([1, 4, 9, 16], 2) == [2, 2]
    assert finite_diff([5], 0) == [5]
    with pytest.raises(ValueError):
        finite_diff([1, 2], -1)


def test_log_convexity_verdicts():
    assert log_convexity([1, 1, 2, 4, 9]).passed
    bad = log_convexity([1, 3, 4, 5])
    assert not bad.passed
    assert bad.first_fail["index"] == 1


def test_kaluza_strict_case():
    xi = xi0(40)
    r = kaluza_check(xi, 40)
    assert r.passed
    assert "strict" in r.notes
    inv = invert(xi)
    assert all(inv[n] < 0 for n in range(1, 41))


def test_kaluza_weak_case():
    # 1/(1-y): log-convexity holds with equality everywhere
    f = invert(TruncSeries(INT, 10, [1, -1]))
    r = kaluza_check(f, 10)
    assert r.passed
    assert "weak" in r.notes


def test_kaluza_hypothesis_not_met():
    f = TruncSeries(INT, 6, [1, 5, 1, 1, 1, 1, 1])
    r = kaluza_check(f, 6)
    assert r.passed
    assert r.notes == "hypothesis not met"
