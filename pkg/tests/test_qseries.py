import pytest
from gmpy2 import mpq

from thetaroot.domains import INT, RAT, DomainError
from thetaroot.series import TruncSeries, invert, mul
from thetaroot.qseries import (
    SeriesInX,
    XPoly,
    check_cor_R_identities,
    check_cor_R_theta,
    check_euler_identities,
    check_finite_identities,
    check_identity1,
    check_identity2,
    check_R_identities,
    deformed_exp,
    evaluate_at_neg_xi,
    pochhammer_y,
    qbinom,
    qbinom_row,
    qpoch,
    rr_tilde,
    theta0,
    triangular,
)


def test_triangular():
    assert [triangular(n) for n in range(6)] == [0, 0, 1, 3, 6, 10]


def test_qpoch_incremental():
    N = 25
    t = TruncSeries(INT, N, [0, 2, -1])  # 2y - y^2
    for n in range(6):
        step = TruncSeries.one(INT, N) - t.shift(n)
        assert qpoch(t, n + 1, N) == mul(qpoch(t, n, N), step)
    assert qpoch(t, 0, N) == TruncSeries.one(INT, N)


def test_qpoch_infinite_stabilizes():
    N = 18
    y = TruncSeries.monomial(INT, N, 1)
    inf = qpoch(y, None, N)
    assert inf == pochhammer_y(None, N)
    # beyond n = N the finite products stop changing below order N
    assert qpoch(y, N + 1, N) == inf
    assert qpoch(y, N + 7, N) == inf


def test_qbinom_symmetry_and_pascal():
    for n in range(13):
        for k in range(n + 1):
            N = max(1, k * (n - k))
            b = qbinom(n, k, N)
            assert b == qbinom(n, n - k, N)
            assert all(c >= 0 for c in b.coeffs)
            assert int(sum(b.coeffs)) == __import__("math").comb(n, k)
    # Pascal recurrence with the q-shift
    N = 40
    for n in range(2, 10):
        for k in range(1, n):
            lhs = qbinom(n, k, N)
            rhs = qbinom(n - 1, k - 1, N) + qbinom(n - 1, k, N).shift(k)
            assert lhs == rhs


def test_qbinom_row_matches_direct():
    N = 30
    for n in range(9):
        row = qbinom_row(n, N)
        assert len(row) == n + 1
        for k in range(n + 1):
            assert row[k] == qbinom(n, k, N)


def test_qbinom_bad_args():
    with pytest.raises(ValueError):
        qbinom(3, 5, 10)
    with pytest.raises(ValueError):
        qbinom(6, 3, 4)  # degree 9 does not fit in order 4


def test_theta0_shape():
    f = theta0(12)
    assert f.valuations == tuple(triangular(n) for n in range(f.n_terms()))
    assert triangular(f.n_terms()) > 12
    assert f.coeffs_x[2][1] == 1


def test_deformed_exp_rejects_int_domain():
    with pytest.raises(DomainError):
        deformed_exp(10, domain=INT)
    f = deformed_exp(10)
    assert f.coeffs_x[3][3] == mpq(1, 6)


def test_series_in_x_normalization_enforced():
    N = 6
    bad = TruncSeries(RAT, N, [mpq(2)])
    good = TruncSeries.one(RAT, N)
    with pytest.raises(ValueError):
        SeriesInX((bad, good), N, (0, 0))
    with pytest.raises(ValueError):
        SeriesInX((good, good, good), N, (0, 0, 0))


def test_rr_tilde_rational_vs_symbolic():
    N = 10
    sym = rr_tilde(N)
    for q in (mpq(1, 2), mpq(-1, 3), mpq(3)):
        num = rr_tilde(N, q=q)
        for n in range(num.n_terms()):
            a_sym = sym.coeffs_x[n]
            a_num = num.coeffs_x[n]
            for j in range(N + 1):
                assert a_sym[j].eval(q) == a_num[j]


def test_rr_tilde_q_minus_one_blows_up():
    with pytest.raises(ZeroDivisionError):
        rr_tilde(6, q=-1)


def test_rr_tilde_at_q_one_is_deformed_exp():
    N = 10
    assert rr_tilde(N, q=1).coeffs_x == deformed_exp(N).coeffs_x


def test_evaluate_at_neg_xi_zero_series():
    f = theta0(8)
    one = TruncSeries.one(INT, 8)
    # theta(-1, y) = sum (-1)^n y^T(n); check against the direct sum
    val = evaluate_at_neg_xi(f, one)
    direct = TruncSeries.zero(INT, 8)
    n = 0
    while triangular(n) <= 8:
        direct = direct + TruncSeries.monomial(INT, 8, triangular(n), (-1) ** n)
        n += 1
    assert val == direct


class TestXPoly:
    def test_mul_sparse_is_mul(self):
        N, D = 10, 5
        p = XPoly.one(INT, N, D)
        for k in (0, 2):
            p = p.mul_sparse(1, k)
        factor = XPoly(
            INT,
            N,
            D,
            (TruncSeries.one(INT, N), TruncSeries.monomial(INT, N, 3)),
        )
        assert p.mul_sparse(1, 3) == p * factor

    def test_invert(self):
        N, D = 8, 4
        p = XPoly.one(INT, N, D).mul_sparse(1, 1).mul_sparse(-2, 2)
        inv = p.invert()
        assert p * inv == XPoly.one(INT, N, D)

    def test_shift_and_subs(self):
        N, D = 9, 4
        p = XPoly.one(INT, N, D).mul_sparse(1, 2)
        s = p.shift_x(1, sign=-1)
        # (1 + x y^2) * (-x) at x = y is -y - y^4, cut at y-order D
        got = s.subs_x_equals_y()
        assert got == TruncSeries(INT, D, [0, -1, 0, 0, -1])
        # (1 + x y^2) at x = y
        assert p.subs_x_equals_y() == TruncSeries(INT, D, [1, 0, 0, 1])


# ---------------------------------------------------------------------------
# the identity checkers themselves, and their fault injections
# ---------------------------------------------------------------------------

def test_identity1_passes():
    r = check_identity1(24)
    assert r.passed, r.first_fail


def test_identity1_mutation_fails():
    r = check_identity1(24, mutation="drop-n1")
    assert not r.passed
    assert r.first_fail is not None


def test_identity2_passes():
    r = check_identity2(24)
    assert r.passed, r.first_fail


def test_identity2_mutation_fails():
    r = check_identity2(24, mutation="flip-sign")
    assert not r.passed
    assert "var_powers" in r.first_fail


def test_finite_identities_pass_and_mutate():
    assert check_finite_identities(7).passed
    bad = check_finite_identities(7, mutation="drop-last")
    assert not bad.passed


def test_euler_identities_pass_and_mutate():
    r = check_euler_identities(20, D=6)
    assert r.passed, r.first_fail
    assert not check_euler_identities(20, D=6, mutation="drop-n1").passed


def test_trivariate_suite_passes():
    reports = check_R_identities(8, 4)
    assert len(reports) == 5
    ids = [r.id for r in reports]
    assert len(set(ids)) == 5
    for r in reports:
        assert r.passed, (r.id, r.first_fail)


def test_trivariate_mutations_fail():
    assert not check_cor_R_theta(8, 4, mutation="flip-sign").passed
    assert not check_cor_R_identities(8, 4, mutation="drop-n1").passed
