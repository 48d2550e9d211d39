import mpmath
import pytest
from gmpy2 import mpq

from thetaroot.numerics import (
    collision_point,
    count_real_roots,
    delta1,
    figure1_scan,
    largest_real_root,
    scan_point,
    square_free_part,
    sturm_chain,
)
from thetaroot.roots import xi0
from thetaroot.series import AlphaPoly


def test_count_real_roots():
    # (x-1)(x-2)(x-3)
    p = (mpq(-6), mpq(11), mpq(-6), mpq(1))
    assert count_real_roots(p) == 3
    assert count_real_roots(p, 0, mpq(5, 2)) == 2
    assert count_real_roots((mpq(1), mpq(0), mpq(1))) == 0  # x^2 + 1
    # repeated roots count once
    assert count_real_roots((mpq(1), mpq(2), mpq(1))) == 1  # (x+1)^2


def test_square_free_part():
    # (x+1)^2 -> x+1 up to scale
    q = square_free_part((mpq(1), mpq(2), mpq(1)))
    assert len(q) == 2
    assert q[0] / q[1] == 1


def test_sturm_chain_integer_primitive():
    chain = sturm_chain((mpq(-6), mpq(11), mpq(-6), mpq(1)))
    for p in chain:
        assert all(c == int(c) for c in p)


def test_largest_real_root_oracles():
    tol = mpq(1, 10**9)
    # alpha + 3 (up to scale): root -3
    r = largest_real_root(AlphaPoly([mpq(3, 2), mpq(1, 2)]), tol)
    assert abs(r + 3) <= tol
    # (alpha+2)(alpha+7)/6: largest root -2
    r = largest_real_root(AlphaPoly([mpq(14, 6), mpq(9, 6), mpq(1, 6)]), tol)
    assert abs(r + 2) <= tol
    # no real roots
    assert largest_real_root((mpq(1), mpq(0), mpq(1)), tol) is None
    # constant polynomial
    assert largest_real_root((mpq(5),), tol) is None
    with pytest.raises(ValueError):
        largest_real_root((), tol)


def test_largest_real_root_irrational():
    tol = mpq(1, 10**12)
    r = largest_real_root((mpq(-2), mpq(0), mpq(1)), tol)  # sqrt 2
    assert abs(mpmath.mpf(r.numerator) / mpmath.mpf(r.denominator) - mpmath.sqrt(2)) < 1e-11


def test_scan_point_deterministic():
    a = scan_point(mpq(1, 2), 6, mpq(1, 10**7))
    b = scan_point(mpq(1, 2), 6, mpq(1, 10**7))
    assert [(r.q, r.m, r.root) for r in a] == [(r.q, r.m, r.root) for r in b]
    assert [r.m for r in a] == [2, 3, 4, 5, 6]


def test_scan_q_zero_envelope():
    """At q = 0 the second-coefficient root sits at exactly -3 and the
    envelope approaches -2."""
    rows, env = figure1_scan(0, 0, 1, 8, mpq(1, 10**7))
    assert len(env) == 1
    q, best = env[0]
    assert q == 0
    assert abs(best + 2) < mpq(1, 10**6)
    first = rows[0]
    assert first.m == 2 and abs(first.root + 3) < mpq(1, 10**6)


def test_figure1_pool_map_irrelevant():
    args = (mpq(1, 4), mpq(1, 2), mpq(1, 4), 5, mpq(1, 10**6))
    rows1, env1 = figure1_scan(*args)
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=3) as ex:
        rows2, env2 = figure1_scan(*args, pool_map=ex.map)
    assert [(r.q, r.m, r.root) for r in rows1] == [(r.q, r.m, r.root) for r in rows2]
    assert env1 == env2


def test_figure1_rejects_grid_past_minus_one():
    with pytest.raises(ValueError):
        figure1_scan(-2, 0, mpq(1, 2), 4, mpq(1, 10**6))


def test_collision_point_value_and_residual():
    x, y = collision_point(1e-10)
    assert abs(x - mpmath.mpf("-2.32037694429")) < 1e-9
    assert abs(y - mpmath.mpf("0.309249338600")) < 1e-9
    # residual of both defining equations
    f = fx = mpmath.mpf(0)
    for n in range(80):
        t = (x**n) * (y ** (n * (n - 1) // 2))
        f += t
        fx += n * t / x
    assert abs(f) < 1e-9 and abs(fx) < 1e-9


def test_delta1_value_and_residual():
    d = delta1(1e-10)
    assert abs(d - mpmath.mpf("0.224794592901")) < 1e-9
    s = mpmath.sqrt(d)
    total = 1 + 2 * s + sum(s ** (l * l) for l in range(2, 60))
    assert abs(total - 2) < 1e-9


def test_growth_rate_matches_collision_y():
    """Coefficient ratio of the leading root series approaches 1/y* where
    y* is the collision ordinate."""
    xi = xi0(500)
    ratio = mpmath.mpf(int(xi[500])) / mpmath.mpf(int(xi[499]))
    ystar = mpmath.mpf("0.309249338600")
    assert abs(ratio * ystar - 1) < 0.01
