"""Numeric companions to the exact machinery: real-root isolation for the
b_m(alpha) polynomials, the Figure-type grid scan with its envelope, the
theta/theta' collision point, and the delta_1 threshold.

Root isolation is exact (Sturm sequences over the rationals); only the
final refinement and the two transcendental solves use high-precision
floating point, with the working precision doubled until two runs agree."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from gmpy2 import mpq

from .domains import poly_divmod, poly_eval, poly_gcd, poly_strip
from .roots import solve_rr, triangular
from .transforms import b_polys


# ---------------------------------------------------------------------------
# Sturm sequences over exact rationals
# ---------------------------------------------------------------------------

def poly_derivative(p):
    return poly_strip(tuple(p[i] * i for i in range(1, len(p))))


def square_free_part(p):
    g = poly_gcd(p, poly_derivative(p))
    if len(g) <= 1:
        return p
    q, r = poly_divmod(p, g)
    assert not r
    return q


def _primitive_int(p):
    """Scale by a positive rational so coefficients are integers with
    content 1; sign behavior is unchanged."""
    from .domains import _poly_to_zz

    if not p:
        return ()
    zz = _poly_to_zz(p)
    # _poly_to_zz uses a positive common denominator and positive content
    if (zz[-1] > 0) != (p[-1] > 0):
        zz = tuple(-c for c in zz)
    return zz


def sturm_chain(p):
    """Sturm chain normalized to primitive integer polynomials."""
    chain = [p, poly_derivative(p)]
    while chain[-1]:
        _, r = poly_divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append(tuple(-c for c in r))
    return [_primitive_int(q) for q in chain]


def _sign(x):
    return (x > 0) - (x < 0)


def _sign_at(zp, x):
    """Sign of an integer polynomial at a rational point, by homogenized
    integer Horner."""
    x = mpq(x)
    a, b = x.numerator, x.denominator
    d = len(zp) - 1
    bp = [1] * (d + 1)
    for i in range(1, d + 1):
        bp[i] = bp[i - 1] * b
    s = 0
    for i in range(d, -1, -1):
        s = s * a + zp[i] * bp[d - i]
    return _sign(s)


def _variations_at(chain, x):
    return _count_variations([_sign_at(p, x) for p in chain])


def _variations_at_inf(chain, positive):
    signs = []
    for p in chain:
        if not p:
            signs.append(0)
            continue
        s = _sign(p[-1])
        if not positive and (len(p) - 1) % 2 == 1:
            s = -s
        signs.append(s)
    return _count_variations(signs)


def _count_variations(signs):
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(p, lo=None, hi=None):
    """Number of distinct real roots of p in (lo, hi]; None endpoints mean
    the corresponding infinity."""
    p = square_free_part(poly_strip(p))
    if len(p) <= 1:
        return 0
    chain = sturm_chain(p)
    va = _variations_at(chain, lo) if lo is not None else _variations_at_inf(chain, False)
    vb = _variations_at(chain, hi) if hi is not None else _variations_at_inf(chain, True)
    return va - vb


def largest_real_root(p, tol):
    """Greatest real root of an AlphaPoly (or coefficient sequence) to
    absolute tolerance tol, or None when there are no real roots."""
    coeffs = poly_strip(tuple(mpq(c) for c in getattr(p, "coeffs", p)))
    if not coeffs:
        raise ValueError("zero polynomial has no well-defined roots")
    if len(coeffs) == 1:
        return None
    tol = mpq(tol)
    q = square_free_part(coeffs)
    chain = sturm_chain(q)
    lead = q[-1]
    bound = 1 + max(abs(c / lead) for c in q[:-1]) if len(q) > 1 else mpq(1)
    lo, hi = -bound, bound
    total = _variations_at(chain, lo) - _variations_at(chain, hi)
    if total == 0:
        return None
    # walk toward the rightmost root: keep the upper subinterval while it
    # still contains a root
    v_hi = _variations_at(chain, hi)
    while True:
        in_interval = _variations_at(chain, lo) - v_hi
        if in_interval == 1:
            break
        mid = (lo + hi) / 2
        v_mid = _variations_at(chain, mid)
        if v_mid - v_hi >= 1:
            lo = mid
        else:
            hi, v_hi = mid, v_mid
    # single-root interval (lo, hi]: refine by sign bisection
    zq = chain[0]
    s_hi = _sign_at(zq, hi)
    if s_hi == 0:
        return hi
    while hi - lo > tol:
        mid = (lo + hi) / 2
        v = _sign_at(zq, mid)
        if v == 0:
            return mid
        if v == s_hi:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


# ---------------------------------------------------------------------------
# grid scan over q
# ---------------------------------------------------------------------------

@dataclass
class RootScanRow:
    q: object  # exact rational grid point
    m: int
    root: object  # mpq approximation of the largest real root, or None


def scan_point(q, m_max, tol):
    """Rows for a single grid q: largest real root of b_m for 2 <= m <= m_max."""
    trace = solve_rr(m_max, q=q)
    bs = b_polys(trace.final, m_max)
    rows = []
    for m in range(2, m_max + 1):
        bm = bs[m - 1]
        root = None if bm.is_zero() else largest_real_root(bm, tol)
        rows.append(RootScanRow(q=mpq(q), m=m, root=root))
    return rows


def figure1_scan(q_lo, q_hi, step, m_max, tol, pool_map=None):
    """Largest real roots of b_m(alpha) on a rational q-grid.

    Returns (rows, envelope) with rows ordered q-major then m, and
    envelope a list of (q, max root over m) pairs ("alpha_star lower
    estimate"; cells without any real root are skipped in the max).
    pool_map may supply a parallel map; output is order-independent of it.
    """
    q_lo, q_hi, step = mpq(q_lo), mpq(q_hi), mpq(step)
    if q_lo <= -1:
        raise ValueError("grid must stay right of q = -1")
    grid = []
    q = q_lo
    while q <= q_hi:
        grid.append(q)
        q += step
    mapper = pool_map if pool_map is not None else lambda fn, xs: map(fn, xs)
    per_point = list(mapper(lambda qq: scan_point(qq, m_max, tol), grid))
    rows = [r for chunk in per_point for r in chunk]
    envelope = []
    for q, chunk in zip(grid, per_point):
        present = [r.root for r in chunk if r.root is not None]
        envelope.append((q, max(present) if present else None))
    return rows, envelope


# ---------------------------------------------------------------------------
# collision point of the first two roots
# ---------------------------------------------------------------------------

def _theta_terms(x, y, eps):
    """Yield (n, x^n * y^T(n)) until the terms drop below eps."""
    n = 0
    term = mpmath.mpf(1)
    ax, ay = abs(x), abs(y)
    while True:
        yield n, (x**n) * (y ** triangular(n))
        n += 1
        bound = (ax**n) * (ay ** triangular(n))
        if bound < eps and n > 4:
            return


def _theta_and_derivs(x, y, eps):
    f = fx = fy = fxx = fxy = mpmath.mpf(0)
    for n, t in _theta_terms(x, y, eps):
        T = triangular(n)
        f += t
        if n >= 1:
            fx += n * t / x
            fxx += n * (n - 1) * t / (x * x)
        if T >= 1:
            fy += T * t / y
            fxy += n * T * t / (x * y)
    return f, fx, fy, fxx, fxy


def _collision_once(tol_digits):
    with mpmath.workdps(tol_digits):
        eps = mpmath.mpf(10) ** (-(tol_digits + 10))
        x, y = mpmath.mpf("-2.3"), mpmath.mpf("0.31")
        for _ in range(200):
            f, fx, fy, fxx, fxy = _theta_and_derivs(x, y, eps)
            # solve J * (dx, dy) = -(f, fx); J = [[fx, fy], [fxx, fxy]]
            det = fx * fxy - fy * fxx
            dx = (-f * fxy + fx * fy) / det
            dy = (-fx * fx + f * fxx) / det
            norm0 = abs(f) + abs(fx)
            lam = mpmath.mpf(1)
            while lam > mpmath.mpf(2) ** -30:
                nx, ny = x + lam * dx, y + lam * dy
                nf, nfx, _, _, _ = _theta_and_derivs(nx, ny, eps)
                if abs(nf) + abs(nfx) < norm0:
                    break
                lam /= 2
            x, y = x + lam * dx, y + lam * dy
            if abs(dx) + abs(dy) < mpmath.mpf(10) ** (-(tol_digits - 5)):
                return x, y
        raise RuntimeError("collision-point Newton did not converge")


def collision_point(tol):
    """The simultaneous zero of the partial theta sum and its x-derivative
    near (-2.32, 0.309), to absolute tolerance tol per coordinate."""
    tol = mpmath.mpf(str(tol))
    digits = 30
    prev = None
    while digits <= 2000:
        cur = _collision_once(digits)
        if prev is not None:
            if abs(cur[0] - prev[0]) < tol / 4 and abs(cur[1] - prev[1]) < tol / 4:
                return cur
        prev = cur
        digits *= 2
    raise RuntimeError("collision-point precision doubling did not settle")


# ---------------------------------------------------------------------------
# delta_1
# ---------------------------------------------------------------------------

def _lattice_sum(s, eps):
    """1 + 2s + sum_{l >= 2} s^(l^2); increasing in s on (0, 1)."""
    total = 1 + 2 * s
    ell = 2
    while True:
        t = s ** (ell * ell)
        if t < eps:
            return total
        total += t
        ell += 1


def _delta1_once(digits):
    with mpmath.workdps(digits):
        eps = mpmath.mpf(10) ** (-(digits + 10))
        lo, hi = mpmath.mpf("0.01"), mpmath.mpf("0.99")
        target = mpmath.mpf(2)
        goal = mpmath.mpf(10) ** (-(digits - 5))
        while hi - lo > goal:
            mid = (lo + hi) / 2
            if _lattice_sum(mid, eps) < target:
                lo = mid
            else:
                hi = mid
        s = (lo + hi) / 2
        return s * s


def delta1(tol):
    """The positive solution of sum_{l=-1}^inf delta^(l^2 / 2) = 2, found
    after the substitution s = sqrt(delta)."""
    tol = mpmath.mpf(str(tol))
    digits = 25
    prev = None
    while digits <= 2000:
        cur = _delta1_once(digits)
        if prev is not None and abs(cur - prev) < tol / 4:
            return cur
        prev = cur
        digits *= 2
    raise RuntimeError("delta1 precision doubling did not settle")
