"""q-Pochhammer machinery, the partial theta function and its relatives,
and machine verification of the classical identities they satisfy.

Bivariate objects (polynomials in x or t whose coefficients are y-series)
are represented by XPoly; the trivariate checks additionally use y-series
whose coefficients are truncated q-series (QTrunc), never a general
multivariate engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from gmpy2 import mpq, mpz

from .domains import INT, RAT, RATFUN, DomainError, QTrunc, QTruncDomain, RatFun
from .report import Stopwatch, verdict
from .series import TruncSeries, invert, mul

INFINITY = None  # sentinel for infinite Pochhammer products


def triangular(n):
    return n * (n - 1) // 2


# ---------------------------------------------------------------------------
# q-Pochhammer and q-binomial in base y
# ---------------------------------------------------------------------------

def qpoch(t, n, N, domain=INT):
    """(t; y)_n = prod_{j=0}^{n-1} (1 - t*y^j), truncated at order N.

    t is a TruncSeries in y; pass n=None for the infinite product, which is
    truncated once t*y^j no longer contributes below order N.
    """
    if isinstance(t, TruncSeries):
        domain = t.domain
    else:
        t = TruncSeries(domain, N, [t])
    t = t.pad(N) if t.order < N else t.truncate(N)
    result = TruncSeries.one(domain, N)
    if n is INFINITY:
        v = t.valuation()
        if v > N:
            return result
        count = N - v + 1
    else:
        if n < 0:
            raise ValueError("qpoch needs n >= 0 or n=None")
        count = n
    for j in range(count):
        result = result - mul(result, t.shift(j))
    return result


def pochhammer_y(n, N, domain=INT):
    """(y; y)_n (n=None for infinity), truncated at order N."""
    return qpoch(TruncSeries.monomial(domain, N, 1), n, N, domain)


def qbinom(n, k, N):
    """Gaussian binomial coefficient as an integer polynomial in y of degree
    k*(n-k), returned as an int-domain series of order N (which must be at
    least the degree)."""
    if not 0 <= k <= n:
        raise ValueError("qbinom requires 0 <= k <= n")
    deg = k * (n - k)
    if N < deg:
        raise ValueError("qbinom(%d,%d) has degree %d > order %d" % (n, k, deg, N))
    work = max(deg, 1)
    num = pochhammer_y(n, work, RAT)
    den = mul(pochhammer_y(k, work, RAT), pochhammer_y(n - k, work, RAT))
    qb = mul(num, invert(den))
    coeffs = []
    for c in qb.coeffs:
        if c.denominator != 1:
            raise ArithmeticError("qbinom division was not exact")
        coeffs.append(mpz(c))
    return TruncSeries(INT, N, coeffs)


def qbinom_row(n, N):
    """All qbinom(n, k) for k = 0..n by the Pascal-type recurrence, as
    int-domain series of order N."""
    row = [TruncSeries.one(INT, N)]
    for r in range(1, n + 1):
        new = [row[0]]
        for k in range(1, r):
            new.append(row[k - 1] + row[k].shift(k))
        new.append(row[r - 1])
        row = new
    return row


# ---------------------------------------------------------------------------
# SeriesInX: series in x whose coefficients are y-series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesInX:
    """f(x,y) = sum a_n(y) x^n with recorded y-valuation lower bounds; only
    the x-powers whose valuation does not exceed order_y are retained."""

    coeffs_x: tuple
    order_y: int
    valuations: tuple
    normalized: bool = True

    def __post_init__(self):
        if self.normalized:
            d = self.coeffs_x[0].domain
            one = d.one()
            if self.coeffs_x[0][0] != one or self.coeffs_x[1][0] != one:
                raise ValueError("normalized SeriesInX needs a_0(0) = a_1(0) = 1")
            for a in self.coeffs_x[2:]:
                if not d.is_zero(a[0]):
                    raise ValueError("normalized SeriesInX needs a_n(0) = 0, n >= 2")

    @property
    def domain(self):
        return self.coeffs_x[0].domain

    def n_terms(self):
        return len(self.coeffs_x)


def theta0(N, domain=INT):
    """Partial theta sum: a_n(y) = y^(n(n-1)/2), retained while the exponent
    stays within order N."""
    coeffs, vals = [], []
    n = 0
    while triangular(n) <= N:
        coeffs.append(TruncSeries.monomial(domain, N, triangular(n)))
        vals.append(triangular(n))
        n += 1
    return SeriesInX(tuple(coeffs), N, tuple(vals))


def deformed_exp(N, domain=RAT):
    """a_n(y) = y^(n(n-1)/2) / n!."""
    if domain.tag == "int":
        raise DomainError("the deformed exponential needs a rational domain")
    coeffs, vals = [], []
    n = 0
    while triangular(n) <= N:
        coeffs.append(
            TruncSeries.monomial(domain, N, triangular(n), mpq(1, factorial(n)))
        )
        vals.append(triangular(n))
        n += 1
    return SeriesInX(tuple(coeffs), N, tuple(vals))


def q_int_poly(j):
    """1 + q + ... + q^(j-1) as an mpq coefficient tuple."""
    return tuple(mpq(1) for _ in range(j))


def rr_tilde(N, q="symbolic"):
    """Rescaled three-variable Rogers-Ramanujan series:
    a_n(y) = y^(n(n-1)/2) / prod_{j=2}^n (1 + q + ... + q^(j-1)).

    q="symbolic" works over rational functions in q; a rational q works over
    the rationals and must not annihilate any denominator (q != -1).
    """
    coeffs, vals = [], []
    if q == "symbolic":
        den = RatFun.const(1)
        n = 0
        while triangular(n) <= N:
            if n >= 2:
                den = den * RatFun(q_int_poly(n))
            coeffs.append(
                TruncSeries.monomial(RATFUN, N, triangular(n), den.reciprocal())
            )
            vals.append(triangular(n))
            n += 1
        return SeriesInX(tuple(coeffs), N, tuple(vals))
    qv = mpq(q)
    den = mpq(1)
    n = 0
    while triangular(n) <= N:
        if n >= 2:
            factor = sum(qv**i for i in range(n))
            if factor == 0:
                raise ZeroDivisionError("denominator vanishes at q=%s (n=%d)" % (q, n))
            den *= factor
        coeffs.append(TruncSeries.monomial(RAT, N, triangular(n), 1 / den))
        vals.append(triangular(n))
        n += 1
    return SeriesInX(tuple(coeffs), N, tuple(vals))


def evaluate_at_neg_xi(f, xi):
    """f(-xi(y), y) as a y-series: sum (-1)^n a_n(y) xi^n."""
    N = xi.order
    acc = TruncSeries.zero(xi.domain, N)
    power = TruncSeries.one(xi.domain, N)
    for n, a in enumerate(f.coeffs_x):
        if n > 0:
            power = mul(power, xi)
        term = _scale_by_coeff_series(power, a.truncate(N))
        acc = acc + term if n % 2 == 0 else acc - term
    return acc


def _scale_by_coeff_series(s, a):
    return mul(s, a)


# ---------------------------------------------------------------------------
# XPoly: polynomial in an outer variable with y-series coefficients
# ---------------------------------------------------------------------------

class XPoly:
    """Truncated polynomial in x (degree <= xdeg) over y-series of a common
    order and domain."""

    __slots__ = ("domain", "order_y", "xdeg", "c")

    def __init__(self, domain, order_y, xdeg, coeffs=()):
        self.domain = domain
        self.order_y = order_y
        self.xdeg = xdeg
        c = list(coeffs)[: xdeg + 1]
        while len(c) < xdeg + 1:
            c.append(TruncSeries.zero(domain, order_y))
        self.c = tuple(c)

    @staticmethod
    def one(domain, order_y, xdeg):
        return XPoly(domain, order_y, xdeg, [TruncSeries.one(domain, order_y)])

    @staticmethod
    def zero(domain, order_y, xdeg):
        return XPoly(domain, order_y, xdeg, [])

    def __add__(self, other):
        return XPoly(
            self.domain,
            self.order_y,
            self.xdeg,
            [a + b for a, b in zip(self.c, other.c)],
        )

    def __sub__(self, other):
        return XPoly(
            self.domain,
            self.order_y,
            self.xdeg,
            [a - b for a, b in zip(self.c, other.c)],
        )

    def __neg__(self):
        return XPoly(self.domain, self.order_y, self.xdeg, [-a for a in self.c])

    def __mul__(self, other):
        out = [TruncSeries.zero(self.domain, self.order_y) for _ in range(self.xdeg + 1)]
        for i, a in enumerate(self.c):
            if not a.is_zero():
                for j in range(self.xdeg + 1 - i):
                    b = other.c[j]
                    if not b.is_zero():
                        out[i + j] = out[i + j] + mul(a, b)
        return XPoly(self.domain, self.order_y, self.xdeg, out)

    def scale_series(self, s):
        """Multiply every x-coefficient by the y-series s."""
        return XPoly(
            self.domain, self.order_y, self.xdeg, [mul(a, s) for a in self.c]
        )

    def scale_coeff(self, c):
        return XPoly(self.domain, self.order_y, self.xdeg, [a.scale(c) for a in self.c])

    def shift_x(self, k, sign=1):
        """Multiply by (sign * x)^k."""
        zeros = [TruncSeries.zero(self.domain, self.order_y)] * k
        kept = self.c[: self.xdeg + 1 - k]
        if sign < 0 and k % 2 == 1:
            kept = [-a for a in kept]
        return XPoly(self.domain, self.order_y, self.xdeg, zeros + list(kept))

    def mul_sparse(self, coeff, ypow):
        """Multiply by (1 + coeff * x * y^ypow) in O(xdeg) series shifts."""
        out = list(self.c)
        for i in range(self.xdeg, 0, -1):
            prev = self.c[i - 1]
            if not prev.is_zero():
                out[i] = out[i] + prev.shift(ypow).scale(coeff)
        return XPoly(self.domain, self.order_y, self.xdeg, out)

    def invert(self):
        """Triangular inverse in x; the x^0 coefficient must be invertible
        as a y-series."""
        b0 = invert(self.c[0])
        out = [b0]
        for k in range(1, self.xdeg + 1):
            s = TruncSeries.zero(self.domain, self.order_y)
            for j in range(1, k + 1):
                if not self.c[j].is_zero():
                    s = s + mul(self.c[j], out[k - j])
            out.append(-mul(b0, s))
        return XPoly(self.domain, self.order_y, self.xdeg, out)

    def subs_x_equals_y(self):
        """Substitute x -> y; exact only to y-order xdeg (dropped x-powers
        carry at least that valuation)."""
        N = min(self.order_y, self.xdeg)
        acc = TruncSeries.zero(self.domain, N)
        for j, a in enumerate(self.c):
            acc = acc + a.truncate(N).shift(j)
        return acc

    def __eq__(self, other):
        return isinstance(other, XPoly) and self.c == other.c

    def __repr__(self):
        return "XPoly(xdeg=%d, order_y=%d, %s)" % (self.xdeg, self.order_y, self.c)


def first_fail_xpoly(lhs, rhs, var_names=("x", "y")):
    """First (x_power, y_power) where two XPolys disagree, or None."""
    for ypow in range(min(lhs.order_y, rhs.order_y) + 1):
        for xpow in range(min(lhs.xdeg, rhs.xdeg) + 1):
            a = lhs.c[xpow][ypow]
            b = rhs.c[xpow][ypow]
            if a != b:
                return {
                    "var_powers": {var_names[0]: xpow, var_names[1]: ypow},
                    "lhs": str(a),
                    "rhs": str(b),
                }
    return None


def first_fail_series(lhs, rhs, var="y"):
    idx = lhs.first_difference(rhs)
    if idx is None:
        return None
    return {
        "var_powers": {var: idx},
        "lhs": str(lhs[idx]),
        "rhs": str(rhs[idx]),
    }


# ---------------------------------------------------------------------------
# identity checkers
# ---------------------------------------------------------------------------

def _theta0_xpoly(N, D):
    terms = []
    for n in range(D + 1):
        terms.append(TruncSeries.monomial(INT, N, triangular(n)))
    return XPoly(INT, N, D, terms)


def _inv_poch_list(N, kmax, domain=INT):
    """[1/(y;y)_k for k = 0..kmax] at order N."""
    out = [TruncSeries.one(domain, N)]
    prod = TruncSeries.one(domain, N)
    for k in range(1, kmax + 1):
        prod = prod - prod.shift(k)
        out.append(invert(prod))
    return out


def _poch_inf_shifted(N, D, k):
    """(-x*y^k; y)_infinity as an XPoly: prod_{j>=k} (1 + x y^j)."""
    p = XPoly.one(INT, N, D)
    for j in range(k, N + 1):
        p = p.mul_sparse(1, j)
    return p


def identity1_rhs(N, D, mutation=None):
    """(y;y)_inf * sum_k y^k / (y;y)_k * (-x y^k; y)_inf, using the
    removable-singularity rewrite of the infinite Pochhammer quotient."""
    invpoch = _inv_poch_list(N, N)
    acc = XPoly.zero(INT, N, D)
    # build (-x y^k; y)_inf downward so each k costs one sparse factor
    p = XPoly.one(INT, N, D)
    partials = [None] * (N + 1)
    for k in range(N, -1, -1):
        p = p.mul_sparse(1, k)
        partials[k] = p
    for k in range(N + 1):
        if mutation == "drop-n1" and k == 1:
            continue
        acc = acc + partials[k].scale_series(invpoch[k].shift(k))
    return acc.scale_series(pochhammer_y(INFINITY, N))


def identity2_rhs(N, D, mutation=None):
    """sum_n (-x)^n y^(n^2) / (y;y)_n * (-x y^n; y)_inf."""
    invpoch = _inv_poch_list(N, N)
    acc = XPoly.zero(INT, N, D)
    p = XPoly.one(INT, N, D)
    partials = [None] * (N + 1)
    for k in range(N, -1, -1):
        p = p.mul_sparse(1, k)
        partials[k] = p
    n = 0
    while n * n <= N and n <= D:
        sign = 1 if mutation == "flip-sign" else (-1) ** n
        term = partials[n].scale_series(invpoch[n].shift(n * n))
        acc = acc + term.shift_x(n, sign=sign) if n else acc + term
        n += 1
    return acc


def check_identity1(N, mutation=None):
    with Stopwatch() as sw:
        D = _max_theta_degree(N)
        lhs = _theta0_xpoly(N, D)
        rhs = identity1_rhs(N, D, mutation)
        fail = first_fail_xpoly(lhs, rhs)
    return verdict("identity1", N, fail, wall_ms=sw.ms)


def check_identity2(N, mutation=None):
    with Stopwatch() as sw:
        D = _max_theta_degree(N)
        lhs = _theta0_xpoly(N, D)
        rhs = identity2_rhs(N, D, mutation)
        fail = first_fail_xpoly(lhs, rhs)
    return verdict("identity2", N, fail, wall_ms=sw.ms)


def _max_theta_degree(N):
    n = 0
    while triangular(n + 1) <= N:
        n += 1
    return n


def check_finite_identities(N_max, mutation=None):
    """Finite-sum analogues, verified for every N <= N_max as exact
    polynomial identities after clearing the (y;y) denominators."""
    with Stopwatch() as sw:
        fail = None
        for Nf in range(N_max + 1):
            f = _check_finite_single(Nf, mutation)
            if f is not None:
                f["var_powers"]["N"] = Nf
                fail = f
                break
    return verdict("finite-identities", N_max, fail, wall_ms=sw.ms)


def _check_finite_single(Nf, mutation=None):
    ydeg = triangular(Nf) + Nf * (Nf + 1) // 2 + 1
    D = Nf
    # LHS * (y;y)_N = sum_n x^n y^T(n) prod_{j=N-n+1}^{N} (1-y^j)
    lhs = XPoly.zero(INT, ydeg, D)
    tailprod = TruncSeries.one(INT, ydeg)  # prod_{j=N-n+1}^{N}(1-y^j)
    for n in range(Nf + 1):
        if n >= 1:
            j = Nf - n + 1
            tailprod = tailprod - tailprod.shift(j)
        term = tailprod.shift(triangular(n))
        lhs = lhs + XPoly(INT, ydeg, D, [TruncSeries.zero(INT, ydeg)] * n + [term])
    # common factor prod_{j=n}^{N-1} (1 + x y^j), built downward over n
    xprods = [None] * (Nf + 1)
    p = XPoly.one(INT, ydeg, D)
    xprods[Nf] = p
    for n in range(Nf - 1, -1, -1):
        p = p.mul_sparse(1, n)
        xprods[n] = p
    # RHS1 * (y;y)_N = sum_n y^n prod_{j=n+1}^{N}(1-y^j) * xprods[n]
    rhs1 = XPoly.zero(INT, ydeg, D)
    headprod = TruncSeries.one(INT, ydeg)  # prod_{j=n+1}^{N}(1-y^j), built downward
    heads = [None] * (Nf + 1)
    heads[Nf] = headprod
    for n in range(Nf - 1, -1, -1):
        headprod = heads[n + 1] - heads[n + 1].shift(n + 1)
        heads[n] = headprod
    for n in range(Nf + 1):
        if mutation == "drop-last" and n == Nf and Nf > 0:
            continue
        rhs1 = rhs1 + xprods[n].scale_series(heads[n].shift(n))
    # RHS2 * (y;y)_N = sum_n (-x)^n y^(n^2) qbinom(N, n) * xprods[n]
    rhs2 = XPoly.zero(INT, ydeg, D)
    qrow = qbinom_row(Nf, ydeg)
    for n in range(Nf + 1):
        term = xprods[n].scale_series(qrow[n].shift(n * n))
        rhs2 = rhs2 + (term.shift_x(n, sign=-1) if n else term)
    f = first_fail_xpoly(lhs, rhs1)
    if f is not None:
        f["side"] = "finite-identity-1"
        return f
    f = first_fail_xpoly(lhs, rhs2)
    if f is not None:
        f["side"] = "finite-identity-2"
        return f
    return None


def check_euler_identities(N, D=12, mutation=None):
    """Euler's two identities with t an independent indeterminate of degree
    <= D and y-order <= N."""
    with Stopwatch() as sw:
        invpoch = _inv_poch_list(N, D)
        # (t; y)_inf as a t-polynomial: prod_{j=0}^{N} (1 - t y^j)
        E = XPoly.one(INT, N, D)
        for j in range(N + 1):
            E = E.mul_sparse(-1, j)
        rhs1 = XPoly.zero(INT, N, D)
        rhs2 = XPoly.zero(INT, N, D)
        for n in range(D + 1):
            if mutation == "drop-n1" and n == 1:
                continue
            t1 = XPoly(
                INT, N, D, [TruncSeries.zero(INT, N)] * n + [invpoch[n]]
            )
            rhs1 = rhs1 + t1
            t2 = invpoch[n].shift(triangular(n))
            t2x = XPoly(INT, N, D, [TruncSeries.zero(INT, N)] * n + [t2])
            rhs2 = rhs2 + (t2x if n % 2 == 0 else -t2x)
        fail = first_fail_xpoly(E.invert(), rhs1, ("t", "y"))
        if fail is not None:
            fail["side"] = "euler-1"
        else:
            fail = first_fail_xpoly(E, rhs2, ("t", "y"))
            if fail is not None:
                fail["side"] = "euler-2"
    return verdict("euler-identities", N, fail, wall_ms=sw.ms)


# ---------------------------------------------------------------------------
# trivariate checks (series in q as the innermost coefficients)
# ---------------------------------------------------------------------------

def _qpoch_q(alpha, n, qd):
    """(alpha; q)_n as a QTrunc (n=None: infinite product)."""
    Nq = qd.q_order
    one = qd.one()
    result = one
    if n is INFINITY:
        v = next((i for i, c in enumerate(alpha.c) if c != 0), Nq + 1)
        if v == 0:
            raise DomainError("infinite Pochhammer needs q-valuation >= 1")
        count = max(Nq - v + 1, 0)
    else:
        count = n
    qpow = qd.one()
    qvar = QTrunc.var_power(Nq, 1)
    for j in range(count):
        result = result - result * (alpha * qpow)
        qpow = qpow * qvar
    return result


def _scale_pure_y(xp, rat_series):
    """Scale an XPoly over a QTrunc domain by a rational-coefficient
    y-series (cheap: per-pair work is a QTrunc scale, not a full product)."""
    qd = xp.domain
    N = xp.order_y
    out = []
    for a in xp.c:
        if a.is_zero():
            out.append(a)
            continue
        acc = [qd.zero() for _ in range(N + 1)]
        for i, r in enumerate(rat_series.coeffs):
            if r:
                for j in range(N + 1 - i):
                    cj = a[j]
                    if not cj.is_zero():
                        acc[i + j] = acc[i + j] + cj.scale(r)
        out.append(TruncSeries(qd, N, acc))
    return XPoly(qd, N, xp.xdeg, out)


def _scale_pure_q(xp, scalar):
    """Scale an XPoly over a QTrunc domain by a QTrunc scalar."""
    return XPoly(
        xp.domain,
        xp.order_y,
        xp.xdeg,
        [a.scale(scalar) if not a.is_zero() else a for a in xp.c],
    )


def _y_monomial_q(qd, N, k, scalar=None):
    c = [qd.zero()] * (N + 1)
    if k <= N:
        c[k] = scalar if scalar is not None else qd.one()
    return TruncSeries(qd, N, c)


def check_lemma_R(N, D_x, a_series, alpha=None, N_q=None, mutation=None, id="lemma-R"):
    """Rearrangement lemma sum a_n x^n / (alpha;q)_n =
    (alpha;q)_inf^{-1} * sum_l (-alpha)^l q^(l(l-1)/2) / (q;q)_l *
    sum_n a_n (q^l x)^n, for a caller-supplied finite coefficient list."""
    if N_q is None:
        N_q = N
    qd = QTruncDomain(N_q)
    with Stopwatch() as sw:
        if alpha is None:
            alpha = QTrunc.var_power(N_q, 1)
        qq_inv = _inv_qq_list(qd, D_x + N_q + 2)
        lhs = XPoly.zero(qd, N, D_x)
        for n, a in enumerate(a_series[: D_x + 1]):
            inv_n = qd.inv(_qpoch_q(alpha, n, qd))
            col = [TruncSeries.zero(qd, N)] * n + [
                TruncSeries(qd, N, [inv_n * c for c in a.coeffs])
            ]
            lhs = lhs + XPoly(qd, N, D_x, col)
        inv_inf = qd.inv(_qpoch_q(alpha, INFINITY, qd))
        rhs = XPoly.zero(qd, N, D_x)
        alpha_val = next((i for i, c in enumerate(alpha.c) if c != 0), N_q + 1)
        ell = 0
        while ell * alpha_val + triangular(ell) <= N_q:
            sign = 1 if (mutation == "flip-sign") else (-1) ** ell
            scal = qd.one()
            for _ in range(ell):
                scal = scal * alpha
            scal = scal * QTrunc.var_power(N_q, triangular(ell), sign)
            scal = scal * qq_inv[ell]
            inner = XPoly.zero(qd, N, D_x)
            qln = qd.one()
            ql = QTrunc.var_power(N_q, ell) if ell else qd.one()
            for n, a in enumerate(a_series[: D_x + 1]):
                if n:
                    qln = qln * ql
                col = [TruncSeries.zero(qd, N)] * n + [
                    TruncSeries(qd, N, [qln * c for c in a.coeffs])
                ]
                inner = inner + XPoly(qd, N, D_x, col)
            rhs = rhs + _scale_pure_q(inner, scal)
            ell += 1
        rhs = _scale_pure_q(rhs, inv_inf)
        fail = _first_fail_xyq(lhs, rhs)
    return verdict(id, N, fail, wall_ms=sw.ms)


def _inv_qq_list(qd, lmax):
    """[1/(q;q)_l for l = 0..lmax] as QTruncs."""
    Nq = qd.q_order
    out = [qd.one()]
    prod = qd.one()
    for l in range(1, lmax + 1):
        if l <= Nq:
            prod = prod - prod * QTrunc.var_power(Nq, l)
            out.append(qd.inv(prod))
        else:
            # (q;q)_l stabilizes mod q^(Nq+1) once l exceeds the order
            out.append(out[Nq])
    return out


def _first_fail_xyq(lhs, rhs):
    for ypow in range(min(lhs.order_y, rhs.order_y) + 1):
        for xpow in range(min(lhs.xdeg, rhs.xdeg) + 1):
            a = lhs.c[xpow][ypow]
            b = rhs.c[xpow][ypow]
            if a != b:
                for qpow in range(a.order + 1):
                    if a.c[qpow] != b.c[qpow]:
                        return {
                            "var_powers": {"x": xpow, "y": ypow, "q": qpow},
                            "lhs": str(a.c[qpow]),
                            "rhs": str(b.c[qpow]),
                        }
    return None


def _R_lhs(qd, N, D_x):
    """R(x,y,q) = sum x^n y^T(n) / (q;q)_n, triple-truncated."""
    qq_inv = _inv_qq_list(qd, D_x)
    acc = XPoly.zero(qd, N, D_x)
    for n in range(D_x + 1):
        col = [TruncSeries.zero(qd, N)] * n + [
            _y_monomial_q(qd, N, triangular(n), qq_inv[n])
        ]
        acc = acc + XPoly(qd, N, D_x, col)
    return acc


def check_cor_R_theta(N, D_x, N_q=None, mutation=None):
    """R(x,y,q) expressed through the partial theta sum at arguments x q^l."""
    if N_q is None:
        N_q = N
    qd = QTruncDomain(N_q)
    with Stopwatch() as sw:
        lhs = _R_lhs(qd, N, D_x)
        qq_inv = _inv_qq_list(qd, max(D_x, N_q) + 1)
        inv_inf = _inv_qq_inf(qd)
        rhs = XPoly.zero(qd, N, D_x)
        ell = 0
        while triangular(ell + 1) <= N_q:
            sign = 1 if mutation == "flip-sign" else (-1) ** ell
            scal = QTrunc.var_power(qd.q_order, triangular(ell + 1), sign) * qq_inv[ell]
            inner = XPoly.zero(qd, N, D_x)
            for n in range(D_x + 1):
                qln = QTrunc.var_power(qd.q_order, ell * n) if ell * n else qd.one()
                col = [TruncSeries.zero(qd, N)] * n + [
                    _y_monomial_q(qd, N, triangular(n), qln)
                ]
                inner = inner + XPoly(qd, N, D_x, col)
            rhs = rhs + _scale_pure_q(inner, scal)
            ell += 1
        rhs = _scale_pure_q(rhs, inv_inf)
        fail = _first_fail_xyq(lhs, rhs)
    return verdict("cor-R-theta", N, fail, wall_ms=sw.ms)


def _inv_qq_inf(qd):
    Nq = qd.q_order
    prod = qd.one()
    for j in range(1, Nq + 1):
        prod = prod - prod * QTrunc.var_power(Nq, j)
    return qd.inv(prod)


def _poch_inf_xq(qd, N, D_x, ell, start):
    """(-x q^l y^start; y)_inf = prod_{j>=start} (1 + x q^l y^j)."""
    p = XPoly.one(qd, N, D_x)
    ql = QTrunc.var_power(qd.q_order, ell) if ell else qd.one()
    for j in range(start, N + 1):
        p = p.mul_sparse(ql, j)
    return p


def check_cor_R_identities(N, D_x, N_q=None, mutation=None):
    """The two expansions of R(x,y,q) obtained by substituting the partial
    theta identities, verified as triple-truncated objects."""
    if N_q is None:
        N_q = N
    qd = QTruncDomain(N_q)
    with Stopwatch() as sw:
        lhs = _R_lhs(qd, N, D_x)
        qq_inv = _inv_qq_list(qd, N_q + 1)
        inv_inf_q = _inv_qq_inf(qd)
        invpoch_y = _inv_poch_list(N, N, RAT)
        yy_inf = pochhammer_y(INFINITY, N, RAT)
        rhs1 = XPoly.zero(qd, N, D_x)
        rhs2 = XPoly.zero(qd, N, D_x)
        ell = 0
        while triangular(ell + 1) <= N_q:
            sign = (-1) ** ell
            scal = QTrunc.var_power(qd.q_order, triangular(ell + 1), sign) * qq_inv[ell]
            # shared shifted infinite products, built downward over start
            partials = [None] * (N + 1)
            p = XPoly.one(qd, N, D_x)
            ql = QTrunc.var_power(qd.q_order, ell) if ell else qd.one()
            for start in range(N, -1, -1):
                p = p.mul_sparse(ql, start)
                partials[start] = p
            inner1 = XPoly.zero(qd, N, D_x)
            for n in range(N + 1):
                if mutation == "drop-n1" and n == 1:
                    continue
                inner1 = inner1 + _scale_pure_y(
                    partials[n], invpoch_y[n].shift(n)
                )
            rhs1 = rhs1 + _scale_pure_q(inner1, scal)
            inner2 = XPoly.zero(qd, N, D_x)
            n = 0
            while n * n <= N and n <= D_x:
                term = _scale_pure_y(partials[n], invpoch_y[n].shift(n * n))
                if n:
                    term = term.shift_x(n, sign=-1)
                    term = _scale_pure_q(
                        term, QTrunc.var_power(qd.q_order, ell * n)
                    ) if ell else term
                inner2 = inner2 + term
                n += 1
            rhs2 = rhs2 + _scale_pure_q(inner2, scal)
            ell += 1
        rhs1 = _scale_pure_y(_scale_pure_q(rhs1, inv_inf_q), yy_inf)
        rhs2 = _scale_pure_q(rhs2, inv_inf_q)
        fail = _first_fail_xyq(lhs, rhs1)
        if fail is not None:
            fail["side"] = "cor-R-1"
        else:
            fail = _first_fail_xyq(lhs, rhs2)
            if fail is not None:
                fail["side"] = "cor-R-2"
    return verdict("cor-R-identities", N, fail, wall_ms=sw.ms)


def default_lemma_vectors(qd, N, D_x):
    """The default a_n test vectors for the rearrangement lemma: all-ones,
    1/n!, and the partial theta weights y^(n(n-1)/2)."""
    ones = [TruncSeries(qd, N, [qd.one()]) for _ in range(D_x + 1)]
    inv_fact = [
        TruncSeries(qd, N, [qd.coerce(mpq(1, factorial(n)))]) for n in range(D_x + 1)
    ]
    theta = [_y_monomial_q(qd, N, triangular(n)) for n in range(D_x + 1)]
    return {"ones": ones, "inv-factorial": inv_fact, "theta-weights": theta}


def check_R_identities(N, D_x, N_q=None, mutation=None):
    """Run the rearrangement lemma on the default vectors plus the two
    corollary identities; returns a list of VerdictReports."""
    if N_q is None:
        N_q = N
    qd = QTruncDomain(N_q)
    reports = []
    vectors = default_lemma_vectors(qd, N, D_x)
    for name, vec in vectors.items():
        reports.append(
            check_lemma_R(
                N, D_x, vec, N_q=N_q, mutation=mutation, id="lemma-R[%s]" % name
            )
        )
    reports.append(check_cor_R_theta(N, D_x, N_q=N_q, mutation=mutation))
    reports.append(check_cor_R_identities(N, D_x, N_q=N_q, mutation=mutation))
    return reports
