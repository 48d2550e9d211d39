"""Solvers for the leading root xi0(y) of the partial theta sum and its
relatives, plus the closed-form bound series.

Four routes to xi0 are provided: the two classical comparison maps (slow,
kept as oracles and for iterate-level claims), the generic one-step
recursion for any normalized series-in-x, and a Newton solver with order
doubling (the production path for large orders).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq, mpz

from .domains import INT, RAT, RATFUN, DomainError, RatFun
from .series import TruncSeries, _mul_kronecker, invert, mul
from .qseries import (
    SeriesInX,
    evaluate_at_neg_xi,
    qbinom,
    theta0,
    triangular,
    rr_tilde,
)


# ---------------------------------------------------------------------------
# sparse helpers: multiply / divide by (1 - y^c)
# ---------------------------------------------------------------------------

def mul_one_minus(s, c):
    """s * (1 - y^c)."""
    return s - s.shift(c)


def div_one_minus(s, c):
    """s / (1 - y^c) = s * (1 + y^c + y^{2c} + ...), a prefix-sum pass."""
    out = list(s.coeffs)
    for i in range(c, s.order + 1):
        out[i] = out[i] + out[i - c]
    return TruncSeries(s.domain, s.order, out)


# ---------------------------------------------------------------------------
# the comparison maps
# ---------------------------------------------------------------------------

def _check_map_input(xi, N):
    c0 = xi.coeffs[0]
    if c0 != 0 and c0 != 1:
        raise ValueError("map input needs constant term 0 or 1")
    return xi.truncate(N) if xi.order != N else xi


def map_F(xi, N):
    """One application of 1 + sum_n y^n / [(y;y)_n prod_{j<n}(1-y^j xi)].

    The running term is updated incrementally: step n multiplies by
    y/(1-y^n) and by the inverse of (1 - y^{n-1} xi).
    """
    xi = _check_map_input(xi, N)
    d = xi.domain
    result = TruncSeries.one(d, N)
    cur = TruncSeries.one(d, N)
    for n in range(1, N + 1):
        cur = div_one_minus(cur.shift(1), n)
        if n >= 2:
            factor = TruncSeries.one(d, N) - xi.shift(n - 1)
            cur = mul(cur, invert(factor))
        result = result + cur
    return result


def map_G(xi, N):
    """One application of 1 + sum_n xi^n y^{n^2} / [(y;y)_n prod_{j<n}(1-y^j xi)]."""
    xi = _check_map_input(xi, N)
    d = xi.domain
    result = TruncSeries.one(d, N)
    cur = TruncSeries.one(d, N)
    n = 1
    while n * n <= N:
        # numerator gains xi * y^{2n-1}, denominator gains (1-y^n) and,
        # for n >= 2, the factor (1 - y^{n-1} xi)
        cur = div_one_minus(mul(cur, xi).shift(2 * n - 1), n)
        if n >= 2:
            factor = TruncSeries.one(d, N) - xi.shift(n - 1)
            cur = mul(cur, invert(factor))
        result = result + cur
        n += 1
    return result


_MAPS = {"mapF": (map_F, 3), "mapG": (map_G, 1)}


def map_iterates(method, init, N, count):
    """[xi^(0), ..., xi^(count)] for the named map at full order N."""
    fn, _ = _MAPS[method]
    cur = TruncSeries(INT, N, [init])
    out = [cur]
    for _ in range(count):
        cur = fn(cur, N)
        out.append(cur)
    return out


# ---------------------------------------------------------------------------
# solve traces
# ---------------------------------------------------------------------------

@dataclass
class RootSolveTrace:
    method: str
    init: str
    final: TruncSeries
    iterations: int
    iterates: list | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.final.coeffs[0] != self.final.domain.one():
            raise ValueError("leading root series must have constant term 1")


def residual(f, xi):
    """f(-xi(y), y); the zero series when xi is the leading root."""
    return evaluate_at_neg_xi(f, xi)


def _progressive_fixpoint(apply_fn, init_const, N, gain, domain=INT,
                          keep_iterates=False, max_iter=None):
    """Iterate a contraction with at least `gain` orders of agreement won
    per step, working at a growing truncation order.  Convergence is
    certified by two successive full-order iterates being identical."""
    if max_iter is None:
        max_iter = N + 3
    cur = TruncSeries(domain, min(N, gain + 1), [init_const])
    iterates = [cur] if keep_iterates else None
    k = 0
    while True:
        k += 1
        if k > max_iter:
            raise RuntimeError("fixpoint iteration failed to settle (internal error)")
        work = min(N, gain * (k + 1) + 1)
        nxt = apply_fn(cur.truncate(work), work)
        if work == N and cur.order == N and nxt.first_difference(cur) is None:
            return nxt, k, iterates
        if keep_iterates:
            iterates.append(nxt)
        cur = nxt


def solve_map(method, init, N, keep_iterates=False):
    """Leading root of the partial theta sum by iterating map F or map G."""
    fn, gain = _MAPS[method]
    final, k, iterates = _progressive_fixpoint(
        fn, init, N, gain, keep_iterates=keep_iterates
    )
    return RootSolveTrace(
        method=method,
        init="one" if init == 1 else "zero",
        final=final,
        iterations=k,
        iterates=iterates,
    )


# ---------------------------------------------------------------------------
# generic recursion for a normalized series-in-x
# ---------------------------------------------------------------------------

def _ahat(f, N):
    """Adjusted coefficient list: subtract 1 from a_0 and a_1 so every
    entry has positive valuation."""
    d = f.domain
    out = []
    for n, a in enumerate(f.coeffs_x):
        a = a.truncate(N)
        if n <= 1:
            a = a.add_scalar(-d.one())
        out.append(a)
    return out


def solve_generic(f, N, max_iter=None, keep_iterates=False):
    """Solve sum (-1)^n a_n(y) xi^n = 0 by the one-step recursion
    xi <- 1 + sum_n (-1)^n ahat_n(y) xi^n, iterated from xi = 1."""
    d = f.domain
    for n, a in enumerate(f.coeffs_x[:2]):
        if a[0] != d.one():
            raise ValueError("source series is not normalized")
    for a in f.coeffs_x[2:]:
        if not d.is_zero(a[0]):
            raise ValueError("source series is not normalized")

    def apply_fn(xi, work):
        ah = _ahat(f, work)
        D = len(ah) - 1
        acc = ah[D] if D % 2 == 0 else -ah[D]
        for n in range(D - 1, -1, -1):
            acc = mul(acc, xi)
            acc = acc + ah[n] if n % 2 == 0 else acc - ah[n]
        return acc.add_scalar(d.one())

    final, k, iterates = _progressive_fixpoint(
        apply_fn, 1, N, 1, domain=d, keep_iterates=keep_iterates,
        max_iter=max_iter,
    )
    res = residual(f, final)
    if not res.is_zero():
        raise RuntimeError("residual check failed (internal error)")
    return RootSolveTrace(
        method="generic", init="one", final=final, iterations=k,
        iterates=iterates,
    )


# ---------------------------------------------------------------------------
# Newton with order doubling for the partial theta sum
# ---------------------------------------------------------------------------

def _theta_eval_pair(xi, N):
    """Theta(-xi, y) and its x-derivative at x = -xi, via Horner over the
    O(sqrt N) contributing index terms."""
    d = xi.domain
    D = 0
    while triangular(D + 1) <= N:
        D += 1
    # value: sum (-1)^n y^T(n) xi^n ; derivative wrt x at x=-xi carries an
    # extra factor n and one fewer power of xi, with sign (-1)^(n-1)
    val = TruncSeries.zero(d, N)
    der = TruncSeries.zero(d, N)
    for n in range(D, 0, -1):
        val = mul(val, xi)
        der = mul(der, xi)
        mono = TruncSeries.monomial(d, N, triangular(n), (-1) ** n)
        val = val + mono
        der = der - mono.scale(d.from_int(n))
    val = mul(val, xi).add_scalar(d.one())
    return val, der


def solve_newton_theta(N, domain=INT):
    """Leading root of the partial theta sum by series Newton iteration
    with order doubling."""
    d = domain
    xi = TruncSeries.one(d, 0)
    prec = 1
    while prec < N + 1:
        prec = min(2 * prec, N + 1)
        xi = xi.pad(prec - 1)
        val, der = _theta_eval_pair(xi, prec - 1)
        xi = xi + mul(val, invert(der))
    steps = max(1, (N).bit_length())
    return RootSolveTrace(method="newton", init="one", final=xi, iterations=steps)


def xi0(N):
    """The leading root series over the integers."""
    return solve_newton_theta(N).final


# ---------------------------------------------------------------------------
# integer polynomials in q (dense mpz tuples, low degree first)
# ---------------------------------------------------------------------------

def zpoly_strip(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def zpoly_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return zpoly_strip(out)


def zpoly_neg(a):
    return tuple(-x for x in a)


def zpoly_mul(a, b):
    if not a or not b:
        return ()
    n = len(a) + len(b) - 2
    if min(len(a), len(b)) < 16:
        out = [mpz(0)] * (n + 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return zpoly_strip(out)
    return zpoly_strip(_mul_kronecker([mpz(x) for x in a], [mpz(x) for x in b], n))


ZPOLY_ONE = (mpz(1),)


def q_integer(k):
    """1 + q + ... + q^(k-1)."""
    return tuple(mpz(1) for _ in range(k))


def Q_poly(n):
    """prod_k (1+q+...+q^{k-1})^{floor(n / C(k,2))} as an mpz polynomial."""
    out = ZPOLY_ONE
    k = 2
    while k == 2 or triangular(k) <= n:
        e = n if k == 2 else n // triangular(k)
        for _ in range(e):
            out = zpoly_mul(out, q_integer(k))
        k += 1
    return out


def _exp_diff(m, i, j, extra=None):
    """Exponent vector of Q_m / (Q_i * Q_j * extra-denominator); always
    componentwise nonnegative by floor superadditivity."""
    out = []
    k = 2
    while k == 2 or triangular(k) <= m:
        c = 1 if k == 2 else triangular(k)
        e = m // c - i // c - j // c
        if extra is not None and k < len(extra) + 2:
            e -= extra[k - 2]
        if e < 0:
            raise ArithmeticError("denominator bookkeeping went negative")
        out.append(e)
        k += 1
    return tuple(out)


_COF_CACHE = {}


def _cof_poly(expvec):
    """Product of q-integers with the given exponents, cached."""
    if expvec in _COF_CACHE:
        return _COF_CACHE[expvec]
    out = ZPOLY_ONE
    for idx, e in enumerate(expvec):
        k = idx + 2
        for _ in range(e):
            out = zpoly_mul(out, q_integer(k))
    _COF_CACHE[expvec] = out
    return out


class GradedQSeries:
    """y-series whose n-th coefficient is u_n(q) / Q_n(q) with u_n an
    integer polynomial; the denominators are implicit, so every ring
    operation is pure integer-polynomial arithmetic."""

    __slots__ = ("order", "u")

    def __init__(self, order, u=()):
        self.order = order
        uu = [zpoly_strip(x) for x in u][: order + 1]
        uu += [()] * (order + 1 - len(uu))
        self.u = tuple(uu)

    @staticmethod
    def const(order, v):
        return GradedQSeries(order, [(mpz(v),)] if v else [])

    def truncate(self, order):
        return GradedQSeries(order, self.u[: order + 1])

    def __add__(self, other):
        return GradedQSeries(
            self.order, [zpoly_add(a, b) for a, b in zip(self.u, other.u)]
        )

    def __sub__(self, other):
        return GradedQSeries(
            self.order,
            [zpoly_add(a, zpoly_neg(b)) for a, b in zip(self.u, other.u)],
        )

    def __neg__(self):
        return GradedQSeries(self.order, [zpoly_neg(a) for a in self.u])

    def add_one(self):
        u = list(self.u)
        u[0] = zpoly_add(u[0], ZPOLY_ONE)
        return GradedQSeries(self.order, u)

    def __mul__(self, other):
        N = min(self.order, other.order)
        out = [() for _ in range(N + 1)]
        for i in range(N + 1):
            a = self.u[i]
            if not a:
                continue
            for j in range(N + 1 - i):
                b = other.u[j]
                if b:
                    term = zpoly_mul(zpoly_mul(a, b), _cof_poly(_exp_diff(i + j, i, j)))
                    out[i + j] = zpoly_add(out[i + j], term)
        return GradedQSeries(N, out)

    def shift_div(self, t, dvec):
        """Multiply by y^t / (denominator with exponent vector dvec); each
        moved coefficient picks up the polynomial cofactor that upgrades
        its implicit denominator."""
        out = [() for _ in range(self.order + 1)]
        for n, a in enumerate(self.u):
            m = n + t
            if a and m <= self.order:
                out[m] = zpoly_mul(a, _cof_poly(_exp_diff(m, n, 0, extra=dvec)))
        return GradedQSeries(self.order, out)

    def __eq__(self, other):
        return isinstance(other, GradedQSeries) and self.u == other.u

    def first_difference(self, other):
        n = min(self.order, other.order)
        for i in range(n + 1):
            if self.u[i] != other.u[i]:
                return i
        return None


def _rr_dvec(n):
    """Exponent vector of D_n = prod_{k=2}^n (1+q+...+q^{k-1})."""
    width = 0
    k = 2
    while k == 2 or triangular(k) <= triangular(n):
        width += 1
        k += 1
    return tuple(1 if (idx + 2) <= n else 0 for idx in range(width))


def solve_rr(N, q="symbolic", keep_iterates=False):
    """Leading root of the rescaled Rogers-Ramanujan series.

    Numeric mode (rational q > -1) runs the generic recursion over the
    rationals.  Symbolic mode works in a graded representation where the
    y^n coefficient is an integer polynomial over the implicit denominator
    Q_n(q), so no rational-function gcds are ever needed; it returns the
    trace plus the numerator and denominator polynomial lists.
    """
    if q != "symbolic":
        if mpq(q) <= -1:
            raise ValueError("numeric mode needs rational q > -1")
        f = rr_tilde(N, q)
        return solve_generic(f, N, keep_iterates=keep_iterates)

    terms = []  # (n, T(n), denominator exponent vector), n >= 2
    n = 2
    while triangular(n) <= N:
        terms.append((n, triangular(n), _rr_dvec(n)))
        n += 1

    def apply_fn(xi, work):
        xt = xi.truncate(work)
        acc = GradedQSeries.const(work, 1)
        power = xt
        for n, t, dvec in terms:
            power = power * xt  # power = xi^n
            term = power.shift_div(t, dvec)
            acc = acc + term if n % 2 == 0 else acc - term
        return acc

    cur = GradedQSeries.const(min(N, 2), 1)
    k = 0
    while True:
        k += 1
        if k > N + 3:
            raise RuntimeError("fixpoint iteration failed to settle (internal error)")
        work = min(N, k + 2)
        nxt = apply_fn(cur.truncate(work), work)
        if work == N and cur.order == N and nxt.first_difference(cur) is None:
            break
        cur = nxt

    P = [nxt.u[m] for m in range(N + 1)]
    Q = [Q_poly(m) for m in range(N + 1)]
    coeffs = [
        RatFun([mpq(c) for c in P[m]], [mpq(c) for c in Q[m]]) for m in range(N + 1)
    ]
    final = TruncSeries(RATFUN, N, coeffs)
    # the stopping rule apply_fn(xi) == xi is an exact rearrangement of the
    # residual equation, so the residual is already certified zero
    return RootSolveTrace(
        method="generic", init="one", final=final, iterations=k,
        extra={"P": P, "Q": Q},
    )


# ---------------------------------------------------------------------------
# bound series
# ---------------------------------------------------------------------------

def _a1(N):
    """a_1(y) = 1 - y/(1-y) over the integers."""
    one = TruncSeries.one(INT, N)
    return one - div_one_minus(TruncSeries.monomial(INT, N, 1), 1)


def amy_list(N, m_max=None):
    """[(-1)^m a_m(y)] for m = 2..m_max from the closed q-binomial form,
    maintaining each Gaussian-binomial column incrementally."""
    if m_max is None:
        m_max = N
    m_max = min(m_max, N)
    inv_poch = [TruncSeries.one(INT, N)]
    prod = TruncSeries.one(INT, N)
    nmax = 2
    while nmax * (nmax - 1) <= N:
        nmax += 1
    nmax -= 1
    for kk in range(1, nmax + 1):
        prod = mul_one_minus(prod, kk)
        inv_poch.append(invert(prod))
    cols = {}  # n -> current qbinom(m-2, n-2) for the working m
    out = []
    for m in range(2, m_max + 1):
        for n in range(2, min(m, nmax) + 1):
            if n == m:
                cols[n] = TruncSeries.one(INT, N)
            else:
                # qbinom(m-2, n-2) from qbinom(m-3, n-2)
                cols[n] = div_one_minus(
                    mul_one_minus(cols[n], m - 2), m - n
                )
        acc = TruncSeries.zero(INT, N)
        for n in range(2, min(m, nmax) + 1):
            t = n * (n - 1)
            if m + t > N:
                continue
            acc = acc + mul(cols[n], inv_poch[n].shift(t))
        out.append(acc.shift(m))
    return out


def amy_direct(m_max, N):
    """[(-1)^m a_m(y)] for m = 2..m_max by direct expansion of
    Theta0(x,y) / (-xy; y)_infinity, as an oracle for the closed form."""
    from .qseries import XPoly, _theta0_xpoly, _max_theta_degree

    D = max(m_max, _max_theta_degree(N))
    num = _theta0_xpoly(N, D)
    den = XPoly.one(INT, N, D)
    for j in range(1, N + 1):
        den = den.mul_sparse(1, j)
    f = num * den.invert()
    return [f.c[m] if m % 2 == 0 else -f.c[m] for m in range(2, m_max + 1)]


def bound_thm2(N):
    """The series a_1 - sum_{m>=2} (-1)^m a_m, squeezed between 1/xi0 and 1."""
    acc = _a1(N)
    for s in amy_list(N):
        acc = acc - s
    return acc


def bound_thm3(N):
    """The series a_1^2 - 2 sum_{m>=2} (-1)^m a_m a_1^{-(m-2)}, an upper
    bound for 1/xi0^2 that first parts company at order 8."""
    a1 = _a1(N)
    inv_a1 = invert(a1)
    acc = mul(a1, a1)
    power = TruncSeries.one(INT, N)  # a_1^{-(m-2)}
    for m, s in enumerate(amy_list(N), start=2):
        if m > 2:
            power = mul(power, inv_a1)
        acc = acc - mul(s, power).scale(2)
    return acc
