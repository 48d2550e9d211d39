"""Euler transform machinery, the S_alpha membership tests, finite
differences, and the log-convexity / Kaluza checks."""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq, mpz

from .domains import INT, RAT, DomainError
from .report import Stopwatch, verdict
from .series import AlphaPoly, TruncSeries, exp, invert, log, mul, pow_alpha


def mobius_sieve(n):
    """mu(1..n) by a linear sieve."""
    mu = [0] * (n + 1)
    if n >= 1:
        mu[1] = 1
    primes = []
    is_comp = [False] * (n + 1)
    for i in range(2, n + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > n:
                break
            is_comp[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


@dataclass
class EulerCoeffs:
    """Exponents c_m of the product representation prod (1-y^m)^(-c_m);
    c[m] is one-based via the leading placeholder."""

    c: list  # c[0] unused, c[1..M] are the exponents
    integral: bool

    @property
    def M(self):
        return len(self.c) - 1

    def values(self):
        return self.c[1:]


def _log_deriv_numerators(f, M):
    """l_n = n * [y^n] log f for n = 1..M, computed as y f' / f so the
    integer domain stays integer throughout."""
    ft = f.truncate(M)
    g = mul(ft.derivative().pad(M).shift(1), invert(ft))
    return list(g.coeffs[1 : M + 1])


def inverse_euler(f, M):
    """Exponents of the unique product form, by Mobius inversion of the
    divisor sums n * [y^n] log f = sum_{m | n} m * c_m."""
    d = f.domain
    if f.coeffs[0] != d.one():
        raise DomainError("inverse Euler transform needs constant term 1")
    if d.tag not in ("int", "rat"):
        raise DomainError("inverse Euler transform needs int or rat domain")
    ell = _log_deriv_numerators(f, M)
    mu = mobius_sieve(M)
    integral = d.tag == "int"
    c = [None] * (M + 1)
    for m in range(1, M + 1):
        s = 0
        for dd in range(1, m + 1):
            if m % dd == 0 and mu[m // dd]:
                s += mu[m // dd] * ell[dd - 1]
        val = mpq(s, m)
        if integral:
            if val.denominator != 1:
                raise ArithmeticError(
                    "Euler exponent c_%d = %s is not an integer" % (m, val)
                )
            val = mpz(val)
        c[m] = val
    return EulerCoeffs(c=c, integral=integral)


def euler_product(coeffs, N):
    """prod_m (1-y^m)^(-c_m) to order N over the rationals, via
    exp(sum_m c_m sum_k y^{mk} / k)."""
    L = [mpq(0)] * (N + 1)
    for m in range(1, min(coeffs.M, N) + 1):
        cm = mpq(coeffs.c[m])
        if cm:
            k = 1
            while m * k <= N:
                L[m * k] += cm / k
                k += 1
    return exp(TruncSeries(RAT, N, L))


def s_alpha_series(f, alpha, N):
    """(f^alpha - 1)/alpha (log f when alpha = 0) over the rationals."""
    ft = f.to_domain(RAT).truncate(N) if f.domain.tag != "rat" else f.truncate(N)
    if ft.coeffs[0] != mpq(1):
        raise DomainError("S_alpha test needs constant term 1")
    L = log(ft)
    alpha = mpq(alpha)
    if alpha == 0:
        return L
    return exp(L.scale(alpha)).add_scalar(mpq(-1)).scale(1 / alpha)


def s_alpha_test(f, alpha, N):
    """Membership verdict: all coefficients of the test series nonnegative."""
    with Stopwatch() as sw:
        g = s_alpha_series(f, alpha, N)
        fail = None
        for n in range(1, N + 1):
            if g[n] < 0:
                fail = {"index": n, "value": str(g[n])}
                break
    return verdict("s-alpha[%s]" % alpha, N, fail, wall_ms=sw.ms)


def s_alpha_member_from(g, alpha):
    """The series f with test series g: exp(g) for alpha = 0, otherwise
    (1 + alpha*g)^(1/alpha); g needs zero constant term."""
    alpha = mpq(alpha)
    if alpha == 0:
        return exp(g)
    base = g.scale(alpha).add_scalar(mpq(1))
    return exp(log(base).scale(1 / alpha))


def b_polys(f, M):
    """b_m(alpha) for m = 1..M; the alpha-expansion of (f^alpha - 1)/alpha."""
    return pow_alpha(f.to_domain(RAT) if f.domain.tag != "rat" else f, M)


def finite_diff(seq, k=1):
    """k-th forward difference of a sequence."""
    if k < 0:
        raise ValueError("difference order must be nonnegative")
    out = list(seq)
    for _ in range(k):
        out = [out[i + 1] - out[i] for i in range(len(out) - 1)]
    return out


def log_convexity(seq, id="log-convexity"):
    """a_{n-1} a_{n+1} >= a_n^2 for every interior n of a positive sequence."""
    with Stopwatch() as sw:
        fail = None
        for n in range(1, len(seq) - 1):
            if seq[n] <= 0:
                fail = {"index": n, "value": str(seq[n]), "reason": "not positive"}
                break
            if seq[n - 1] * seq[n + 1] < seq[n] * seq[n]:
                fail = {
                    "index": n,
                    "value": str(seq[n - 1] * seq[n + 1] - seq[n] * seq[n]),
                    "reason": "window fails",
                }
                break
    return verdict(id, len(seq) - 1, fail, wall_ms=sw.ms)


def kaluza_check(f, N, id="kaluza"):
    """If f has positive, log-convex coefficients to order N, then 1/f must
    have nonpositive coefficients after the constant term (strictly
    negative when the first window is strict).  When the hypothesis fails
    the verdict passes vacuously with a note."""
    with Stopwatch() as sw:
        ft = f.truncate(N)
        if ft.coeffs[0] != ft.domain.one():
            raise DomainError("Kaluza check needs constant term 1")
        hyp = log_convexity(list(ft.coeffs))
        fail = None
        if not hyp.passed:
            notes = "hypothesis not met"
        else:
            inv = invert(ft)
            strict = N >= 2 and ft[0] * ft[2] > ft[1] * ft[1]
            for n in range(1, N + 1):
                bad = inv[n] >= 0 if strict else inv[n] > 0
                if bad:
                    fail = {"index": n, "value": str(inv[n])}
                    break
            notes = "hypothesis met; conclusion %s" % ("strict" if strict else "weak")
    return verdict(id, N, fail, notes=notes, wall_ms=sw.ms)
