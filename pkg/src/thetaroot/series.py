"""Dense truncated formal power series in y over an exact coefficient domain.

All values are immutable; every operation is a pure function returning a new
series.  Binary operations require matching domains and truncate the result
to the smaller order.  Multiplication dispatches between schoolbook,
Karatsuba, and (for integer coefficients) a packed-integer fast path; the
first two are always available separately for differential testing.
"""

from __future__ import annotations

import os

import gmpy2
from gmpy2 import mpq, mpz

from .domains import (
    INT,
    RAT,
    DomainError,
    Domain,
    QTrunc,
    RatFun,
    get_domain,
    poly_strip,
)

KARATSUBA_THRESHOLD = int(os.environ.get("THETAROOT_KARATSUBA_THRESHOLD", "32"))
# Packed-integer (Kronecker substitution) path, integer domain only: the
# coefficient arrays are packed into two big integers whose product is taken
# by gmpy2 in one call.  Pays off once interpreter overhead dominates.
KRONECKER_THRESHOLD = int(os.environ.get("THETAROOT_KRONECKER_THRESHOLD", "96"))


class TruncSeries:
    """Series sum(c[n] * y^n, n = 0..order); coeffs has length order+1."""

    __slots__ = ("domain", "order", "coeffs")

    def __init__(self, domain, order, coeffs):
        domain = get_domain(domain)
        if order < 0:
            raise ValueError("order must be nonnegative")
        c = [domain.coerce(x) for x in coeffs]
        if len(c) > order + 1:
            del c[order + 1 :]
        while len(c) < order + 1:
            c.append(domain.zero())
        self.domain = domain
        self.order = order
        self.coeffs = tuple(c)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(domain, order):
        return TruncSeries(domain, order, ())

    @staticmethod
    def one(domain, order):
        d = get_domain(domain)
        return TruncSeries(d, order, (d.one(),))

    @staticmethod
    def monomial(domain, order, k, c=1):
        d = get_domain(domain)
        coeffs = [d.zero()] * (order + 1)
        if k <= order:
            coeffs[k] = d.coerce(c)
        return TruncSeries(d, order, coeffs)

    @staticmethod
    def geometric(domain, order):
        """1/(1-y) = 1 + y + y^2 + ..."""
        d = get_domain(domain)
        return TruncSeries(d, order, [d.one()] * (order + 1))

    # -- basic structure ----------------------------------------------------

    def __getitem__(self, n):
        return self.coeffs[n]

    def __len__(self):
        return self.order + 1

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            self.domain.tag == other.domain.tag
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.domain.tag, self.order, self.coeffs))

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:8])
        tail = ", ..." if self.order > 7 else ""
        return "TruncSeries[%s; N=%d](%s%s)" % (self.domain.tag, self.order, head, tail)

    def is_zero(self):
        d = self.domain
        return all(d.is_zero(c) for c in self.coeffs)

    def valuation(self):
        """Index of the first nonzero coefficient; order+1 if all zero."""
        d = self.domain
        for i, c in enumerate(self.coeffs):
            if not d.is_zero(c):
                return i
        return self.order + 1

    def truncate(self, order):
        if order >= self.order:
            return self if order == self.order else self.pad(order)
        return _raw(self.domain, order, self.coeffs[: order + 1])

    def pad(self, order):
        """Extend the allocation with zero coefficients (headroom only)."""
        if order <= self.order:
            return self.truncate(order)
        z = self.domain.zero()
        return _raw(self.domain, order, self.coeffs + (z,) * (order - self.order))

    def first_difference(self, other):
        """Smallest n with self[n] != other[n], or None (common order)."""
        n = min(self.order, other.order)
        for i in range(n + 1):
            if self.coeffs[i] != other.coeffs[i]:
                return i
        return None

    def to_domain(self, domain):
        domain = get_domain(domain)
        return TruncSeries(domain, self.order, [domain.coerce(c) for c in self.coeffs])

    # -- ring operations ----------------------------------------------------

    def _check(self, other):
        if not isinstance(other, TruncSeries):
            raise DomainError("expected a TruncSeries, got %r" % (other,))
        if other.domain.tag != self.domain.tag:
            raise DomainError(
                "domain mismatch: %s vs %s" % (self.domain.tag, other.domain.tag)
            )

    def __add__(self, other):
        self._check(other)
        n = min(self.order, other.order)
        return _raw(
            self.domain,
            n,
            tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)),
        )

    def __sub__(self, other):
        self._check(other)
        n = min(self.order, other.order)
        return _raw(
            self.domain,
            n,
            tuple(self.coeffs[i] - other.coeffs[i] for i in range(n + 1)),
        )

    def __neg__(self):
        return _raw(self.domain, self.order, tuple(-c for c in self.coeffs))

    def scale(self, c):
        c = self.domain.coerce(c)
        return _raw(self.domain, self.order, tuple(x * c for x in self.coeffs))

    def shift(self, k):
        """Multiply by y^k (k >= 0), same order."""
        if k == 0:
            return self
        z = self.domain.zero()
        n = self.order
        return _raw(self.domain, n, (z,) * min(k, n + 1) + self.coeffs[: n + 1 - k])

    def __mul__(self, other):
        return mul(self, other)

    def add_scalar(self, c):
        c = self.domain.coerce(c)
        return _raw(self.domain, self.order, (self.coeffs[0] + c,) + self.coeffs[1:])

    # -- calculus helpers (used by log/exp) ---------------------------------

    def derivative(self):
        d = self.domain
        n = self.order
        if n == 0:
            return TruncSeries.zero(d, 0)
        return _raw(
            d, n - 1, tuple(self.coeffs[i] * d.from_int(i) for i in range(1, n + 1))
        )

    def integrate(self):
        """Antiderivative with zero constant term, order+1 coefficients."""
        d = self.domain
        out = [d.zero()]
        for i, c in enumerate(self.coeffs):
            out.append(d.div_int(c, i + 1))
        return _raw(d, self.order + 1, tuple(out))

    # -- higher operations --------------------------------------------------

    def invert(self):
        return invert(self)

    def log(self):
        return log(self)

    def exp(self):
        return exp(self)

    def pow_int(self, k):
        return int_pow(self, k)


def _raw(domain, order, coeffs):
    s = TruncSeries.__new__(TruncSeries)
    s.domain = domain
    s.order = order
    s.coeffs = tuple(coeffs)
    return s


# ---------------------------------------------------------------------------
# multiplication
# ---------------------------------------------------------------------------

def mul(a, b, path=None):
    """Cauchy product truncated to min(order(a), order(b)).

    path selects the implementation explicitly ("schoolbook", "karatsuba",
    "kronecker"); by default a size-based dispatch is used.
    """
    a._check(b)
    n = min(a.order, b.order)
    size = n + 1
    if path is None:
        if a.domain.tag == "int" and size >= KRONECKER_THRESHOLD:
            path = "kronecker"
        elif size >= KARATSUBA_THRESHOLD:
            path = "karatsuba"
        else:
            path = "schoolbook"
    ca = a.coeffs[: n + 1]
    cb = b.coeffs[: n + 1]
    if path == "schoolbook":
        out = _mul_schoolbook(ca, cb, n, a.domain)
    elif path == "karatsuba":
        out = _kara_full(list(ca), list(cb), a.domain)[: n + 1]
    elif path == "kronecker":
        if a.domain.tag != "int":
            raise DomainError("kronecker path requires the integer domain")
        out = _mul_kronecker(ca, cb, n)
    else:
        raise ValueError("unknown multiplication path %r" % (path,))
    return _raw(a.domain, n, out)


def _mul_schoolbook(ca, cb, n, domain):
    zero = domain.zero()
    out = []
    for k in range(n + 1):
        s = zero
        for i in range(k + 1):
            x = ca[i]
            if not domain.is_zero(x):
                s = s + x * cb[k - i]
        out.append(s)
    return out


def _kara_full(a, b, domain):
    """Full (untruncated) product of coefficient lists via Karatsuba."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return []
    if min(la, lb) < KARATSUBA_THRESHOLD:
        out = [domain.zero()] * (la + lb - 1)
        is_zero = domain.is_zero
        for i, x in enumerate(a):
            if not is_zero(x):
                for j, y in enumerate(b):
                    out[i + j] = out[i + j] + x * y
        return out
    m = max(la, lb) // 2
    a0, a1 = a[:m], a[m:]
    b0, b1 = b[:m], b[m:]
    z0 = _kara_full(a0, b0, domain)
    z2 = _kara_full(a1, b1, domain)
    sa = _list_add(a0, a1, domain)
    sb = _list_add(b0, b1, domain)
    z1 = _kara_full(sa, sb, domain)
    z1 = _list_sub(_list_sub(z1, z0, domain), z2, domain)
    out = [domain.zero()] * (la + lb - 1)
    for i, c in enumerate(z0):
        out[i] = out[i] + c
    for i, c in enumerate(z1):
        out[i + m] = out[i + m] + c
    for i, c in enumerate(z2):
        out[i + 2 * m] = out[i + 2 * m] + c
    return out


def _list_add(a, b, domain):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return out


def _list_sub(a, b, domain):
    out = list(a)
    while len(out) < len(b):
        out.append(domain.zero())
    for i, c in enumerate(b):
        out[i] = out[i] - c
    return out


def _mul_kronecker(ca, cb, n):
    """Integer-coefficient product via packing into two big integers."""
    bits_a = max((x.bit_length() for x in ca), default=0)
    bits_b = max((x.bit_length() for x in cb), default=0)
    if bits_a == 0 or bits_b == 0:
        return [mpz(0)] * (n + 1)
    slot = bits_a + bits_b + (n + 1).bit_length() + 2
    ap = [mpz(x) if x > 0 else mpz(0) for x in ca]
    an = [mpz(-x) if x < 0 else mpz(0) for x in ca]
    bp = [mpz(x) if x > 0 else mpz(0) for x in cb]
    bn = [mpz(-x) if x < 0 else mpz(0) for x in cb]
    has_an = any(an)
    has_bn = any(bn)
    pack = gmpy2.pack
    Ap = pack(ap, slot)
    Bp = pack(bp, slot)
    pos = Ap * Bp
    neg = mpz(0)
    if has_an and has_bn:
        An = pack(an, slot)
        Bn = pack(bn, slot)
        pos += An * Bn
        neg = Ap * Bn + An * Bp
    elif has_an:
        neg = pack(an, slot) * Bp
    elif has_bn:
        neg = Ap * pack(bn, slot)
    up = gmpy2.unpack(pos, slot)
    up += [mpz(0)] * (n + 1 - len(up))
    if neg:
        un = gmpy2.unpack(neg, slot)
        un += [mpz(0)] * (n + 1 - len(un))
        return [up[i] - un[i] for i in range(n + 1)]
    return up[: n + 1]


# ---------------------------------------------------------------------------
# inversion, logarithm, exponential, powers
# ---------------------------------------------------------------------------

def invert(a):
    """Multiplicative inverse to order N by Newton iteration with
    order-doubling; requires an invertible constant term."""
    d = a.domain
    c0 = a.coeffs[0]
    if not d.is_invertible(c0):
        raise DomainError("constant term %s is not invertible in %s" % (c0, d.tag))
    n = a.order
    b = _raw(d, 0, (d.inv(c0),))
    prec = 1
    while prec < n + 1:
        prec = min(2 * prec, n + 1)
        at = a.truncate(prec - 1)
        # b <- b * (2 - a*b), all at the current precision
        ab = mul(at, b.pad(prec - 1))
        two_minus = (-ab).add_scalar(d.from_int(2))
        b = mul(b.pad(prec - 1), two_minus)
    return b


def log(a):
    """Formal logarithm; requires constant term 1 and a domain with exact
    division by integers."""
    d = a.domain
    if not d.exact_division_by_int:
        raise DomainError("log is not available over %s" % d.tag)
    if a.coeffs[0] != d.one():
        raise DomainError("log requires constant term 1")
    if a.order == 0:
        return TruncSeries.zero(d, 0)
    g = mul(a.derivative(), invert(a).truncate(a.order - 1))
    return g.integrate().truncate(a.order)


def exp(a):
    """Formal exponential of a series with zero constant term, by Newton
    iteration b <- b*(1 + a - log b) with order-doubling."""
    d = a.domain
    if not d.exact_division_by_int:
        raise DomainError("exp is not available over %s" % d.tag)
    if not d.is_zero(a.coeffs[0]):
        raise DomainError("exp requires zero constant term")
    n = a.order
    b = TruncSeries.one(d, 0)
    prec = 1
    while prec < n + 1:
        prec = min(2 * prec, n + 1)
        at = a.truncate(prec - 1)
        bt = b.pad(prec - 1)
        corr = (at - log(bt)).add_scalar(d.one())
        b = mul(bt, corr)
    return b


def int_pow(a, k):
    """a**k by repeated squaring; negative k inverts first."""
    if k == 0:
        return TruncSeries.one(a.domain, a.order)
    if k < 0:
        return int_pow(invert(a), -k)
    result = None
    base = a
    while k:
        if k & 1:
            result = base if result is None else mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


# ---------------------------------------------------------------------------
# AlphaPoly: polynomial in alpha over the rationals
# ---------------------------------------------------------------------------

class AlphaPoly:
    """Polynomial in alpha, rational coefficients, lowest degree first;
    canonical form strips trailing zeros (zero polynomial = empty tuple)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = poly_strip(mpq(c) for c in coeffs)

    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __call__(self, alpha):
        acc = mpq(0)
        a = mpq(alpha)
        for c in reversed(self.coeffs):
            acc = acc * a + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, AlphaPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return AlphaPoly(
            [
                (self.coeffs[i] if i < len(self.coeffs) else 0)
                + (other.coeffs[i] if i < len(other.coeffs) else 0)
                for i in range(n)
            ]
        )

    def __mul__(self, other):
        if isinstance(other, AlphaPoly):
            if not self.coeffs or not other.coeffs:
                return AlphaPoly()
            out = [mpq(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, x in enumerate(self.coeffs):
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
            return AlphaPoly(out)
        return AlphaPoly([c * mpq(other) for c in self.coeffs])

    __rmul__ = __mul__

    def __repr__(self):
        return "AlphaPoly(%s)" % (list(self.coeffs),)


def pow_alpha(a, M):
    """Coefficients b_m(alpha), m = 1..M, of the family (a^alpha - 1)/alpha.

    Computed from (a^alpha - 1)/alpha = sum_{k>=1} alpha^(k-1) (log a)^k / k!,
    so deg b_m <= m-1.  Requires constant term 1 and a rational domain.
    """
    d = a.domain
    if d.tag != "rat":
        raise DomainError("pow_alpha requires the rational domain")
    if a.coeffs[0] != d.one():
        raise DomainError("pow_alpha requires constant term 1")
    L = log(a.truncate(min(a.order, M)) if a.order > M else a.pad(M))
    L = L.pad(M)
    cols = [[mpq(0)] * M for _ in range(M)]  # cols[k-1][m-1] = [y^m] L^k / k!
    Lk = L
    fact = mpq(1)
    for k in range(1, M + 1):
        fact *= k
        for m in range(k, M + 1):
            cols[k - 1][m - 1] = mpq(Lk.coeffs[m]) / fact
        if k < M:
            Lk = mul(Lk, L)
    return [
        AlphaPoly([cols[k - 1][m - 1] for k in range(1, m + 1)]) for m in range(1, M + 1)
    ]


# ---------------------------------------------------------------------------
# fps-v1 file format
# ---------------------------------------------------------------------------

def _fmt_coeff(c, tag):
    if tag == "int":
        return str(c)
    if tag == "rat":
        return str(c)
    if tag == "ratfun":
        num = ",".join(str(x) for x in c.num) if c.num else "0"
        den = ",".join(str(x) for x in c.den)
        return "%s|%s" % (num, den)
    raise DomainError("unsupported domain %r for fps-v1" % tag)


def _parse_coeff(text, tag):
    if tag == "int":
        return mpz(text)
    if tag == "rat":
        return mpq(text)
    if tag == "ratfun":
        num_s, den_s = text.split("|")
        num = [mpq(x) for x in num_s.split(",")]
        den = [mpq(x) for x in den_s.split(",")]
        return RatFun(num, den)
    raise DomainError("unsupported domain %r for fps-v1" % tag)


def dumps_fps(series):
    """Serialize to the fps-v1 text format (bit-exact round trip)."""
    tag = series.domain.tag
    lines = ["# fps v1 ring=%s order=%d" % (tag, series.order)]
    for n, c in enumerate(series.coeffs):
        lines.append("%d %s" % (n, _fmt_coeff(c, tag)))
    return "\n".join(lines) + "\n"


def loads_fps(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0]
    if not head.startswith("# fps v1 "):
        raise ValueError("not an fps-v1 file")
    fields = dict(part.split("=", 1) for part in head[9:].split())
    tag = fields["ring"]
    order = int(fields["order"])
    domain = get_domain(tag)
    coeffs = [domain.zero()] * (order + 1)
    for ln in lines[1:]:
        idx, val = ln.split(None, 1)
        coeffs[int(idx)] = _parse_coeff(val, tag)
    return TruncSeries(domain, order, coeffs)


def write_fps(series, path):
    with open(path, "w") as fh:
        fh.write(dumps_fps(series))


def read_fps(path):
    with open(path) as fh:
        return loads_fps(fh.read())
