"""Exact coefficient domains for truncated power series.

Three public domains are supported, identified by tag:

* ``"int"``    -- arbitrary-precision integers (gmpy2.mpz)
* ``"rat"``    -- rationals in lowest terms (gmpy2.mpq)
* ``"ratfun"`` -- rational functions in q over the rationals (RatFun)

A fourth, internal domain family ``qtrunc`` (truncated power series in q)
backs the trivariate identity checks; it is constructed explicitly and has
no string tag in the public file format.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz

__all__ = [
    "DomainError",
    "RatFun",
    "QTrunc",
    "Domain",
    "IntDomain",
    "RatDomain",
    "RatFunDomain",
    "QTruncDomain",
    "INT",
    "RAT",
    "RATFUN",
    "get_domain",
]


class DomainError(ValueError):
    """Raised on domain mismatches or unsupported domain operations."""


# ---------------------------------------------------------------------------
# dense polynomial helpers over mpq, lowest degree first, trailing zeros
# stripped (the zero polynomial is the empty tuple)
# ---------------------------------------------------------------------------

def poly_strip(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(a, b):
    n = max(len(a), len(b))
    return poly_strip(
        [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    )


def poly_neg(a):
    return tuple(-x for x in a)


def poly_sub(a, b):
    return poly_add(a, poly_neg(b))


def poly_mul(a, b):
    if not a or not b:
        return ()
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_strip(out)


def poly_scale(a, s):
    if s == 0:
        return ()
    return tuple(x * s for x in a)


def poly_divmod(a, b):
    """Euclidean division over the rationals; b must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [mpq(0)] * max(len(a) - len(b) + 1, 0)
    inv_lc = mpq(1) / b[-1]
    while len(a) >= len(b) and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) < len(b):
            break
        k = len(a) - len(b)
        f = a[-1] * inv_lc
        q[k] = f
        for i, c in enumerate(b):
            a[i + k] -= f * c
        a.pop()
    return poly_strip(q), poly_strip(a)


def poly_gcd(a, b):
    """Monic gcd over the rationals, computed with a primitive-PRS Euclid
    over the integers to keep coefficient growth in check."""
    a, b = poly_strip(a), poly_strip(b)
    if not a:
        return _poly_monic(b)
    if not b:
        return _poly_monic(a)
    fa = _poly_to_zz(a)
    fb = _poly_to_zz(b)
    while fb:
        fa, fb = fb, _poly_primitive(_poly_pseudo_rem(fa, fb))
    return _poly_monic(tuple(mpq(c) for c in fa))


def _poly_monic(a):
    if not a:
        return ()
    inv = mpq(1) / a[-1]
    return tuple(x * inv for x in a)


def _poly_to_zz(a):
    """Clear denominators and content; returns a primitive mpz polynomial."""
    from math import gcd

    den = 1
    for c in a:
        den = den * c.denominator // gcd(den, int(c.denominator))
    zz = [mpz(c * den) for c in a]
    g = mpz(0)
    for c in zz:
        g = gmpy2_gcd(g, c)
    if g > 1:
        zz = [c // g for c in zz]
    return tuple(zz)


def gmpy2_gcd(a, b):
    import gmpy2

    return gmpy2.gcd(a, b)


def _poly_primitive(a):
    if not a:
        return ()
    g = mpz(0)
    for c in a:
        g = gmpy2_gcd(g, c)
    if a[-1] < 0:
        g = -g
    return tuple(c // g for c in a)


def _poly_pseudo_rem(a, b):
    """Pseudo-remainder of integer polynomials (lc(b)^k * a mod b)."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < db:
            break
        k = len(a) - 1 - db
        la = a[-1]
        a = [c * lb for c in a]
        for i in range(db + 1):
            a[i + k] -= la * b[i]
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def poly_eval(a, x):
    acc = mpq(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# RatFun: reduced rational function in q over the rationals
# ---------------------------------------------------------------------------

class RatFun:
    """num/den with integer-normalized coefficients, gcd(num, den) = 1 and
    den's leading coefficient positive.  Zero is 0/1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=(mpq(1),), *, _reduced=False):
        num = poly_strip(mpq(c) for c in num)
        den = poly_strip(mpq(c) for c in den)
        if not den:
            raise ZeroDivisionError("RatFun with zero denominator")
        if not num:
            self.num, self.den = (), (mpq(1),)
            return
        if not _reduced:
            g = poly_gcd(num, den)
            if len(g) > 1:
                num, _ = poly_divmod(num, g)
                den, _ = poly_divmod(den, g)
        num, den = _ratfun_normalize(num, den)
        self.num, self.den = num, den

    @staticmethod
    def const(c):
        return RatFun((mpq(c),), _reduced=True)

    @staticmethod
    def var():
        """The rational function q."""
        return RatFun((mpq(0), mpq(1)), _reduced=True)

    def is_zero(self):
        return not self.num

    def is_one(self):
        return self.num == (mpq(1),) and self.den == (mpq(1),)

    def __bool__(self):
        return bool(self.num)

    def __add__(self, other):
        other = _coerce_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        num = poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den))
        return RatFun(num, poly_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        r = RatFun.__new__(RatFun)
        r.num = poly_neg(self.num)
        r.den = self.den
        return r

    def __sub__(self, other):
        other = _coerce_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce_ratfun(other) + (-self)

    def __mul__(self, other):
        other = _coerce_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFun(poly_mul(self.num, other.num), poly_mul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("RatFun division by zero")
        return RatFun(poly_mul(self.num, other.den), poly_mul(self.den, other.num))

    def reciprocal(self):
        if self.is_zero():
            raise ZeroDivisionError("RatFun reciprocal of zero")
        return RatFun(self.den, self.num, _reduced=True)

    def __eq__(self, other):
        other = _coerce_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def eval(self, q):
        d = poly_eval(self.den, mpq(q))
        if d == 0:
            raise ZeroDivisionError("RatFun denominator vanishes at q=%s" % q)
        return poly_eval(self.num, mpq(q)) / d

    def __repr__(self):
        return "RatFun(%s | %s)" % (list(self.num), list(self.den))


def _ratfun_normalize(num, den):
    """Scale so num, den have integer coefficients with joint content 1 and
    den's leading coefficient positive."""
    from math import gcd

    mult = 1
    for c in list(num) + list(den):
        mult = mult * c.denominator // gcd(mult, int(c.denominator))
    num = [c * mult for c in num]
    den = [c * mult for c in den]
    g = mpz(0)
    for c in num + den:
        g = gmpy2_gcd(g, mpz(c))
    if den[-1] < 0:
        g = -g
    num = tuple(mpq(mpz(c) // g) for c in num)
    den = tuple(mpq(mpz(c) // g) for c in den)
    return num, den


def _coerce_ratfun(x):
    if isinstance(x, RatFun):
        return x
    if isinstance(x, (int, type(mpz(0)), type(mpq(0)))):
        return RatFun.const(mpq(x))
    return NotImplemented


# ---------------------------------------------------------------------------
# QTrunc: truncated power series in q over mpq (internal coefficient ring)
# ---------------------------------------------------------------------------

class QTrunc:
    """Dense truncated series in q, fixed order, rational coefficients."""

    __slots__ = ("order", "c")

    def __init__(self, order, coeffs=()):
        self.order = order
        c = [mpq(x) for x in coeffs][: order + 1]
        c += [mpq(0)] * (order + 1 - len(c))
        self.c = tuple(c)

    @staticmethod
    def const(order, v):
        return QTrunc(order, (mpq(v),))

    @staticmethod
    def var_power(order, k, v=1):
        c = [mpq(0)] * (order + 1)
        if k <= order:
            c[k] = mpq(v)
        return QTrunc(order, c)

    def is_zero(self):
        return all(x == 0 for x in self.c)

    def __bool__(self):
        return not self.is_zero()

    def _coerce(self, other):
        if isinstance(other, QTrunc):
            if other.order != self.order:
                raise DomainError("QTrunc order mismatch")
            return other
        if isinstance(other, (int, type(mpz(0)), type(mpq(0)))):
            return QTrunc.const(self.order, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QTrunc(self.order, [a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return QTrunc(self.order, [-a for a in self.c])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QTrunc(self.order, [a - b for a, b in zip(self.c, o.c)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.order
        a, b = self.c, o.c
        out = [mpq(0)] * (n + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(n + 1 - i):
                    if b[j]:
                        out[i + j] += x * b[j]
        return QTrunc(n, out)

    __rmul__ = __mul__

    def scale(self, s):
        s = mpq(s)
        return QTrunc(self.order, [a * s for a in self.c])

    def reciprocal(self):
        if self.c[0] == 0:
            raise DomainError("QTrunc reciprocal needs nonzero constant term")
        n = self.order
        inv0 = mpq(1) / self.c[0]
        out = [mpq(0)] * (n + 1)
        out[0] = inv0
        for k in range(1, n + 1):
            s = mpq(0)
            for j in range(1, k + 1):
                if self.c[j]:
                    s += self.c[j] * out[k - j]
            out[k] = -inv0 * s
        return QTrunc(n, out)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return "QTrunc(%d, %s)" % (self.order, list(self.c))


# ---------------------------------------------------------------------------
# Domain objects
# ---------------------------------------------------------------------------

class Domain:
    tag = "?"
    exact_division_by_int = True

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def from_int(self, i):
        raise NotImplementedError

    def coerce(self, x):
        raise NotImplementedError

    def is_zero(self, c):
        return not c

    def is_invertible(self, c):
        raise NotImplementedError

    def inv(self, c):
        raise NotImplementedError

    def div_int(self, c, n):
        """c / n for a positive integer n; may raise DomainError."""
        raise NotImplementedError

    def __repr__(self):
        return "<domain %s>" % self.tag


class IntDomain(Domain):
    tag = "int"
    exact_division_by_int = False

    def zero(self):
        return mpz(0)

    def one(self):
        return mpz(1)

    def from_int(self, i):
        return mpz(i)

    def coerce(self, x):
        if isinstance(x, (int, type(mpz(0)))):
            return mpz(x)
        if isinstance(x, type(mpq(0))) and x.denominator == 1:
            return mpz(x)
        raise DomainError("cannot coerce %r into the integer domain" % (x,))

    def is_invertible(self, c):
        return c == 1 or c == -1

    def inv(self, c):
        if not self.is_invertible(c):
            raise DomainError("constant term %s is not invertible over the integers" % c)
        return mpz(c)

    def div_int(self, c, n):
        raise DomainError("division by integers is not exact over the integer domain")


class RatDomain(Domain):
    tag = "rat"

    def zero(self):
        return mpq(0)

    def one(self):
        return mpq(1)

    def from_int(self, i):
        return mpq(i)

    def coerce(self, x):
        if isinstance(x, (int, type(mpz(0)), type(mpq(0)))):
            return mpq(x)
        raise DomainError("cannot coerce %r into the rational domain" % (x,))

    def is_invertible(self, c):
        return c != 0

    def inv(self, c):
        if c == 0:
            raise DomainError("zero is not invertible")
        return mpq(1) / c

    def div_int(self, c, n):
        return c / mpq(n)


class RatFunDomain(Domain):
    tag = "ratfun"

    def zero(self):
        return RatFun(())

    def one(self):
        return RatFun.const(1)

    def from_int(self, i):
        return RatFun.const(i)

    def coerce(self, x):
        r = _coerce_ratfun(x)
        if r is NotImplemented:
            raise DomainError("cannot coerce %r into the ratfun domain" % (x,))
        return r

    def is_zero(self, c):
        return c.is_zero()

    def is_invertible(self, c):
        return not c.is_zero()

    def inv(self, c):
        return c.reciprocal()

    def div_int(self, c, n):
        return c * RatFun.const(mpq(1, n))


class QTruncDomain(Domain):
    """Internal domain: coefficients are truncated q-series of fixed order."""

    def __init__(self, q_order):
        self.q_order = q_order
        self.tag = "qtrunc[%d]" % q_order

    def zero(self):
        return QTrunc(self.q_order)

    def one(self):
        return QTrunc.const(self.q_order, 1)

    def from_int(self, i):
        return QTrunc.const(self.q_order, i)

    def coerce(self, x):
        if isinstance(x, QTrunc):
            if x.order != self.q_order:
                raise DomainError("QTrunc order mismatch")
            return x
        if isinstance(x, (int, type(mpz(0)), type(mpq(0)))):
            return QTrunc.const(self.q_order, x)
        raise DomainError("cannot coerce %r into %s" % (x, self.tag))

    def is_zero(self, c):
        return c.is_zero()

    def is_invertible(self, c):
        return c.c[0] != 0

    def inv(self, c):
        return c.reciprocal()

    def div_int(self, c, n):
        return c.scale(mpq(1, n))


INT = IntDomain()
RAT = RatDomain()
RATFUN = RatFunDomain()

_BY_TAG = {"int": INT, "rat": RAT, "ratfun": RATFUN}


def get_domain(tag):
    if isinstance(tag, Domain):
        return tag
    try:
        return _BY_TAG[tag]
    except KeyError:
        raise DomainError("unknown domain tag %r" % (tag,)) from None
