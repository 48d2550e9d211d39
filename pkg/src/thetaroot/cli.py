"""Command-line surface: solvers, verification, transforms, scans, and
benchmarks, with deterministic artifacts and an optional series cache."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time

import mpmath
from gmpy2 import mpq

from . import __version__
from .domains import INT, RAT, DomainError
from .report import VerdictReport
from .series import TruncSeries, dumps_fps, invert, loads_fps, mul, read_fps, write_fps
from .qseries import (
    check_euler_identities,
    check_finite_identities,
    check_identity1,
    check_identity2,
    check_R_identities,
)
from .roots import residual, solve_generic, solve_map, solve_newton_theta, solve_rr
from .qseries import deformed_exp, rr_tilde, theta0
from .transforms import euler_product, EulerCoeffs, inverse_euler, log_convexity, s_alpha_test
from .numerics import collision_point, delta1, figure1_scan
from .verify import hard_failures, run_suite


def parse_rat(text):
    """Exact rational from '1/2', '0.25', '2', or '1e-7'."""
    from decimal import Decimal
    from fractions import Fraction

    try:
        fr = Fraction(text)
    except ValueError:
        fr = Fraction(Decimal(text))
    return mpq(fr.numerator, fr.denominator)


def fmt_sig(x, digits=12):
    """Deterministic decimal with exactly `digits` significant digits."""
    with mpmath.workdps(digits + 20):
        if isinstance(x, type(mpq(0))):
            v = mpmath.mpf(int(x.numerator)) / mpmath.mpf(int(x.denominator))
        else:
            v = mpmath.mpf(x)
        return mpmath.nstr(v, digits, strip_zeros=False)


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

class CacheEntry:
    def __init__(self, cache_dir, key):
        self.key = key
        self.path = os.path.join(cache_dir, key + ".fps")
        self.digest_path = self.path + ".sha256"

    def load(self):
        """Cached bytes, or None on miss / digest mismatch."""
        if not (os.path.exists(self.path) and os.path.exists(self.digest_path)):
            return None
        data = open(self.path, "rb").read()
        want = open(self.digest_path).read().strip()
        if hashlib.sha256(data).hexdigest() != want:
            return None
        return data

    def store(self, data):
        os.makedirs(os.path.dirname(self.path), exist_ok=True)
        with open(self.path, "wb") as fh:
            fh.write(data)
        with open(self.digest_path, "w") as fh:
            fh.write(hashlib.sha256(data).hexdigest() + "\n")


def _xi0_cache_key(source, order, method, init, q):
    qtag = "sym" if q == "symbolic" else ("none" if q is None else str(mpq(q)).replace("/", "_"))
    return "xi0-%s-%d-%s-%s-q%s" % (source, order, method, init, qtag)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_xi0(args):
    order = args.order
    if order is None:
        raise SystemExit2("xi0 needs --order")
    q = "symbolic" if args.symbolic_q else (
        parse_rat(args.q) if args.q is not None else None
    )
    key = _xi0_cache_key(args.source, order, args.method, args.init, q)
    entry = CacheEntry(args.cache_dir, key) if args.cache_dir else None
    data = entry.load() if entry else None
    cached = data is not None
    if data is None:
        series = _solve_for_cli(args.source, order, args.method, args.init, q)
        data = dumps_fps(series).encode()
        if entry:
            entry.store(data)
    else:
        series = loads_fps(data.decode())
    if args.emit:
        with open(args.emit, "wb") as fh:
            fh.write(data)
    print(",".join(str(c) for c in series.coeffs))
    print(
        "xi0 source=%s order=%d method=%s%s" % (args.source, order, args.method, " (cached)" if cached else ""),
        file=sys.stderr,
    )
    return 0


def _solve_for_cli(source, order, method, init, q):
    if source == "theta":
        if method == "newton":
            return solve_newton_theta(order).final
        if method in ("mapF", "mapG"):
            return solve_map(method, int(init), order).final
        return solve_generic(theta0(order), order).final
    if source == "defexp":
        return solve_generic(deformed_exp(order), order).final
    if source == "rr":
        if q is None:
            raise SystemExit2("rr source needs --q or --symbolic-q")
        return solve_rr(order, q=q).final
    raise SystemExit2("unknown source %r" % source)


def cmd_verify(args):
    overrides = {}
    if args.order:
        overrides["order"] = args.order
    reports = run_suite(args.profile, overrides)
    for r in reports:
        print(r.summary_line())
    if args.json:
        payload = [r.to_dict(order_key="order_checked") for r in reports]
        with open(args.json, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    bad = hard_failures(reports)
    print("verify: %d/%d pass (%d hard failures)" % (
        sum(r.passed for r in reports), len(reports), len(bad)))
    return 1 if bad else 0


def cmd_transform(args):
    f = read_fps(args.infile)
    if args.op == "inverse-euler":
        M = args.upto or f.order
        ce = inverse_euler(f, M)
        print(",".join(str(c) for c in ce.values()))
        return 0
    if args.op == "euler":
        M = args.upto or f.order
        coeffs = EulerCoeffs(c=[None] + list(f.coeffs[1 : M + 1]), integral=False)
        out = euler_product(coeffs, args.order or M)
        text = dumps_fps(out)
        if args.out:
            open(args.out, "w").write(text)
        else:
            print(text, end="")
        return 0
    if args.op == "s-alpha":
        r = s_alpha_test(f, parse_rat(args.alpha), args.upto or f.order)
        print(r.to_json())
        return 0 if r.passed else 1
    if args.op == "log-convex":
        r = log_convexity(list(f.coeffs))
        print(r.to_json())
        return 0 if r.passed else 1
    raise SystemExit2("unknown transform op %r" % args.op)


def cmd_figure1(args):
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    pool_map = None
    if args.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        pool = ThreadPoolExecutor(max_workers=args.threads)
        pool_map = pool.map
    rows, envelope = figure1_scan(
        parse_rat(args.qmin), parse_rat(args.qmax), parse_rat(args.step),
        args.mmax, parse_rat(args.tol), pool_map=pool_map,
    )
    with open(os.path.join(outdir, "figure1.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["q", "m", "root"])
        for r in rows:
            w.writerow([str(r.q), r.m, "none" if r.root is None else fmt_sig(r.root)])
    with open(os.path.join(outdir, "alpha_star.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["q", "alpha_star_lower"])
        for q, e in envelope:
            w.writerow([str(q), "none" if e is None else fmt_sig(e)])
    print("figure1: %d rows over %d grid points -> %s" % (
        len(rows), len(envelope), outdir))
    return 0


def cmd_collision(args):
    x, y = collision_point(args.tol)
    print("%s %s" % (fmt_sig(x), fmt_sig(y)))
    return 0


def cmd_delta1(args):
    print(fmt_sig(delta1(args.tol)))
    return 0


def cmd_identities(args):
    N = args.upto_order
    reports = [
        check_identity1(N),
        check_identity2(N),
        check_euler_identities(N, D=min(12, N)),
        check_finite_identities(args.upto_finite),
    ]
    tri = min(24, N)
    reports.extend(check_R_identities(tri, min(8, tri)))
    for r in reports:
        print(r.summary_line())
    return 0 if all(r.passed for r in reports) else 1


BENCH_ORDERS = (256, 512, 1024, 2048)


def cmd_bench(args):
    rows = [("suite", "order", "variant", "ms")]
    xi_cache = {}

    def xi_at(n):
        if n not in xi_cache:
            xi_cache[n] = solve_newton_theta(n).final
        return xi_cache[n]

    for order in BENCH_ORDERS:
        if args.suite == "mul":
            a = xi_at(order)
            b = invert(a)
            for path in ("schoolbook", "karatsuba", "kronecker"):
                t0 = time.perf_counter()
                mul(a, b, path=path)
                rows.append(("mul", order, path, "%.2f" % ((time.perf_counter() - t0) * 1e3)))
        elif args.suite == "invert":
            a = xi_at(order)
            t0 = time.perf_counter()
            invert(a)
            rows.append(("invert", order, "newton", "%.2f" % ((time.perf_counter() - t0) * 1e3)))
        elif args.suite == "xi0":
            t0 = time.perf_counter()
            tr = solve_newton_theta(order)
            ms = (time.perf_counter() - t0) * 1e3
            if not residual(theta0(order), tr.final).is_zero():
                raise RuntimeError("bench residual check failed")
            rows.append(("xi0", order, "newton", "%.2f" % ms))
        else:
            raise SystemExit2("unknown bench suite %r" % args.suite)
    text = "\n".join(",".join(str(c) for c in row) for row in rows)
    if args.out:
        open(args.out, "w").write(text + "\n")
    print(text)
    return 0


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

class SystemExit2(SystemExit):
    def __init__(self, msg):
        print("error: %s" % msg, file=sys.stderr)
        super().__init__(2)


def build_parser():
    p = argparse.ArgumentParser(prog="theta-root", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--order", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--cache-dir", default=None)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--format", default="fps-v1",
                        choices=["fps-v1", "json", "csv"])

    sp = sub.add_parser("xi0", help="compute the leading root series")
    common(sp)
    sp.add_argument("--source", default="theta", choices=["theta", "defexp", "rr"])
    sp.add_argument("--method", default="newton",
                    choices=["newton", "mapF", "mapG", "generic"])
    sp.add_argument("--init", default="1", choices=["0", "1"])
    sp.add_argument("--q", default=None)
    sp.add_argument("--symbolic-q", action="store_true")
    sp.add_argument("--emit", default=None)
    sp.set_defaults(fn=cmd_xi0)

    sp = sub.add_parser("verify", help="run the reproduction checklist")
    common(sp)
    sp.add_argument("--profile", default="quick", choices=["quick", "full"])
    sp.add_argument("--json", default=None)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("transform", help="Euler transforms and S_alpha tests")
    common(sp)
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--op", required=True,
                    choices=["inverse-euler", "euler", "s-alpha", "log-convex"])
    sp.add_argument("--alpha", default="0")
    sp.add_argument("--upto", type=int, default=None)
    sp.set_defaults(fn=cmd_transform)

    sp = sub.add_parser("figure1", help="largest-real-root grid scan")
    common(sp)
    sp.add_argument("--qmin", default="-0.99")
    sp.add_argument("--qmax", default="2")
    sp.add_argument("--step", default="0.01")
    sp.add_argument("--mmax", type=int, default=20)
    sp.add_argument("--tol", default="1e-7")
    sp.set_defaults(fn=cmd_figure1)

    sp = sub.add_parser("collision", help="theta/theta' double point")
    common(sp)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(fn=cmd_collision)

    sp = sub.add_parser("delta1", help="lattice-sum threshold")
    common(sp)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(fn=cmd_delta1)

    sp = sub.add_parser("identities", help="run the identity checkers")
    common(sp)
    sp.add_argument("--upto-order", type=int, default=60)
    sp.add_argument("--upto-finite", type=int, default=25)
    sp.set_defaults(fn=cmd_identities)

    sp = sub.add_parser("bench", help="timing table")
    common(sp)
    sp.add_argument("--suite", default="xi0", choices=["mul", "invert", "xi0"])
    sp.set_defaults(fn=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit:
        raise
    except (DomainError, ValueError, OSError, RuntimeError, ArithmeticError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
