"""Exact-arithmetic toolkit for the leading root of the partial theta
function and related q-series, with machine verification suites."""

from .domains import INT, RAT, RATFUN, DomainError, QTrunc, RatFun, get_domain
from .series import (
    AlphaPoly,
    TruncSeries,
    dumps_fps,
    exp,
    int_pow,
    invert,
    loads_fps,
    log,
    mul,
    pow_alpha,
    read_fps,
    write_fps,
)

from .qseries import deformed_exp, qbinom, qpoch, rr_tilde, theta0
from .roots import (
    bound_thm2,
    bound_thm3,
    map_F,
    map_G,
    solve_generic,
    solve_map,
    solve_newton_theta,
    solve_rr,
    xi0,
)
from .transforms import (
    b_polys,
    euler_product,
    finite_diff,
    inverse_euler,
    kaluza_check,
    log_convexity,
    s_alpha_test,
)
from .numerics import collision_point, delta1, figure1_scan, largest_real_root
from .verify import run_suite

__version__ = "0.1.0"
