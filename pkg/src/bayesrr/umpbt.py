"""Uniformly most powerful Bayesian test for theta = theta0 vs theta > theta0.

H0 is rejected when the Bayes factor B01 falls below an evidence threshold
1/lambda. The UMPBT alternative theta1 minimizes

    g(theta) = [ln(lambda) - m ln((1 - theta) / (1 - theta0))]
               / [logit(theta) - logit(theta0)]

over theta > theta0, and the rejection region is {x >= x_star}.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .bayes import alpha_star
from .errors import NoSolutionError, NumericalError, ValidationError
from .special_fns import binom_tail

SCAN_POINTS = 1000
THETA_XTOL = 1e-10
RANGE_LO, RANGE_HI = 1e-4, 1.0
RANGE_TOL = 1e-5


def _logit(t):
    return math.log(t) - math.log1p(-t)


def _check(m, theta0, inv_lambda):
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    if not 0 < theta0 < 1:
        raise ValidationError(f"theta0 must lie in (0, 1), got {theta0}")
    if not inv_lambda > 0:
        raise ValidationError(f"inv_lambda must be positive, got {inv_lambda}")


def umpbt_objective(theta, m, theta0, inv_lambda):
    num = -math.log(inv_lambda) - m * (math.log1p(-theta) - math.log1p(-theta0))
    return num / (_logit(theta) - _logit(theta0))


def solve_theta1(m, theta0, inv_lambda):
    """UMPBT alternative theta1 in (theta0, 1) for threshold 1/lambda.

    A coarse scan brackets the minimum, then a bounded Brent search refines
    it. Requires 1/lambda < 1, otherwise g has no interior minimum.
    """
    _check(m, theta0, inv_lambda)
    if inv_lambda >= 1:
        raise NumericalError(f"no interior minimum for inv_lambda={inv_lambda} >= 1")
    grid = theta0 + (1 - theta0) * np.arange(1, SCAN_POINTS) / SCAN_POINTS
    vals = [umpbt_objective(t, m, theta0, inv_lambda) for t in grid]
    i = int(np.argmin(vals))
    lo = grid[i - 1] if i > 0 else theta0 + (grid[0] - theta0) * 1e-6
    hi = grid[i + 1] if i + 1 < len(grid) else 1 - (1 - grid[-1]) * 1e-6
    res = minimize_scalar(
        umpbt_objective, bounds=(lo, hi), args=(m, theta0, inv_lambda),
        method="bounded", options={"xatol": THETA_XTOL},
    )
    if not res.success:
        raise NumericalError(f"theta1 search failed: {res.message}")
    return float(res.x)


def _log_bf01(x, m, theta0, theta1):
    return (x * (math.log(theta0) - math.log(theta1))
            + (m - x) * (math.log1p(-theta0) - math.log1p(-theta1)))


def rejection_threshold(m, theta0, theta1, inv_lambda):
    """Smallest x with simple-vs-simple B01(x) < 1/lambda (m + 1 if none)."""
    if not theta0 < theta1 < 1:
        raise ValidationError(f"need theta0 < theta1 < 1, got {theta0}, {theta1}")
    log_il = math.log(inv_lambda)
    slope = (math.log(theta0) - math.log(theta1)) - (math.log1p(-theta0) - math.log1p(-theta1))
    const = m * (math.log1p(-theta0) - math.log1p(-theta1))
    x = math.floor((log_il - const) / slope) + 1
    x = min(max(x, 0), m + 1)
    # settle rounding at the boundary by direct evaluation
    while x > 0 and _log_bf01(x - 1, m, theta0, theta1) < log_il:
        x -= 1
    while x <= m and not _log_bf01(x, m, theta0, theta1) < log_il:
        x += 1
    if x > m:
        raise NoSolutionError(f"no count x <= {m} rejects at inv_lambda={inv_lambda}")
    return x


def threshold_for(m, theta0, inv_lambda):
    return rejection_threshold(m, theta0, solve_theta1(m, theta0, inv_lambda), inv_lambda)


def evidence_range(m, theta0, x_star, start=None):
    """Interval of 1/lambda values whose UMPBT rejects exactly at x >= x_star.

    x_star is nonincreasing in 1/lambda, so each edge is located by
    bisection. `start` is a threshold known to give x_star; without it one is
    searched for on a log grid.
    """
    if not 1 <= x_star <= m:
        raise ValidationError(f"x_star must lie in 1..{m}, got {x_star}")
    hi_cap = RANGE_HI - 1e-9

    def xs(il):
        try:
            return threshold_for(m, theta0, il)
        except (NoSolutionError, NumericalError):
            return m + 1

    if start is None or xs(start) != x_star:
        start = None
        for il in np.geomspace(RANGE_LO, hi_cap, 2000):
            if xs(il) == x_star:
                start = float(il)
                break
        if start is None:
            raise NoSolutionError(f"no threshold in [{RANGE_LO}, {RANGE_HI}] yields x_star={x_star}")

    def edge(inside, outside):
        while abs(outside - inside) > RANGE_TOL / 4:
            mid = 0.5 * (inside + outside)
            if xs(mid) == x_star:
                inside = mid
            else:
                outside = mid
        return 0.5 * (inside + outside)

    lo = RANGE_LO if xs(RANGE_LO) == x_star else edge(start, RANGE_LO)
    hi = hi_cap if xs(hi_cap) == x_star else edge(start, hi_cap)
    return lo, hi


@dataclass(frozen=True)
class UmpbtSolution:
    m: int
    theta0: float
    evidence_threshold: float
    theta1: float
    x_star: int
    classical_alpha: float
    lambda_range: tuple
    posterior_range: tuple


def umpbt_solution(m, theta0, inv_lambda):
    _check(m, theta0, inv_lambda)
    theta1 = solve_theta1(m, theta0, inv_lambda)
    x_star = rejection_threshold(m, theta0, theta1, inv_lambda)
    alpha = binom_tail(m, x_star, theta0)
    lam = evidence_range(m, theta0, x_star, start=inv_lambda)
    post = (alpha_star(lam[0]), alpha_star(lam[1]))
    return UmpbtSolution(m, theta0, inv_lambda, theta1, x_star, alpha, lam, post)
