"""Special functions behind every marginal likelihood and tail probability.

Everything is computed on the natural-log scale where possible, because the
beta functions involved (e.g. B(131, 89)) underflow in linear scale.
"""
import math

from .errors import DomainError, NumericalError

CF_TOL = 1e-14
CF_MAX_ITER = 400
_TINY = 1e-300


def log_gamma(z):
    """ln Gamma(z) for z > 0."""
    if not z > 0 or math.isinf(z):
        raise DomainError(f"log_gamma requires finite z > 0, got {z!r}")
    return math.lgamma(z)


def log_beta(a, b):
    """ln B(a, b)."""
    if not (a > 0 and b > 0):
        raise DomainError(f"log_beta requires a, b > 0, got a={a!r}, b={b!r}")
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _max_iter(a, b):
    # near the mean the fraction needs O(sqrt(a + b)) terms, which exceeds the
    # base cap only for very large shapes
    return max(CF_MAX_ITER, int(10 * math.sqrt(a + b)))


def _betacf(a, b, x):
    # modified Lentz evaluation of the incomplete-beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _max_iter(a, b) + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_TOL:
            return h
    raise NumericalError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )


def _check_beta_args(xi, a, b):
    if not (a > 0 and b > 0):
        raise DomainError(f"shape parameters must be positive, got a={a!r}, b={b!r}")
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"xi must lie in [0, 1], got {xi!r}")


def _log_tail(xi, a, b):
    # log of I_xi(a, b) evaluated directly by the continued fraction; only
    # accurate when xi < (a + 1) / (a + b + 2)
    front = a * math.log(xi) + b * math.log1p(-xi) - log_beta(a, b) - math.log(a)
    return front + math.log(_betacf(a, b, xi))


def log_reg_inc_beta_pair(xi, a, b):
    """Return (ln I, ln(1 - I)) for the regularized incomplete beta I_xi(a, b).

    Whichever side is small is evaluated directly, so neither log loses
    precision to cancellation.
    """
    _check_beta_args(xi, a, b)
    if xi == 0.0:
        return -math.inf, 0.0
    if xi == 1.0:
        return 0.0, -math.inf
    if xi < (a + 1.0) / (a + b + 2.0):
        lo = _log_tail(xi, a, b)
        return lo, math.log1p(-math.exp(lo))
    hi = _log_tail(1.0 - xi, b, a)
    return math.log1p(-math.exp(hi)), hi


def log_reg_inc_beta(xi, a, b):
    return log_reg_inc_beta_pair(xi, a, b)[0]


def log_reg_inc_beta_upper(xi, a, b):
    """ln(1 - I_xi(a, b)), accurate when I_xi is close to one."""
    return log_reg_inc_beta_pair(xi, a, b)[1]


def reg_inc_beta(xi, a, b):
    """Regularized incomplete beta function I_xi(a, b) in [0, 1]."""
    return math.exp(log_reg_inc_beta(xi, a, b))


def log_inc_beta(xi, a, b):
    """ln of the unregularized integral from 0 to xi of u^(a-1) (1-u)^(b-1).

    Returns -inf when the integral is zero (xi = 0).
    """
    return log_reg_inc_beta(xi, a, b) + log_beta(a, b)


def inc_beta(xi, a, b):
    return math.exp(log_inc_beta(xi, a, b))


def log_binom_coeff(m, x):
    """ln C(m, x)."""
    if m < 0 or x < 0 or x > m:
        raise DomainError(f"log_binom_coeff requires 0 <= x <= m, got m={m!r}, x={x!r}")
    return math.lgamma(m + 1) - math.lgamma(x + 1) - math.lgamma(m - x + 1)


def binom_tail(n, k, p):
    """P(X >= k) for X ~ Binomial(n, p), via I_p(k, n - k + 1)."""
    if n < 0 or not 0 <= k <= n + 1:
        raise DomainError(f"binom_tail requires 0 <= k <= n + 1, got n={n!r}, k={k!r}")
    if not 0.0 < p < 1.0:
        raise DomainError(f"binom_tail requires 0 < p < 1, got {p!r}")
    if k == 0:
        return 1.0
    if k == n + 1:
        return 0.0
    return reg_inc_beta(p, k, n - k + 1)


def beta_binomial_log_pmf(m, x, a, b):
    """ln of the Beta-Binomial(m, a, b) pmf at x."""
    return log_binom_coeff(m, x) + log_beta(a + x, m - x + b) - log_beta(a, b)
