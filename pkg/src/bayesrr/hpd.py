"""Highest posterior density intervals for a Beta posterior on theta."""
from dataclasses import dataclass
import math

from scipy.optimize import brentq

from .errors import BoundaryModeError, NumericalError, ValidationError
from .special_fns import log_beta, reg_inc_beta

MASS_TOL = 1e-8
THETA_TOL = 1e-14


@dataclass(frozen=True)
class PosteriorBeta:
    a_post: float
    b_post: float

    def __post_init__(self):
        if not (self.a_post > 0 and self.b_post > 0):
            raise ValidationError(f"posterior parameters must be positive, got ({self.a_post}, {self.b_post})")

    @classmethod
    def from_data(cls, obs, prior):
        return cls(obs.x + prior.a, obs.m - obs.x + prior.b)

    def log_pdf(self, theta):
        if theta <= 0.0 or theta >= 1.0:
            return -math.inf
        return ((self.a_post - 1) * math.log(theta) + (self.b_post - 1) * math.log1p(-theta)
                - log_beta(self.a_post, self.b_post))

    def cdf(self, theta):
        return reg_inc_beta(min(max(theta, 0.0), 1.0), self.a_post, self.b_post)

    def ppf(self, q):
        if q <= 0.0:
            return 0.0
        if q >= 1.0:
            return 1.0
        return brentq(lambda t: self.cdf(t) - q, 0.0, 1.0, xtol=THETA_TOL, rtol=1e-15)

    @property
    def mode(self):
        return (self.a_post - 1) / (self.a_post + self.b_post - 2)


@dataclass(frozen=True)
class HpdInterval:
    lo: float
    hi: float
    credibility: float
    gamma_lo: float
    gamma_hi: float
    non_unique: bool = False
    one_sided: bool = False


def _to_gamma(theta, design):
    if theta >= 1.0:
        return math.inf
    return design.gamma_of_theta(theta)


def _make(lo, hi, cred, design, **flags):
    return HpdInterval(lo, hi, cred, _to_gamma(lo, design), _to_gamma(hi, design), **flags)


def hpd_interval(post, credibility, design, allow_boundary=False):
    """Shortest interval carrying `credibility` posterior mass.

    For a_post, b_post > 1 the endpoints share a common density level, which
    is found by an outer root search on the level with the two level
    crossings solved on either side of the mode. Beta(1, 1) has no unique
    HPD; the central interval is returned with non_unique set. A monotone
    density (one parameter <= 1) has its HPD pinned at 0 or 1; that is only
    returned when allow_boundary is true.
    """
    if not 0.0 < credibility < 1.0:
        raise ValidationError(f"credibility must lie in (0, 1), got {credibility}")
    a, b = post.a_post, post.b_post
    if a == 1.0 and b == 1.0:
        half = (1.0 - credibility) / 2.0
        return _make(half, 1.0 - half, credibility, design, non_unique=True)
    if a <= 1.0 and b <= 1.0:
        raise BoundaryModeError(f"Beta({a}, {b}) density is U-shaped; the HPD set is not an interval")
    if a <= 1.0 or b <= 1.0:
        if not allow_boundary:
            side = "0" if a <= 1.0 else "1"
            raise BoundaryModeError(
                f"Beta({a}, {b}) has its mode at {side}; request a one-sided interval"
            )
        if a <= 1.0:
            return _make(0.0, post.ppf(credibility), credibility, design, one_sided=True)
        return _make(post.ppf(1.0 - credibility), 1.0, credibility, design, one_sided=True)

    mode = post.mode
    top = post.log_pdf(mode)

    def crossings(level):
        # level < top; log_pdf is increasing on (0, mode) and decreasing after
        f = lambda t: post.log_pdf(t) - level
        lo = 0.0 if f(5e-324) >= 0 else brentq(f, 5e-324, mode, xtol=THETA_TOL, rtol=1e-15)
        hi_edge = 1.0 - 2 ** -53
        hi = 1.0 if f(hi_edge) >= 0 else brentq(f, mode, hi_edge, xtol=THETA_TOL, rtol=1e-15)
        return lo, hi

    def excess(level):
        lo, hi = crossings(level)
        return post.cdf(hi) - post.cdf(lo) - credibility

    # the mass shrinks to 0 as the level approaches the peak
    floor = top - 50.0
    while excess(floor) < 0:
        floor -= 50.0
        if floor < top - 2000.0:
            raise NumericalError("could not bracket the HPD density level")
    level = brentq(excess, floor, top, xtol=1e-15, rtol=1e-15, maxiter=500)
    lo, hi = crossings(level)
    if abs(post.cdf(hi) - post.cdf(lo) - credibility) > MASS_TOL:
        raise NumericalError("HPD mass did not converge")
    return _make(lo, hi, credibility, design)
