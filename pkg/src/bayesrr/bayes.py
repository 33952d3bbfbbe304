"""Marginal likelihoods, Bayes factors and posterior probabilities.

theta is the probability that an observed event comes from arm A. The three
hypothesis structures are

    CASE1: theta = theta0  vs  theta != theta0
    CASE2: theta = theta0  vs  theta >  theta0
    CASE3: theta <= theta0 vs  theta >  theta0

Under a Beta(a, b) prior the composite sides are truncated Beta-Binomial
marginals, so everything reduces to incomplete beta evaluations.
"""
from dataclasses import dataclass
from enum import Enum, IntEnum
import math

from .errors import DomainError, ValidationError
from .special_fns import log_beta, log_binom_coeff, log_reg_inc_beta_pair


class HypothesisCase(IntEnum):
    CASE1 = 1
    CASE2 = 2
    CASE3 = 3


class Side(Enum):
    H0 = 0
    H1 = 1


@dataclass(frozen=True)
class Observation:
    m: int
    x: int

    def __post_init__(self):
        if int(self.m) != self.m or int(self.x) != self.x:
            raise ValidationError(f"m and x must be integers, got m={self.m}, x={self.x}")
        if self.m < 0 or not 0 <= self.x <= self.m:
            raise ValidationError(f"need 0 <= x <= m, got m={self.m}, x={self.x}")

    @property
    def gamma_hat(self):
        """x / (m - x); +inf when every event is in arm A, nan when m = 0."""
        if self.m == 0:
            return math.nan
        if self.x == self.m:
            return math.inf
        return self.x / (self.m - self.x)


@dataclass(frozen=True)
class BfResult:
    case: HypothesisCase
    obs: Observation
    log_bf: float
    bf: float
    posterior_h0: float
    posterior_h1: float

    @property
    def gamma_hat(self):
        return self.obs.gamma_hat


def marginal_log_f(case, side, obs, prior, design):
    """ln of the marginal pmf of X_m at obs.x under the given hypothesis."""
    case = HypothesisCase(case)
    side = Side(side)
    m, x = obs.m, obs.x
    t0 = design.theta0
    lc = log_binom_coeff(m, x)
    if side is Side.H0 and case is not HypothesisCase.CASE3:
        return lc + x * math.log(t0) + (m - x) * math.log1p(-t0)
    a_post = prior.a + x
    b_post = m - x + prior.b
    base = lc + log_beta(a_post, b_post) - log_beta(prior.a, prior.b)
    if case is HypothesisCase.CASE1:
        return base
    log_lower, log_upper = log_reg_inc_beta_pair(t0, a_post, b_post)
    if side is Side.H1:
        return base + log_upper
    return base + log_lower


def _log_posterior_h0(log_bf, ell):
    # ell*bf / (1 + ell*bf) = 1 / (1 + exp(-(log ell + log bf)))
    t = math.log(ell) + log_bf
    if t == math.inf:
        return 0.0
    if t == -math.inf:
        return -math.inf
    if t >= 0:
        return -math.log1p(math.exp(-t))
    return t - math.log1p(math.exp(t))


def bayes_factor(case, obs, prior, design):
    """Bayes factor of H0 against H1 together with posterior probabilities."""
    case = HypothesisCase(case)
    l0 = marginal_log_f(case, Side.H0, obs, prior, design)
    l1 = marginal_log_f(case, Side.H1, obs, prior, design)
    if l0 == -math.inf and l1 == -math.inf:
        raise DomainError(f"both marginals vanish at m={obs.m}, x={obs.x}")
    log_bf = l0 - l1
    bf = math.exp(log_bf) if log_bf < 709.0 else math.inf
    lp0 = _log_posterior_h0(log_bf, design.ell)
    lp1 = _log_posterior_h0(-log_bf, 1.0 / design.ell)
    p0 = math.exp(lp0)
    p1 = math.exp(lp1)
    # one of the two is computed without cancellation; derive the other from it
    if p0 <= p1:
        p1 = 1.0 - p0
    else:
        p0 = 1.0 - p1
    return BfResult(case, obs, log_bf, bf, p0, p1)


def alpha_star(bf):
    """Conditional Type I error on rejection: bf / (1 + bf)."""
    if bf == math.inf:
        return 1.0
    return bf / (1.0 + bf)
