"""Standard and modified Bayesian tests.

The standard test rejects H0 when the Bayes factor falls below an evidence
threshold. The modified test adds a no-decision band [r, a] built from the
sampling distribution of the Bayes factor under both hypotheses, and reports
conditional error probabilities.
"""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
import math

import numpy as np

from .bayes import HypothesisCase, Observation, Side, alpha_star, marginal_log_f
from .errors import DomainError, ValidationError
from .priors import Design

DEFAULT_THRESHOLD = 10 ** -0.5
# relative tolerance for merging equal Bayes factors into one support atom
ATOM_RTOL = 1e-12
# probability tolerance used by the generalized inverse on CDF plateaus
PLATEAU_TOL = 1e-9
# relative tolerance for bf == r or bf == a
BOUNDARY_RTOL = 1e-9


class Grade(str, Enum):
    FAVORS_NULL = "FavorsNull"
    BARE_MENTION = "BareMention"
    SUBSTANTIAL = "Substantial"
    STRONG = "Strong"
    DECISIVE = "Decisive"


@dataclass(frozen=True)
class EvidenceGrade:
    grade: Grade
    j_index: float


def jeffreys_grade(bf):
    """Grade the evidence against H0 by j = log10(bf)."""
    if not bf > 0:
        raise DomainError(f"bf must be positive, got {bf}")
    j = math.log10(bf)
    if j >= 0:
        g = Grade.FAVORS_NULL
    elif j >= -0.5:
        g = Grade.BARE_MENTION
    elif j >= -1:
        g = Grade.SUBSTANTIAL
    elif j >= -2:
        g = Grade.STRONG
    else:
        g = Grade.DECISIVE
    return EvidenceGrade(g, j)


class Decision(str, Enum):
    REJECT = "R"
    ACCEPT = "A"
    NO_DECISION = "ND"


@dataclass(frozen=True)
class StandardOutcome:
    decision: Decision
    conditional_error: float
    posterior_h0: float


def standard_test(bf_result, grade_threshold=DEFAULT_THRESHOLD):
    """Reject H0 iff bf < grade_threshold.

    On rejection the reported error is bf / (1 + bf); on acceptance it is
    1 / (1 + bf). Use grade_threshold=1 for the plain bf < 1 rule.
    """
    if not grade_threshold > 0:
        raise ValidationError(f"grade_threshold must be positive, got {grade_threshold}")
    bf = bf_result.bf
    if bf < grade_threshold:
        return StandardOutcome(Decision.REJECT, alpha_star(bf), bf_result.posterior_h0)
    beta = 0.0 if bf == math.inf else 1.0 / (1.0 + bf)
    return StandardOutcome(Decision.ACCEPT, beta, bf_result.posterior_h0)


@dataclass(frozen=True, eq=False)
class BfDistribution:
    """Law of B_m(X) under H0 and H1, as atoms on the distinct bf values."""
    case: HypothesisCase
    m: int
    support: np.ndarray
    mass_h0: np.ndarray
    mass_h1: np.ndarray

    def __post_init__(self):
        for arr in (self.support, self.mass_h0, self.mass_h1):
            arr.setflags(write=False)

    @property
    def cdf_h0(self):
        return np.cumsum(self.mass_h0)

    @property
    def cdf_h1(self):
        return np.cumsum(self.mass_h1)


def bf_distribution(case, m, prior, design):
    """Distribution of the Bayes factor over x = 0..m under both hypotheses.

    Results are cached (the cache is thread-safe and entries are immutable).
    """
    if m < 1:
        raise DomainError(f"bf distribution needs m >= 1, got {m}")
    return _bf_distribution(HypothesisCase(case), int(m), prior, float(design.z0))


@lru_cache(maxsize=1024)
def _bf_distribution(case, m, prior, z0):
    design = Design(z0)
    l0 = np.empty(m + 1)
    l1 = np.empty(m + 1)
    for x in range(m + 1):
        obs = Observation(m, x)
        l0[x] = marginal_log_f(case, Side.H0, obs, prior, design)
        l1[x] = marginal_log_f(case, Side.H1, obs, prior, design)
    with np.errstate(invalid="ignore"):
        log_bf = l0 - l1
    keep = ~np.isnan(log_bf)
    log_bf, l0, l1 = log_bf[keep], l0[keep], l1[keep]
    f0 = np.exp(l0)
    f1 = np.exp(l1)
    f0 /= f0.sum()
    f1 /= f1.sum()
    order = np.argsort(log_bf, kind="stable")
    log_bf, f0, f1 = log_bf[order], f0[order], f1[order]

    # merge atoms whose bf agree to ATOM_RTOL
    starts = [0]
    for i in range(1, len(log_bf)):
        if log_bf[i] - log_bf[starts[-1]] > ATOM_RTOL:
            starts.append(i)
    starts = np.array(starts)
    support = np.exp(log_bf[starts])
    return BfDistribution(
        case, m, support, np.add.reduceat(f0, starts), np.add.reduceat(f1, starts)
    )


def _cdf_at(dist, cdf, b):
    # right-continuous step CDF evaluated at b
    k = np.searchsorted(dist.support, b * (1 + ATOM_RTOL), side="right")
    return 0.0 if k == 0 else float(cdf[k - 1])


def _quantile(dist, cdf, p, plateau="upper"):
    """Generalized inverse of a step CDF.

    "lower" returns inf{s : F(s) >= p}; "upper" returns inf{s : F(s) > p}.
    They differ only when p is exactly a plateau level of F, which happens
    for symmetric designs.
    """
    support = dist.support
    if p <= 0:
        return float(support[0])
    if plateau == "upper":
        k = np.searchsorted(cdf, p + PLATEAU_TOL, side="right")
    elif plateau == "lower":
        k = np.searchsorted(cdf, p - PLATEAU_TOL, side="left")
    else:
        raise ValidationError(f"unknown plateau convention {plateau!r}")
    return float(support[min(k, len(support) - 1)])


def psi(b, dist, plateau="upper"):
    """psi(b) = F0^-1(1 - F1(b))."""
    p = 1.0 - _cdf_at(dist, dist.cdf_h1, b)
    return _quantile(dist, dist.cdf_h0, p, plateau)


def psi_inverse(b, dist, variant="fixed", plateau="upper"):
    """Inverse of psi: F1^-1(1 - F0(b)).

    variant="literal" evaluates F1^-1(1 - F1(b)) instead, kept for comparison.
    """
    if variant == "fixed":
        cdf_b = dist.cdf_h0
    elif variant == "literal":
        cdf_b = dist.cdf_h1
    else:
        raise ValidationError(f"unknown psi_inverse variant {variant!r}")
    p = 1.0 - _cdf_at(dist, cdf_b, b)
    return _quantile(dist, dist.cdf_h1, p, plateau)


@dataclass(frozen=True)
class DecisionConstants:
    r: float
    a: float


def decision_constants(dist, variant="fixed", plateau="upper"):
    p1 = psi(1.0, dist, plateau)
    if p1 >= 1.0 * (1 - ATOM_RTOL):
        return DecisionConstants(1.0, max(p1, 1.0))
    return DecisionConstants(min(psi_inverse(1.0, dist, variant, plateau), 1.0), 1.0)


@dataclass(frozen=True)
class ModifiedOutcome:
    decision: Decision
    conditional_error: float  # None for NoDecision
    conditioning_stat: float
    r: float
    a: float


def modified_test(bf_result, dist, error_dist=None, variant="fixed", plateau="upper"):
    """Three-way test with no-decision band [r, a] (closed).

    The conditioning statistic is S = min(bf, psi^-1(bf)). On acceptance the
    conditional error is 1 / (1 + psi(S)). Both psi evaluations use
    error_dist when given (default: dist itself).
    """
    if dist.case != bf_result.case or dist.m != bf_result.obs.m:
        raise ValidationError("bf distribution does not match the observation")
    consts = decision_constants(dist, variant, plateau)
    edist = dist if error_dist is None else error_dist
    bf = bf_result.bf
    s = min(bf, psi_inverse(bf, edist, variant, plateau))
    if bf < consts.r * (1 - BOUNDARY_RTOL):
        return ModifiedOutcome(Decision.REJECT, alpha_star(bf), s, consts.r, consts.a)
    if bf > consts.a * (1 + BOUNDARY_RTOL):
        beta = 1.0 / (1.0 + psi(s, edist, plateau))
        return ModifiedOutcome(Decision.ACCEPT, beta, s, consts.r, consts.a)
    return ModifiedOutcome(Decision.NO_DECISION, None, s, consts.r, consts.a)
