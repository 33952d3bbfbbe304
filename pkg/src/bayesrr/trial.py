"""Sequential analysis over group data points, fixed-sample design, and simulation."""
from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
import io
import math

import numpy as np
from scipy.stats import binom

from .bayes import HypothesisCase, Observation, bayes_factor
from .decision import (
    DEFAULT_THRESHOLD, Decision, bf_distribution, jeffreys_grade, modified_test,
    standard_test,
)
from .errors import InfeasibleDesignError, ValidationError
from .priors import Design, resolve_prior
from .special_fns import binom_tail

DESIGN_N_CAP = 10 ** 6


# ---------------------------------------------------------------- data points

@dataclass(frozen=True)
class GroupDataPoint:
    index: int
    m: int
    x: int

    @property
    def obs(self):
        return Observation(self.m, self.x)


def validate_points(points):
    """Check cumulative counts never decrease (in total or in either arm)."""
    if not points:
        raise ValidationError("no data points")
    prev = None
    for p in points:
        if p.m < 0 or not 0 <= p.x <= p.m:
            raise ValidationError(f"data point {p.index}: need 0 <= x <= m, got m={p.m}, x={p.x}")
        if prev is not None:
            if p.m < prev.m or p.x < prev.x or p.m - p.x < prev.m - prev.x:
                raise ValidationError(
                    f"data point {p.index}: cumulative counts decrease "
                    f"(m {prev.m}->{p.m}, x {prev.x}->{p.x})"
                )
        prev = p
    return list(points)


def parse_points(text, source="<input>"):
    """Parse `index,m,x` CSV text into validated GroupDataPoints."""
    reader = csv.reader(io.StringIO(text))
    rows = [(n, row) for n, row in enumerate(reader, start=1) if any(c.strip() for c in row)]
    if not rows:
        raise ValidationError(f"{source}: empty data file")
    header = [c.strip().lower() for c in rows[0][1]]
    if header != ["index", "m", "x"]:
        raise ValidationError(f"{source}:{rows[0][0]}: expected header 'index,m,x', got {','.join(rows[0][1])!r}")
    points = []
    for lineno, row in rows[1:]:
        if len(row) != 3:
            raise ValidationError(f"{source}:{lineno}: expected 3 fields, got {len(row)}")
        try:
            idx, m, x = (int(c.strip()) for c in row)
        except ValueError:
            raise ValidationError(f"{source}:{lineno}: non-integer field in {','.join(row)!r}") from None
        if m < 0 or not 0 <= x <= m:
            raise ValidationError(f"{source}:{lineno}: need 0 <= x <= m, got m={m}, x={x}")
        points.append(GroupDataPoint(idx, m, x))
    if not points:
        raise ValidationError(f"{source}: no data rows")
    try:
        return validate_points(points)
    except ValidationError as e:
        raise ValidationError(f"{source}: {e}") from None


def load_points(path):
    with open(path, encoding="utf-8") as f:
        return parse_points(f.read(), source=str(path))


def bundled_points():
    """The 24-point example dataset shipped with the package."""
    text = resources.files("bayesrr").joinpath("data/h1n1_24.csv").read_text(encoding="utf-8")
    return parse_points(text, source="h1n1_24.csv")


# ------------------------------------------------------------------- analysis

class TestMode(str, Enum):
    STANDARD = "standard"
    MODIFIED = "modified"


@dataclass(frozen=True)
class AnalysisRecord:
    point: GroupDataPoint
    gamma_hat: float
    bf: float
    log_bf: float
    posterior_h0: float
    grade: object
    standard: object
    modified: object
    r: float
    a: float
    terminated_here: bool = False


def analyze_point(point, case, prior, design, grade_threshold=DEFAULT_THRESHOLD,
                  error_dist=None, variant="fixed", plateau="upper"):
    res = bayes_factor(case, point.obs, prior, design)
    std = standard_test(res, grade_threshold)
    mod = r = a = None
    if point.m >= 1:
        dist = bf_distribution(case, point.m, prior, design)
        mod = modified_test(res, dist, error_dist=error_dist, variant=variant, plateau=plateau)
        r, a = mod.r, mod.a
    grade = jeffreys_grade(res.bf) if res.bf > 0 else None
    return AnalysisRecord(point, res.gamma_hat, res.bf, res.log_bf, res.posterior_h0,
                          grade, std, mod, r, a)


def analyze_sequence(points, case, prior_spec, design, test_mode=TestMode.STANDARD,
                     grade_threshold=DEFAULT_THRESHOLD, beta_reference="own",
                     variant="fixed", plateau="upper", stop_direction="harm"):
    """Analyze every data point; flag the first one at which H0 is rejected.

    test_mode picks the rule used for the termination flag. With
    stop_direction="harm" only rejections with excess risk in arm A
    (x > m * theta0) stop monitoring; "any" stops at any rejection, which
    for the two-sided Case 1 includes evidence of reduced risk. beta_reference
    selects the Bayes-factor distribution behind the acceptance error:
    "own" uses each point's m, "final" uses the last point's m for all rows.
    """
    points = validate_points(points)
    case = HypothesisCase(case)
    test_mode = TestMode(test_mode)
    prior = resolve_prior(prior_spec, design)
    error_dist = None
    if beta_reference == "final":
        if points[-1].m >= 1:
            error_dist = bf_distribution(case, points[-1].m, prior, design)
    elif beta_reference != "own":
        raise ValidationError(f"beta_reference must be 'own' or 'final', got {beta_reference!r}")
    if stop_direction not in ("harm", "any"):
        raise ValidationError(f"stop_direction must be 'harm' or 'any', got {stop_direction!r}")

    records = []
    stopped = False
    for p in points:
        rec = analyze_point(p, case, prior, design, grade_threshold, error_dist, variant, plateau)
        outcome = rec.standard if test_mode is TestMode.STANDARD else rec.modified
        harmful = stop_direction == "any" or p.x > p.m * design.theta0
        if not stopped and harmful and outcome is not None and outcome.decision is Decision.REJECT:
            rec = replace(rec, terminated_here=True)
            stopped = True
        records.append(rec)
    return records


def termination_index(records):
    for rec in records:
        if rec.terminated_here:
            return rec.point.index
    return None


# --------------------------------------------------------------------- design

@dataclass(frozen=True)
class TrialDesign:
    eta0: float
    eta1: float
    alpha: float
    beta: float
    n_max: int
    k_star: int
    achieved_alpha: float = math.nan
    achieved_beta: float = math.nan


def _design_errors(n, k, eta0, eta1):
    # reject when S_n > k
    return binom_tail(n, k + 1, eta0), 1.0 - binom_tail(n, k + 1, eta1)


def design_fixed_sample(eta0, eta1, alpha, beta, n_cap=DESIGN_N_CAP):
    """Smallest n, then smallest k, such that rejecting on S_n > k has
    size <= alpha at eta0 and Type II error <= beta at eta1."""
    for name, v in (("eta0", eta0), ("eta1", eta1), ("alpha", alpha), ("beta", beta)):
        if not 0 < v < 1:
            raise ValidationError(f"{name} must lie in (0, 1), got {v}")
    if eta1 <= eta0:
        raise InfeasibleDesignError(f"eta1={eta1} must exceed eta0={eta0}")

    start, chunk = 1, 256
    while start <= n_cap:
        n = np.arange(start, min(start + chunk, n_cap + 1))
        # smallest k with P(S > k) <= alpha; isf may be off by one at ties
        k = binom.isf(alpha, n, eta0).astype(np.int64)
        k = np.where(binom.sf(k - 1, n, eta0) <= alpha, k - 1, k)
        k = np.where(binom.sf(k, n, eta0) > alpha, k + 1, k)
        ok = binom.cdf(k, n, eta1) <= beta
        hits = np.flatnonzero(ok)
        for i in hits:
            nn, kk = int(n[i]), int(k[i])
            a_err, b_err = _design_errors(nn, kk, eta0, eta1)
            if a_err <= alpha * (1 + 1e-12) and b_err <= beta * (1 + 1e-12):
                return TrialDesign(eta0, eta1, alpha, beta, nn, kk, a_err, b_err)
        start += len(n)
        chunk = min(chunk * 2, 65536)
    raise InfeasibleDesignError(f"no sample size up to {n_cap} meets alpha={alpha}, beta={beta}")


# ----------------------------------------------------------------- simulation

@dataclass(frozen=True)
class SimConfig:
    p0: float
    theta_a: float
    theta_b: float
    seed: int
    replications: int

    def __post_init__(self):
        for name in ("p0", "theta_a", "theta_b"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValidationError(f"{name} must lie in (0, 1), got {v}")
        if self.replications < 1:
            raise ValidationError(f"replications must be positive, got {self.replications}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError("seed must be a 64-bit unsigned integer")

    @property
    def eta(self):
        return self.theta_a * self.p0 + self.theta_b * (1 - self.p0)

    @property
    def z0(self):
        return (1 - self.p0) / self.p0

    @property
    def cell_probs(self):
        """(p00, p10, p01, p11): first index arm (A=0, B=1), second side effect."""
        q0 = 1 - self.p0
        return np.array([
            (1 - self.theta_a) * self.p0,
            (1 - self.theta_b) * q0,
            self.theta_a * self.p0,
            self.theta_b * q0,
        ])


SIM_FIELDS = ("m_star", "rejected", "s_y", "x", "n00", "n10", "n01", "n11")


@dataclass
class SimResult:
    design: TrialDesign
    config: SimConfig
    capped: bool
    m_star: np.ndarray
    rejected: np.ndarray
    s_y: np.ndarray
    x: np.ndarray
    counts: np.ndarray  # replications x 4, columns n00, n10, n01, n11

    @property
    def reject_rate(self):
        return float(self.rejected.mean())

    @property
    def reject_se(self):
        p = self.reject_rate
        return math.sqrt(p * (1 - p) / len(self.rejected))

    @property
    def mean_m_star(self):
        return float(self.m_star.mean())

    @property
    def se_m_star(self):
        n = len(self.m_star)
        return float(self.m_star.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan


def replication_rng(seed, rep):
    """Independent Philox stream for one replication."""
    ss = np.random.SeedSequence(seed, spawn_key=(rep,))
    return np.random.Generator(np.random.Philox(ss))


def _one_replication(rng, cum_p, k_star, n_max, eta):
    # draw patients in blocks; each block is a run of one-at-a-time arrivals
    counts = np.zeros(4, dtype=np.int64)
    n = 0
    s_y = 0
    while True:
        need = k_star + 1 - s_y
        block = int(need / eta * 1.25) + 32
        if n_max is not None:
            block = min(block, n_max - n)
        cells = np.searchsorted(cum_p, rng.random(block), side="right")
        y = cells >= 2
        cum_y = s_y + np.cumsum(y)
        hit = np.flatnonzero(cum_y > k_star)
        if hit.size:
            stop = int(hit[0]) + 1
            cells = cells[:stop]
            counts += np.bincount(cells, minlength=4)
            return n + stop, True, counts
        counts += np.bincount(cells, minlength=4)
        n += block
        s_y = int(cum_y[-1])
        if n_max is not None and n >= n_max:
            return n, False, counts


def simulate_trial(design, sim, workers=1, capped=True):
    """Simulate the stopping rule M = inf{n : S_n > k_star}.

    With capped=True sampling stops at n_max = N0*, and a replication rejects
    iff M <= N0*. Replication i always uses the stream derived from
    (seed, i), so results do not depend on `workers`.
    """
    reps = sim.replications
    p = sim.cell_probs
    cum_p = np.cumsum(p)[:-1]
    n_max = design.n_max if capped else None
    m_star = np.empty(reps, dtype=np.int64)
    rejected = np.empty(reps, dtype=bool)
    counts = np.empty((reps, 4), dtype=np.int64)

    def run(lo, hi):
        for i in range(lo, hi):
            m, rej, c = _one_replication(replication_rng(sim.seed, i), cum_p,
                                         design.k_star, n_max, sim.eta)
            m_star[i], rejected[i], counts[i] = m, rej, c

    if workers <= 1:
        run(0, reps)
    else:
        bounds = np.linspace(0, reps, workers * 4 + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(lambda b: run(*b), zip(bounds[:-1], bounds[1:])))

    s_y = counts[:, 2] + counts[:, 3]
    return SimResult(design, sim, capped, m_star, rejected, s_y, counts[:, 2].copy(), counts)


# -------------------------------------------------- operating characteristics

@dataclass(frozen=True)
class OcRow:
    gamma: float
    theta: float
    reject_rate: float
    reject_se: float
    mean_events_to_signal: float


def rejection_sets(case, prior, design, schedule, test_mode=TestMode.STANDARD,
                   grade_threshold=DEFAULT_THRESHOLD):
    """For each look m, a boolean array over x = 0..m marking rejection."""
    test_mode = TestMode(test_mode)
    sets = []
    for m in schedule:
        rej = np.zeros(m + 1, dtype=bool)
        dist = bf_distribution(case, m, prior, design) if test_mode is TestMode.MODIFIED else None
        for x in range(m + 1):
            res = bayes_factor(case, Observation(m, x), prior, design)
            if dist is None:
                out = standard_test(res, grade_threshold)
            else:
                out = modified_test(res, dist)
            rej[x] = out.decision is Decision.REJECT
        sets.append(rej)
    return sets


def operating_characteristics(case, prior_spec, design, gamma_grid, sim, schedule,
                              test_mode=TestMode.STANDARD, grade_threshold=DEFAULT_THRESHOLD):
    """Monte Carlo rejection rate and mean events to signal over a grid of gamma.

    Events are revealed along `schedule` (cumulative event counts m); at each
    look X_m ~ Binomial(m, theta(gamma)) cumulatively and the Bayesian rule is
    applied. Non-rejecting replications are charged the final m.
    """
    gamma_grid = [float(g) for g in gamma_grid]
    schedule = [int(m) for m in schedule]
    if not gamma_grid or not schedule:
        raise ValidationError("gamma grid and schedule must be non-empty")
    if any(g <= 0 for g in gamma_grid):
        raise ValidationError("gamma values must be positive")
    if schedule[0] < 1 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValidationError("schedule must be strictly increasing positive event counts")
    case = HypothesisCase(case)
    prior = resolve_prior(prior_spec, design)
    sets = rejection_sets(case, prior, design, schedule, test_mode, grade_threshold)
    steps = np.diff([0] + schedule)
    reps = sim.replications
    rows = []
    for gi, g in enumerate(gamma_grid):
        theta = design.theta_of_gamma(g)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(sim.seed, spawn_key=(gi,))))
        inc = rng.binomial(steps[None, :], theta, size=(reps, len(schedule)))
        xs = np.cumsum(inc, axis=1)
        hit = np.column_stack([sets[j][xs[:, j]] for j in range(len(schedule))])
        any_hit = hit.any(axis=1)
        first = np.where(any_hit, hit.argmax(axis=1), len(schedule) - 1)
        terminal_m = np.asarray(schedule)[first]
        rate = float(any_hit.mean())
        rows.append(OcRow(g, theta, rate, math.sqrt(rate * (1 - rate) / reps),
                          float(terminal_m.mean())))
    return rows
