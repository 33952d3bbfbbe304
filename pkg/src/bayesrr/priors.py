"""Prior specifications for theta and their resolution to Beta hyperparameters."""
from dataclasses import dataclass
from enum import Enum
import math

from .errors import NoSolutionError, ValidationError
from .special_fns import reg_inc_beta


class PriorKind(str, Enum):
    UNIFORM = "uniform"
    JEFFREYS = "jeffreys"
    INFORMATIVE = "informative"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0) or math.isinf(self.a) or math.isinf(self.b):
            raise ValidationError(f"Beta parameters must be finite and positive, got ({self.a}, {self.b})")

    @property
    def mean(self):
        return self.a / (self.a + self.b)


@dataclass(frozen=True)
class Design:
    """Allocation odds z0 (arm B : arm A) and prior odds ell of H0 against H1."""
    z0: float = 1.0
    ell: float = 1.0

    def __post_init__(self):
        if not (self.z0 > 0 and math.isfinite(self.z0)):
            raise ValidationError(f"z0 must be positive and finite, got {self.z0}")
        if not (self.ell > 0 and math.isfinite(self.ell)):
            raise ValidationError(f"ell must be positive and finite, got {self.ell}")

    @property
    def theta0(self):
        return 1.0 / (1.0 + self.z0)

    def gamma_of_theta(self, theta):
        """Relative risk corresponding to theta (increasing map)."""
        return self.z0 * theta / (1.0 - theta)

    def theta_of_gamma(self, gamma):
        return gamma / (self.z0 + gamma)


@dataclass(frozen=True)
class PriorSpec:
    kind: PriorKind
    epsilon: float = None
    delta: float = None
    a: float = None
    b: float = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PriorKind(self.kind))
        if self.kind is PriorKind.INFORMATIVE:
            if self.epsilon is None or not 0 < self.epsilon < 1:
                raise ValidationError(f"informative prior needs 0 < epsilon < 1, got {self.epsilon}")
            if self.delta is None or not 0 < self.delta < 1:
                raise ValidationError(f"informative prior needs 0 < delta < 1, got {self.delta}")
        elif self.kind is PriorKind.EXPLICIT:
            if self.a is None or self.b is None:
                raise ValidationError("explicit prior needs both a and b")
            BetaParams(self.a, self.b)

    @classmethod
    def uniform(cls):
        return cls(PriorKind.UNIFORM)

    @classmethod
    def jeffreys(cls):
        return cls(PriorKind.JEFFREYS)

    @classmethod
    def informative(cls, epsilon, delta):
        return cls(PriorKind.INFORMATIVE, epsilon=epsilon, delta=delta)

    @classmethod
    def explicit(cls, a, b):
        return cls(PriorKind.EXPLICIT, a=a, b=b)


A_LO, A_HI = 1e-6, 1e7
DELTA_TOL = 1e-10


def theta_window(design, epsilon):
    """theta-interval equivalent to |gamma - 1| <= epsilon."""
    z0 = design.z0
    return (1 - epsilon) / (z0 + 1 - epsilon), (1 + epsilon) / (z0 + 1 + epsilon)


def window_mass(a, design, epsilon):
    """Prior mass of the epsilon-window under Beta(a, z0 * a)."""
    lo, hi = theta_window(design, epsilon)
    b = design.z0 * a
    return reg_inc_beta(hi, a, b) - reg_inc_beta(lo, a, b)


def solve_informative(design, epsilon, delta):
    """Beta prior with mean theta0 putting mass delta on |gamma - 1| <= epsilon.

    The mean constraint fixes b = z0 * a; the mass is increasing in a, so
    a is located by bisection.
    """
    if not 0 < epsilon < 1:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < delta < 1:
        raise ValidationError(f"delta must lie in (0, 1), got {delta}")
    lo, hi = A_LO, A_HI
    f_lo = window_mass(lo, design, epsilon) - delta
    f_hi = window_mass(hi, design, epsilon) - delta
    if f_lo > 0 or f_hi < 0:
        raise NoSolutionError(
            f"window mass {delta} not attainable for a in [{A_LO:g}, {A_HI:g}]"
        )
    # bisect in log(a); the bracket spans 13 decades
    while True:
        mid = math.sqrt(lo * hi)
        f_mid = window_mass(mid, design, epsilon) - delta
        if abs(f_mid) <= DELTA_TOL or hi / lo - 1 < 1e-15:
            break
        if f_mid < 0:
            lo = mid
        else:
            hi = mid
    return BetaParams(mid, design.z0 * mid)


def resolve_prior(spec, design):
    if spec.kind is PriorKind.UNIFORM:
        return BetaParams(1.0, 1.0)
    if spec.kind is PriorKind.JEFFREYS:
        return BetaParams(0.5, 0.5)
    if spec.kind is PriorKind.EXPLICIT:
        return BetaParams(float(spec.a), float(spec.b))
    return solve_informative(design, spec.epsilon, spec.delta)
