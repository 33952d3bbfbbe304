import numpy as np
import pytest

from bayesrr.errors import NoSolutionError, ValidationError
from bayesrr.priors import (
    BetaParams, Design, PriorKind, PriorSpec, resolve_prior, solve_informative,
    theta_window, window_mass,
)


def test_resolve_simple_priors(design):
    assert resolve_prior(PriorSpec.uniform(), design) == BetaParams(1.0, 1.0)
    assert resolve_prior(PriorSpec.jeffreys(), design) == BetaParams(0.5, 0.5)
    assert resolve_prior(PriorSpec.explicit(2.0, 3.5), design) == BetaParams(2.0, 3.5)


def test_informative_prior_value(design):
    p = resolve_prior(PriorSpec.informative(0.1, 0.55), design)
    assert p.a == pytest.approx(113.8288, abs=0.01)
    assert p.a == p.b
    assert window_mass(p.a, design, 0.1) == pytest.approx(0.55, abs=1e-10)


def _grid_oracle(design, eps, delta):
    # coarse log grid then bisection on the bracketing cell
    grid = np.geomspace(1e-3, 1e4, 2000)
    mass = np.array([window_mass(a, design, eps) for a in grid])
    i = int(np.flatnonzero(mass >= delta)[0])
    lo, hi = grid[i - 1], grid[i]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if window_mass(mid, design, eps) < delta:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_informative_small_delta_vs_grid(design):
    p = solve_informative(design, 0.1, 0.20)
    ref = _grid_oracle(design, 0.1, 0.20)
    assert abs(window_mass(p.a, design, 0.1) - 0.20) < 1e-8
    assert p.a == pytest.approx(ref, rel=1e-6)


@pytest.mark.parametrize("z0", [0.5, 1.0, 2.0, 3.0])
def test_informative_mean_matches_theta0(z0):
    d = Design(z0=z0)
    p = solve_informative(d, 0.2, 0.5)
    assert p.mean == pytest.approx(d.theta0, abs=1e-12)


@pytest.mark.parametrize("z0", [0.5, 1.0, 4.0])
def test_window_mass_increasing_in_a(z0):
    d = Design(z0=z0)
    m = [window_mass(a, d, 0.1) for a in (1, 10, 100, 1000)]
    assert all(y > x for x, y in zip(m, m[1:]))


@pytest.mark.parametrize("eps", [0.01, 0.3, 0.9, 0.999])
@pytest.mark.parametrize("z0", [0.25, 1.0, 3.0])
def test_window_brackets_theta0(eps, z0):
    d = Design(z0=z0)
    lo, hi = theta_window(d, eps)
    assert lo < d.theta0 < hi


def test_unreachable_delta():
    with pytest.raises(NoSolutionError):
        solve_informative(Design(), 1e-9, 0.999999)


@pytest.mark.parametrize("kw", [
    dict(kind="informative", epsilon=1.2, delta=0.5),
    dict(kind="informative", epsilon=0.1, delta=1.0),
    dict(kind="informative", epsilon=0.1),
    dict(kind="explicit", a=1.0),
    dict(kind="explicit", a=-1.0, b=1.0),
])
def test_invalid_specs(kw):
    with pytest.raises(ValidationError):
        PriorSpec(**kw)


def test_design_validation_and_maps():
    d = Design(z0=3.0)
    assert d.theta0 == 0.25
    assert d.gamma_of_theta(d.theta_of_gamma(1.7)) == pytest.approx(1.7)
    with pytest.raises(ValidationError):
        Design(z0=0)
    with pytest.raises(ValidationError):
        Design(ell=-1)
    assert PriorSpec("uniform").kind is PriorKind.UNIFORM
