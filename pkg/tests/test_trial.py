import math
from pathlib import Path

import numpy as np
import pytest

from bayesrr.bayes import Observation, bayes_factor
from bayesrr.decision import Decision
from bayesrr.errors import InfeasibleDesignError, ValidationError
from bayesrr.priors import BetaParams, Design, PriorSpec
from bayesrr.special_fns import binom_tail
from bayesrr.trial import (
    GroupDataPoint, SimConfig, TrialDesign, analyze_sequence, design_fixed_sample,
    load_points, operating_characteristics, parse_points, simulate_trial,
    termination_index,
)

from conftest import PRIOR_SPECS, reference_rows

ROOT = Path(__file__).resolve().parents[1]
D = Design()


def test_bundled_dataset_matches_repo_copy(points):
    shipped = ROOT / "src" / "bayesrr" / "data" / "h1n1_24.csv"
    assert (ROOT / "data" / "h1n1_24.csv").read_bytes() == shipped.read_bytes()
    assert len(points) == 24
    assert (points[0].m, points[0].x) == (12, 1)
    assert (points[-1].m, points[-1].x) == (251, 157)


def test_load_points_from_file(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("index,m,x\n1,10,4\n2,20,12\n")
    assert load_points(f) == [GroupDataPoint(1, 10, 4), GroupDataPoint(2, 20, 12)]


@pytest.mark.parametrize("text,fragment", [
    ("", "empty"),
    ("index,m,x\n", "no data rows"),
    ("idx,m,x\n1,2,1\n", ":1: expected header"),
    ("index,m,x\n1,10,4\n2,abc,5\n", ":3: non-integer"),
    ("index,m,x\n1,10,4\n2,20\n", ":3: expected 3 fields"),
    ("index,m,x\n1,10,11\n", ":2: need 0 <= x <= m"),
    ("index,m,x\n1,10,4\n2,9,4\n", "data point 2"),
    ("index,m,x\n1,10,4\n2,12,3\n", "data point 2"),
    ("index,m,x\n1,10,4\n2,11,11\n", "data point 2"),
])
def test_bad_csv(text, fragment):
    with pytest.raises(ValidationError, match=fragment):
        parse_points(text, source="f.csv")


@pytest.mark.parametrize("prior,expected", [
    ("uniform", (18, 18, 14)),
    ("informative", (17, 17, 15)),
    ("jeffreys", (18, 19, 14)),
])
def test_termination_indices(points, prior, expected):
    got = tuple(termination_index(analyze_sequence(points, c, PRIOR_SPECS[prior], D))
                for c in (1, 2, 3))
    assert got == expected


def test_stop_direction_any_counts_reduced_risk(points):
    recs = analyze_sequence(points, 1, PRIOR_SPECS["uniform"], D, stop_direction="any")
    assert termination_index(recs) == 1
    assert sum(r.terminated_here for r in recs) == 1


def test_all_points_analyzed_after_termination(points):
    recs = analyze_sequence(points, 3, PRIOR_SPECS["uniform"], D)
    assert len(recs) == 24
    assert recs[13].terminated_here and recs[13].bf == pytest.approx(0.2880, abs=5e-4)


def test_modified_record(points):
    recs = analyze_sequence(points, 1, PRIOR_SPECS["informative"], D, test_mode="modified")
    rec = recs[16]
    assert rec.modified.decision is Decision.REJECT
    assert rec.modified.conditional_error == pytest.approx(0.2249, abs=5e-4)


@pytest.mark.parametrize("prior", ["uniform", "informative", "jeffreys"])
def test_sequence_reproduces_reference_cases_1_2(points, prior):
    dec = reference_rows("decisions", prior)
    for c in (1, 2):
        recs = analyze_sequence(points, c, PRIOR_SPECS[prior], D, test_mode="modified",
                                beta_reference="final")
        for rec, row in zip(recs, dec):
            assert rec.modified.decision.value == row[f"dec{c}"]
            if row[f"err{c}"] == "NA":
                assert rec.modified.conditional_error is None
            else:
                assert rec.modified.conditional_error == pytest.approx(float(row[f"err{c}"]), abs=5e-4)


def test_srp_path_independence(points):
    spec = PRIOR_SPECS["informative"]
    for c in (1, 2, 3):
        full = analyze_sequence(points, c, spec, D, test_mode="modified")[-1]
        last = analyze_sequence(points[-1:], c, spec, D, test_mode="modified")[-1]
        assert (full.bf, full.log_bf, full.posterior_h0, full.r, full.a) == \
            (last.bf, last.log_bf, last.posterior_h0, last.r, last.a)
        assert full.modified == last.modified


def test_design_infeasible():
    with pytest.raises(InfeasibleDesignError):
        design_fixed_sample(0.5, 0.5, 0.05, 0.2)
    with pytest.raises(InfeasibleDesignError):
        design_fixed_sample(0.5, 0.4, 0.05, 0.2)
    with pytest.raises(InfeasibleDesignError):
        design_fixed_sample(0.5, 0.5000001, 1e-6, 1e-6, n_cap=2000)


def _exhaustive_design(eta0, eta1, alpha, beta, n_cap):
    for n in range(1, n_cap + 1):
        for k in range(0, n + 1):
            if binom_tail(n, k + 1, eta0) <= alpha and 1 - binom_tail(n, k + 1, eta1) <= beta:
                return n, k
    return None


@pytest.mark.parametrize("args", [(0.1, 0.9, 0.2, 0.2), (0.2, 0.6, 0.1, 0.1), (0.3, 0.7, 0.05, 0.2)])
def test_design_matches_exhaustive_scan(args):
    d = design_fixed_sample(*args)
    assert (d.n_max, d.k_star) == _exhaustive_design(*args, n_cap=max(20, d.n_max))
    assert d.achieved_alpha <= args[2] and d.achieved_beta <= args[3]
    assert binom_tail(d.n_max, d.k_star + 1, args[0]) == pytest.approx(d.achieved_alpha)


def test_design_postcondition_larger():
    d = design_fixed_sample(0.05, 0.1, 0.05, 0.2)
    assert binom_tail(d.n_max, d.k_star + 1, 0.05) <= 0.05
    assert 1 - binom_tail(d.n_max, d.k_star + 1, 0.1) <= 0.2
    # one fewer patient cannot work for any k
    n = d.n_max - 1
    assert not any(binom_tail(n, k + 1, 0.05) <= 0.05 and 1 - binom_tail(n, k + 1, 0.1) <= 0.2
                   for k in range(n + 1))


def test_sim_config_derived():
    s = SimConfig(0.25, 0.2, 0.1, seed=1, replications=10)
    assert s.z0 == pytest.approx(3.0)
    assert s.eta == pytest.approx(0.2 * 0.25 + 0.1 * 0.75)
    assert s.cell_probs.sum() == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        SimConfig(1.0, 0.2, 0.1, seed=1, replications=10)
    with pytest.raises(ValidationError):
        SimConfig(0.5, 0.2, 0.1, seed=-1, replications=10)


def test_simulation_accounting():
    d = TrialDesign(0.1, 0.2, 0.05, 0.2, n_max=300, k_star=30)
    res = simulate_trial(d, SimConfig(0.4, 0.15, 0.1, seed=7, replications=2000))
    assert np.array_equal(res.counts.sum(axis=1), res.m_star)
    assert np.array_equal(res.s_y, res.counts[:, 2] + res.counts[:, 3])
    assert np.all(res.m_star <= d.n_max)
    assert np.all(res.s_y[res.rejected] == d.k_star + 1)
    assert np.all(res.s_y[~res.rejected] <= d.k_star)
    assert np.all(res.m_star[~res.rejected] == d.n_max)
    # the stop happens on an event patient
    assert np.all(res.s_y <= d.k_star + 1)


def test_never_rejects_with_huge_k():
    d = TrialDesign(0.1, 0.2, 0.05, 0.2, n_max=500, k_star=10 ** 6)
    res = simulate_trial(d, SimConfig(0.5, 0.1, 0.1, seed=3, replications=200))
    assert not res.rejected.any()
    assert np.all(res.m_star == 500)


def test_simulation_deterministic_across_workers():
    d = design_fixed_sample(0.05, 0.1, 0.05, 0.2)
    cfg = SimConfig(0.5, 0.05, 0.05, seed=2024, replications=3000)
    a = simulate_trial(d, cfg, workers=1)
    b = simulate_trial(d, cfg, workers=6)
    c = simulate_trial(d, cfg, workers=1)
    for x, y in ((a, b), (a, c)):
        assert np.array_equal(x.m_star, y.m_star)
        assert np.array_equal(x.counts, y.counts)
        assert np.array_equal(x.rejected, y.rejected)
    other = simulate_trial(d, SimConfig(0.5, 0.05, 0.05, seed=2025, replications=3000))
    assert not np.array_equal(a.m_star, other.m_star)


def test_negative_binomial_mean_small():
    d = TrialDesign(0.1, 0.2, 0.05, 0.2, n_max=1, k_star=9)
    cfg = SimConfig(0.5, 0.3, 0.1, seed=11, replications=20000)
    res = simulate_trial(d, cfg, capped=False)
    assert res.rejected.all()
    assert abs(res.mean_m_star - (d.k_star + 1) / cfg.eta) < 3 * res.se_m_star


def test_size_at_null_rate():
    d = design_fixed_sample(0.1, 0.2, 0.05, 0.2)
    cfg = SimConfig(0.5, 0.1, 0.1, seed=5, replications=20000)
    res = simulate_trial(d, cfg)
    assert res.reject_rate <= d.alpha + 3 * res.reject_se
    assert res.reject_rate == pytest.approx(d.achieved_alpha, abs=4 * res.reject_se)


def test_oc_single_look_matches_exact():
    spec = PriorSpec.uniform()
    sim = SimConfig(0.5, 0.5, 0.5, seed=9, replications=400000)
    (row,) = operating_characteristics(2, spec, D, [1.0], sim, [218])
    rej = [x for x in range(219)
           if bayes_factor(2, Observation(218, x), BetaParams(1, 1), D).bf < 10 ** -0.5]
    exact = binom_tail(218, min(rej), 0.5)
    assert rej == list(range(min(rej), 219))
    assert abs(row.reject_rate - exact) < 3 * math.sqrt(exact * (1 - exact) / 400000) + 1e-12
    assert row.mean_events_to_signal == 218


def test_oc_large_gamma_rejects(points):
    sim = SimConfig(0.5, 0.5, 0.5, seed=1, replications=2000)
    rows = operating_characteristics(2, PriorSpec.uniform(), D, [1.0, 1e6], sim,
                                     [p.m for p in points])
    assert rows[1].reject_rate == 1.0
    assert rows[1].mean_events_to_signal < rows[0].mean_events_to_signal
    again = operating_characteristics(2, PriorSpec.uniform(), D, [1.0, 1e6], sim,
                                      [p.m for p in points])
    assert rows == again


@pytest.mark.parametrize("grid,schedule", [([], [10]), ([1.0], []), ([-1.0], [10]), ([1.0], [10, 5])])
def test_oc_validation(grid, schedule):
    sim = SimConfig(0.5, 0.5, 0.5, seed=1, replications=10)
    with pytest.raises(ValidationError):
        operating_characteristics(2, PriorSpec.uniform(), D, grid, sim, schedule)
