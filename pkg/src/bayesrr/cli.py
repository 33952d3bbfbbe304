"""Command-line interface: `bayesrr <command> [options]`.

Exit codes: 0 success, 2 invalid input, 3 infeasible design or numerical
failure.
"""
import argparse
import sys

from . import __version__
from .bayes import HypothesisCase, Observation, bayes_factor
from .decision import Decision
from .errors import (
    BoundaryModeError, DomainError, InfeasibleDesignError, NoSolutionError,
    NumericalError, ValidationError,
)
from .hpd import PosteriorBeta, hpd_interval
from .priors import Design, PriorSpec, resolve_prior, solve_informative
from .report import render
from .trial import (
    SimConfig, TrialDesign, analyze_sequence, bundled_points, design_fixed_sample,
    load_points, operating_characteristics, simulate_trial,
)
from .umpbt import umpbt_solution

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE = 0, 2, 3
CASES = (HypothesisCase.CASE1, HypothesisCase.CASE2, HypothesisCase.CASE3)


class CliError(Exception):
    def __init__(self, msg, code):
        super().__init__(msg)
        self.code = code


# ------------------------------------------------------------------- helpers

def _add_format(p):
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")


def _add_prior(p, with_design=True):
    p.add_argument("--prior", choices=("uniform", "jeffreys", "informative", "explicit"),
                   default="uniform")
    p.add_argument("--epsilon", type=float, help="informative prior: |gamma - 1| window")
    p.add_argument("--delta", type=float, help="informative prior: mass on the window")
    p.add_argument("--a", type=float, help="explicit prior: Beta a")
    p.add_argument("--b", type=float, help="explicit prior: Beta b")
    if with_design:
        p.add_argument("--z0", type=float, default=1.0, help="allocation odds B:A (default 1)")
        p.add_argument("--ell", type=float, default=1.0, help="prior odds of H0 (default 1)")


def _prior_spec(args):
    if args.prior == "informative":
        if args.epsilon is None or args.delta is None:
            raise ValidationError("--prior informative needs --epsilon and --delta")
        return PriorSpec.informative(args.epsilon, args.delta)
    if args.prior == "explicit":
        if args.a is None or args.b is None:
            raise ValidationError("--prior explicit needs --a and --b")
        return PriorSpec.explicit(args.a, args.b)
    return PriorSpec(args.prior)


def _design(args):
    return Design(z0=args.z0, ell=getattr(args, "ell", 1.0))


def _cases(arg):
    return CASES if arg == "all" else (HypothesisCase(int(arg)),)


def _points(args):
    return bundled_points() if args.data is None else load_points(args.data)


# ------------------------------------------------------------------ commands

def cmd_analyze(args):
    design = _design(args)
    spec = _prior_spec(args)
    points = _points(args)
    cases = _cases(args.case)
    per_case = {
        c: analyze_sequence(points, c, spec, design, test_mode=args.test,
                            grade_threshold=args.threshold,
                            beta_reference=args.beta_reference,
                            variant=args.psi_inverse, plateau=args.plateau,
                            stop_direction=args.stop_direction)
        for c in cases
    }
    rows = []
    for i, p in enumerate(points):
        row = {"index": p.index, "m": p.m, "x": p.x}
        for c in cases:
            rec = per_case[c][i]
            row["gamma_hat"] = rec.gamma_hat
            k = int(c)
            mod = rec.modified
            row.update({
                f"bf{k}": rec.bf,
                f"log_bf{k}": rec.log_bf,
                f"post{k}": rec.posterior_h0,
                f"grade{k}": rec.grade.grade if rec.grade else None,
                f"j{k}": rec.grade.j_index if rec.grade else None,
                f"std{k}": rec.standard.decision,
                f"std_err{k}": rec.standard.conditional_error,
                f"r{k}": rec.r,
                f"a{k}": rec.a,
                f"dec{k}": mod.decision if mod else None,
                f"err{k}": mod.conditional_error if mod else None,
                f"s{k}": mod.conditioning_stat if mod else None,
                f"stop{k}": rec.terminated_here,
            })
        rows.append(row)

    ks = [int(c) for c in cases]
    if args.format == "text":
        cols = ["index", "m", "x", "gamma_hat"]
        for k in ks:
            if args.test == "standard":
                cols += [f"bf{k}", f"post{k}", f"grade{k}", f"std{k}", f"stop{k}"]
            else:
                cols += [f"bf{k}", f"r{k}", f"a{k}", f"dec{k}", f"err{k}", f"stop{k}"]
    else:
        cols = ["index", "m", "x", "gamma_hat"]
        for k in ks:
            cols += [f"bf{k}", f"log_bf{k}", f"post{k}", f"grade{k}", f"j{k}", f"std{k}",
                     f"std_err{k}", f"r{k}", f"a{k}", f"dec{k}", f"err{k}", f"s{k}", f"stop{k}"]
    prior = resolve_prior(spec, design)
    params = {"case": args.case, "prior": args.prior, "prior_a": prior.a, "prior_b": prior.b,
              "z0": design.z0, "ell": design.ell, "test": args.test,
              "threshold": args.threshold, "beta_reference": args.beta_reference,
              "psi_inverse": args.psi_inverse, "plateau": args.plateau,
              "stop_direction": args.stop_direction}
    term = {f"termination{k}": next((r["index"] for r in rows if r[f"stop{k}"]), None) for k in ks}
    return render(args.format, "analyze", params, cols, rows, extra=term)


def cmd_hpd(args):
    design = _design(args)
    if not 0 < args.credibility < 1:
        raise ValidationError(f"--credibility must lie in (0, 1), got {args.credibility}")
    prior = resolve_prior(_prior_spec(args), design)
    obs = Observation(args.m, args.x)
    post = PosteriorBeta.from_data(obs, prior)
    iv = hpd_interval(post, args.credibility, design, allow_boundary=True)
    if iv.one_sided:
        print(f"warning: posterior Beta({post.a_post:g}, {post.b_post:g}) has its mode on "
              "the boundary; reporting a one-sided interval", file=sys.stderr)
    if iv.non_unique:
        print("warning: flat posterior; HPD is not unique, reporting the central interval",
              file=sys.stderr)
    row = {"m": obs.m, "x": obs.x, "a_post": post.a_post, "b_post": post.b_post,
           "credibility": iv.credibility, "theta_lo": iv.lo, "theta_hi": iv.hi,
           "gamma_lo": iv.gamma_lo, "gamma_hi": iv.gamma_hi,
           "one_sided": iv.one_sided, "non_unique": iv.non_unique}
    return render(args.format, "hpd", {"z0": design.z0, "prior": args.prior}, list(row), [row])


def cmd_umpbt(args):
    theta0 = args.theta0 if args.theta0 is not None else 1.0 / (1.0 + args.z0)
    if args.inv_lambda is not None:
        il, source = args.inv_lambda, "inv_lambda"
    elif args.from_bf is not None:
        il, source = args.from_bf, "observed_bf"
    elif args.x is not None:
        design = Design(z0=(1 - theta0) / theta0)
        prior = resolve_prior(_prior_spec(args), design)
        il = bayes_factor(HypothesisCase.CASE2, Observation(args.m, args.x), prior, design).bf
        source = "case2_bf_from_data"
    else:
        raise ValidationError("give one of --inv-lambda, --from-bf or --x")
    sol = umpbt_solution(args.m, theta0, il)
    row = {"m": sol.m, "theta0": sol.theta0, "inv_lambda": sol.evidence_threshold,
           "theta1": sol.theta1, "x_star": sol.x_star, "classical_alpha": sol.classical_alpha,
           "inv_lambda_lo": sol.lambda_range[0], "inv_lambda_hi": sol.lambda_range[1],
           "posterior_lo": sol.posterior_range[0], "posterior_hi": sol.posterior_range[1]}
    return render(args.format, "umpbt", {"threshold_source": source}, list(row), [row])


def _design_row(d):
    return {"eta0": d.eta0, "eta1": d.eta1, "alpha": d.alpha, "beta": d.beta,
            "n_max": d.n_max, "k_star": d.k_star,
            "achieved_alpha": d.achieved_alpha, "achieved_beta": d.achieved_beta}


def cmd_design(args):
    d = design_fixed_sample(args.eta0, args.eta1, args.alpha, args.beta)
    row = _design_row(d)
    return render(args.format, "design", {}, list(row), [row])


def cmd_simulate(args):
    if args.n_max is not None and args.k_star is not None:
        d = TrialDesign(args.eta0, args.eta1, args.alpha, args.beta, args.n_max, args.k_star)
    else:
        d = design_fixed_sample(args.eta0, args.eta1, args.alpha, args.beta)
    sim = SimConfig(args.p0, args.theta_a, args.theta_b, args.seed, args.reps)
    res = simulate_trial(d, sim, workers=args.workers, capped=not args.uncapped)
    row = {"n_max": d.n_max, "k_star": d.k_star, "eta": sim.eta, "z0": sim.z0,
           "replications": sim.replications, "seed": sim.seed, "capped": res.capped,
           "reject_rate": res.reject_rate, "reject_se": res.reject_se,
           "mean_m_star": res.mean_m_star, "se_m_star": res.se_m_star,
           "nb_mean": (d.k_star + 1) / sim.eta}
    return render(args.format, "simulate", {}, list(row), [row])


def cmd_prior_solve(args):
    p = solve_informative(Design(z0=args.z0), args.epsilon, args.delta)
    row = {"z0": args.z0, "epsilon": args.epsilon, "delta": args.delta, "a": p.a, "b": p.b}
    return render(args.format, "prior-solve", {}, list(row), [row])


def cmd_series(args):
    """Long-format posterior series for plotting (one row per point, case, prior)."""
    design = _design(args)
    points = _points(args)
    priors = {
        "uniform": PriorSpec.uniform(),
        "informative": PriorSpec.informative(args.epsilon, args.delta),
        "jeffreys": PriorSpec.jeffreys(),
    }
    rows = []
    for name, spec in priors.items():
        prior = resolve_prior(spec, design)
        for c in _cases(args.case):
            for p in points:
                res = bayes_factor(c, p.obs, prior, design)
                rows.append({"prior": name, "case": int(c), "index": p.index, "m": p.m,
                             "x": p.x, "gamma_hat": res.gamma_hat, "bf": res.bf,
                             "posterior_h0": res.posterior_h0,
                             "posterior_h1": res.posterior_h1})
    cols = ["prior", "case", "index", "m", "x", "gamma_hat", "bf", "posterior_h0", "posterior_h1"]
    fmt = "csv" if args.format == "text" else args.format
    return render(fmt, "series", {"z0": design.z0, "ell": design.ell}, cols, rows)


def _floats(s):
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {s!r}") from None


def cmd_oc(args):
    design = _design(args)
    spec = _prior_spec(args)
    schedule = ([int(v) for v in _floats(args.schedule)] if args.schedule
                else sorted({p.m for p in _points(args) if p.m >= 1}))
    # only the seed and replication count matter here
    sim = SimConfig(0.5, 0.5, 0.5, args.seed, args.reps)
    out = operating_characteristics(HypothesisCase(int(args.case)), spec, design,
                                    _floats(args.gammas), sim, schedule,
                                    test_mode=args.test, grade_threshold=args.threshold)
    rows = [{"gamma": r.gamma, "theta": r.theta, "reject_rate": r.reject_rate,
             "reject_se": r.reject_se, "mean_events_to_signal": r.mean_events_to_signal}
            for r in out]
    return render(args.format, "oc", {"case": args.case, "schedule": schedule}, list(rows[0]), rows)


# -------------------------------------------------------------------- parser

def build_parser():
    ap = argparse.ArgumentParser(prog="bayesrr", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="Bayes factors and tests along a data sequence")
    p.add_argument("--data", help="CSV with header index,m,x (default: bundled 24-point dataset)")
    p.add_argument("--case", choices=("1", "2", "3", "all"), default="all")
    _add_prior(p)
    p.add_argument("--test", choices=("standard", "modified"), default="standard")
    p.add_argument("--threshold", type=float, default=0.3162,
                   help="reject when bf is below this (default 0.3162)")
    p.add_argument("--beta-reference", choices=("own", "final"), default="own",
                   help="bf distribution for acceptance errors: each point's m, or the last m")
    p.add_argument("--psi-inverse", choices=("fixed", "literal"), default="fixed")
    p.add_argument("--plateau", choices=("upper", "lower"), default="upper",
                   help="generalized-inverse convention on flat CDF stretches")
    p.add_argument("--stop-direction", choices=("harm", "any"), default="harm")
    _add_format(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("hpd", help="HPD interval for theta and gamma")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    _add_prior(p)
    p.add_argument("--credibility", type=float, default=0.95)
    _add_format(p)
    p.set_defaults(func=cmd_hpd)

    p = sub.add_parser("umpbt", help="UMPBT alternative, rejection threshold and ranges")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--theta0", type=float)
    p.add_argument("--inv-lambda", type=float)
    p.add_argument("--from-bf", type=float, help="use an observed Bayes factor as 1/lambda")
    p.add_argument("--x", type=int, help="compute the Case 2 Bayes factor at (m, x) as 1/lambda")
    _add_prior(p)
    _add_format(p)
    p.set_defaults(func=cmd_umpbt)

    def design_args(p, required=True):
        p.add_argument("--eta0", type=float, required=required)
        p.add_argument("--eta1", type=float, required=required)
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--beta", type=float, default=0.2)

    p = sub.add_parser("design", help="fixed-sample design (N0*, k*)")
    design_args(p)
    _add_format(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="simulate the sequential stopping rule")
    design_args(p)
    p.add_argument("--n-max", type=int, help="use this N0* instead of searching")
    p.add_argument("--k-star", type=int, help="use this k* instead of searching")
    p.add_argument("--p0", type=float, default=0.5, help="arm A allocation probability")
    p.add_argument("--theta-a", type=float, required=True)
    p.add_argument("--theta-b", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=10000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--uncapped", action="store_true", help="do not truncate at N0*")
    _add_format(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("prior-solve", help="solve the informative Beta prior")
    p.add_argument("--z0", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    _add_format(p)
    p.set_defaults(func=cmd_prior_solve)

    p = sub.add_parser("series", help="plot-ready posterior series for all three priors")
    p.add_argument("--data")
    p.add_argument("--case", choices=("1", "2", "3", "all"), default="all")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.55)
    p.add_argument("--z0", type=float, default=1.0)
    p.add_argument("--ell", type=float, default=1.0)
    _add_format(p)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("oc", help="Monte Carlo operating characteristics")
    p.add_argument("--data")
    p.add_argument("--case", choices=("1", "2", "3"), default="2")
    _add_prior(p)
    p.add_argument("--gammas", default="0.5,1,1.5,2")
    p.add_argument("--schedule", help="comma-separated look sizes (default: m of --data)")
    p.add_argument("--test", choices=("standard", "modified"), default="standard")
    p.add_argument("--threshold", type=float, default=0.3162)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=10000)
    _add_format(p)
    p.set_defaults(func=cmd_oc)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except (ValidationError, DomainError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (InfeasibleDesignError, NoSolutionError, NumericalError, BoundaryModeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
