"""Command-line entry point (``pbmle``).

Every command prints one JSON document (``"schema": "1"``) on stdout, except
``experiment recovery`` which writes CSV. Exit codes: 0 success, 1 a check
found violations, 2 usage error, 3 input or format error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .checks import FuzzSpace, fuzz_weak_reinforcement
from .errors import PBError
from .experiments import ExperimentConfig, emit_csv, format_rate, run_recovery
from .fixtures import verify_counterexamples
from .mle import TRUTH_SPACES, mle
from .model import Instance, Profile, RuleOutcome
from .noise import MODEL_KINDS, brute_force_normaliser, closed_form_normaliser, likelihood, sample_profile
from .pabulib import PbParseError, parse_pb, read_pb, to_instance_profile
from .proportional import mes_runs, phragmen_runs
from .rules import RULE_NAMES, get_rule, rule_score
from .welfare import SCORE_KINDS

SCHEMA = "1"
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def rational(x) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "decimal": format_rate(x)}


def _emit(doc: dict) -> None:
    print(json.dumps({"schema": SCHEMA, **doc}, indent=2))


def _ids(text: str) -> frozenset[str]:
    return frozenset(p.strip() for p in text.split(",") if p.strip())


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"{what} must be a comma-separated list of integers, got {text!r}") from None


def _costs(text: str):
    """``"1,2,3"`` names projects p1..pn; ``"a=1,b=2"`` names them explicitly."""
    if "=" not in text:
        return _int_list(text, "--costs")
    out = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"cannot mix named and unnamed costs in {text!r}")
        try:
            out[key.strip()] = int(value)
        except ValueError:
            raise InputError(f"cost of {key.strip()!r} is not an integer: {value!r}") from None
    return out


# argument groups -----------------------------------------------------------

def _add_instance(p: argparse.ArgumentParser, profile: bool = True) -> None:
    g = p.add_argument_group("instance")
    g.add_argument("--instance", metavar="FILE.pb", help="read instance (and profile) from a .pb file")
    g.add_argument("--costs", help='project costs, "1,1,2" (ids p1..pn) or "a=1,b=2"')
    g.add_argument("--budget", type=int, help="budget limit")
    if profile:
        g.add_argument("--profile", help='inline profile, agents separated by "|", e.g. "p1|p2|p1,p2"; "-" is an empty ballot')


def _load(args, need_profile: bool = True) -> tuple[Instance, Profile | None]:
    profile_text = getattr(args, "profile", None)
    if args.instance:
        if args.costs is not None or args.budget is not None:
            raise InputError("--instance cannot be combined with --costs/--budget")
        inst, prof = read_pb(args.instance)
        if profile_text is not None:
            prof = Profile.parse(profile_text)
    else:
        if args.costs is None or args.budget is None:
            raise InputError("give either --instance FILE.pb or both --costs and --budget")
        inst = Instance.from_costs(_costs(args.costs), args.budget)
        prof = Profile.parse(profile_text) if profile_text is not None else None
    if need_profile and prof is None:
        raise InputError("a profile is required: use --profile or an --instance file with votes")
    if prof is not None:
        prof.validate(inst)
    return inst, prof


def _rule_id(args) -> str:
    if args.rule == "mes":
        return f"mes-{args.satisfaction}"
    return args.rule


# commands --------------------------------------------------------------------

def cmd_rule_run(args) -> int:
    inst, prof = _load(args)
    rule = _rule_id(args)
    outcome = get_rule(rule)(inst, prof)
    doc = {"command": "rule run", "rule": rule, "winners": outcome.to_lists()}
    if rule in SCORE_KINDS:
        s = rule_score(rule, inst, prof, outcome.winners[0])
        doc["score"] = rational(s.value)
        doc["degenerate"] = s.degenerate
    if args.trace and rule in ("phragmen", "mes-card", "mes-cost"):
        runs = phragmen_runs(inst, prof) if rule == "phragmen" else mes_runs(inst, prof, rule[4:])
        doc["runs"] = [
            {
                "purchases": [
                    {"project": pu.project, "at": rational(pu.at), "paid": rational(pu.total)}
                    for pu in run.purchases
                ],
                "stopped_on_overflow": run.stopped_on_overflow,
            }
            for run in runs
        ]
    _emit(doc)
    return EXIT_OK


def cmd_mle(args) -> int:
    inst, prof = _load(args)
    outcome = mle(args.model, inst, prof, args.space)
    _emit({
        "command": "mle",
        "model": args.model,
        "space": args.space,
        "winners": outcome.to_lists(),
        "likelihood": rational(likelihood(args.model, inst, outcome.winners[0], prof)),
    })
    return EXIT_OK


def cmd_sample(args) -> int:
    inst, _ = _load(args, need_profile=False)
    prof = sample_profile(args.model, inst, _ids(args.truth), args.n, args.seed)
    _emit({
        "command": "sample",
        "model": args.model,
        "truth": inst.ordered(_ids(args.truth)),
        "seed": args.seed,
        "ballots": [inst.ordered(b) for b in prof],
        "profile": prof.format(inst),
    })
    return EXIT_OK


def cmd_z_factor(args) -> int:
    inst, _ = _load(args, need_profile=False)
    truth = _ids(args.truth)
    z = closed_form_normaliser(args.model, inst, truth)
    doc = {"command": "z-factor", "model": args.model, "truth": inst.ordered(truth), "z": rational(z)}
    if args.cross_check:
        brute = brute_force_normaliser(args.model, inst, truth)
        doc["brute_force"] = rational(brute)
        doc["agree"] = brute == z
    _emit(doc)
    return EXIT_OK if doc.get("agree", True) else EXIT_VIOLATION


def cmd_likelihood(args) -> int:
    inst, prof = _load(args)
    truth = _ids(args.truth)
    _emit({
        "command": "likelihood",
        "model": args.model,
        "truth": inst.ordered(truth),
        "likelihood": rational(likelihood(args.model, inst, truth, prof)),
    })
    return EXIT_OK


def cmd_check_reinforcement(args) -> int:
    rule = _rule_id(args)
    space = FuzzSpace(args.min_projects, args.max_projects, args.max_cost, args.max_agents, args.density)
    summary = fuzz_weak_reinforcement(rule, args.trials, args.seed, space, n_jobs=args.jobs)
    _emit({"command": "check reinforcement", "seed": args.seed, **summary.to_dict()})
    return EXIT_VIOLATION if summary.violations else EXIT_OK


def cmd_verify_counterexamples(args) -> int:
    checks = verify_counterexamples()
    violations, refutations = [], []
    for c in checks:
        if c.violation is not None:
            violations.append({"fixture": c.fixture, "reproduced": c.reproduced, **c.violation.to_dict()})
        if c.refutation is not None:
            r = c.refutation
            refutations.append({
                "fixture": c.fixture,
                "rule": r.rule,
                "reproduced": c.reproduced,
                "truths": [list(r.truth_a), list(r.truth_b)],
                "relations": {",".join(k) or "-": v for k, v in r.relations.items()},
                "contradiction": r.contradiction,
            })
    refuted = [c for c in checks if c.refuted]
    _emit({
        "command": "verify counterexamples",
        "reproduced": all(c.reproduced for c in checks),
        "all_refuted": len(refuted) == len(checks),
        "violations": violations,
        "refutations": refutations,
    })
    return EXIT_VIOLATION if refuted else EXIT_OK


def cmd_experiment_recovery(args) -> int:
    inst, _ = _load(args, need_profile=False)
    rules = tuple(r.strip() for r in args.rules.split(",") if r.strip())
    cfg = ExperimentConfig(
        args.model, inst, _ids(args.truth), rules, tuple(_int_list(args.n_grid, "--n-grid")),
        args.trials, args.seed, args.space,
    )
    text = emit_csv(run_recovery(cfg, n_jobs=args.jobs))
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_pb_validate(args) -> int:
    try:
        with open(args.file, "rb") as fh:
            pb = parse_pb(fh.read())
    except PbParseError as exc:
        _emit({"command": "pb validate", "file": args.file, "valid": False, "error": exc.to_dict()})
        print(f"{args.file}:{exc}", file=sys.stderr)
        return EXIT_INPUT
    inst, prof = to_instance_profile(pb)
    _emit({
        "command": "pb validate",
        "file": args.file,
        "valid": True,
        "num_projects": len(inst),
        "num_votes": len(prof),
        "budget": inst.budget,
    })
    return EXIT_OK


# parser --------------------------------------------------------------------

def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbmle", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    rule = sub.add_parser("rule", help="run a voting rule").add_subparsers(dest="action", required=True)
    p = rule.add_parser("run", help="run a rule and print its winning allocations")
    p.add_argument("--rule", required=True, choices=RULE_NAMES + ("mes",))
    p.add_argument("--satisfaction", choices=("card", "cost"), default="card", help="satisfaction for --rule mes")
    p.add_argument("--trace", action="store_true", help="include purchase traces for phragmen/mes")
    _add_instance(p)
    p.set_defaults(func=cmd_rule_run)

    p = sub.add_parser("mle", help="brute-force maximum-likelihood ground truths")
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("--space", choices=TRUTH_SPACES, default="all")
    _add_instance(p)
    p.set_defaults(func=cmd_mle)

    p = sub.add_parser("sample", help="draw a seeded profile from a noise model")
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("--truth", required=True, help='ground truth, e.g. "p1,p2"')
    p.add_argument("--n", type=_positive, required=True, help="number of agents")
    p.add_argument("--seed", type=int, default=0)
    _add_instance(p, profile=False)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("z-factor", help="normalisation factor of a noise model")
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("--truth", required=True)
    p.add_argument("--no-cross-check", dest="cross_check", action="store_false",
                   help="skip the brute-force sum over all ballots")
    _add_instance(p, profile=False)
    p.set_defaults(func=cmd_z_factor)

    p = sub.add_parser("likelihood", help="exact likelihood of a profile given a ground truth")
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("--truth", required=True)
    _add_instance(p)
    p.set_defaults(func=cmd_likelihood)

    check = sub.add_parser("check", help="property checks").add_subparsers(dest="action", required=True)
    p = check.add_parser("reinforcement", help="fuzz a rule for weak-reinforcement violations")
    p.add_argument("--rule", required=True, choices=RULE_NAMES + ("mes",))
    p.add_argument("--satisfaction", choices=("card", "cost"), default="card")
    p.add_argument("--trials", type=_positive, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-projects", type=_positive, default=1)
    p.add_argument("--max-projects", type=_positive, default=4)
    p.add_argument("--max-cost", type=_positive, default=1, help="1 gives unit-cost instances")
    p.add_argument("--max-agents", type=int, default=9, help="combined agents of both profiles (>= 2)")
    p.add_argument("--density", type=float, default=0.5, help="approval probability per project")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_check_reinforcement)

    verify = sub.add_parser("verify", help="replay built-in counterexamples").add_subparsers(dest="action", required=True)
    p = verify.add_parser("counterexamples", help="reproduce every impossibility counterexample (exit 1 = refuted as expected)")
    p.set_defaults(func=cmd_verify_counterexamples)

    exp = sub.add_parser("experiment", help="Monte-Carlo experiments").add_subparsers(dest="action", required=True)
    p = exp.add_parser("recovery", help="ground-truth recovery rates as CSV")
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("--truth", required=True)
    p.add_argument("--rules", required=True, help='comma-separated rule names; "mle" is the brute-force MLE')
    p.add_argument("--n-grid", required=True, help='agent counts, e.g. "1,5,25"')
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--space", choices=TRUTH_SPACES, default="all")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="-", help='CSV destination ("-" for stdout)')
    _add_instance(p, profile=False)
    p.set_defaults(func=cmd_experiment_recovery)

    pb = sub.add_parser("pb", help=".pb file utilities").add_subparsers(dest="action", required=True)
    p = pb.add_parser("validate", help="parse a .pb file and report diagnostics")
    p.add_argument("file")
    p.set_defaults(func=cmd_pb_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "max_agents", 2) < 2:
        parser.error("--max-agents must be at least 2")
    if getattr(args, "min_projects", 1) > getattr(args, "max_projects", 1):
        parser.error("--min-projects exceeds --max-projects")
    if not 0 <= getattr(args, "density", 0) <= 1:
        parser.error("--density must lie in [0, 1]")
    try:
        return args.func(args)
    except (InputError, PBError, ValueError, OSError) as exc:
        print(f"pbmle: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
