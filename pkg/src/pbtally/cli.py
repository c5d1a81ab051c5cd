"""Command-line front door.

Subcommands: gen, validate, classify, tally, attack, fixtures.  Reports
print as text by default; --format structured switches to the canonical
JSON forms so outputs are diffable and golden-file testable.  Exit
codes: 0 ok, 2 validation or parse error, 3 infeasible instance, 4
capacity (a cap was exceeded or no solver applies).
"""

import argparse
import json
import sys
from pathlib import Path

from . import formats, gen, model, profiles, solvers, strategy
from .errors import EXIT_INVALID, PBError


def _load_instance(path, tiebreak=None):
    inst = formats.parse_instance(formats.read_text(path))
    if tiebreak is not None:
        inst = model.Instance(
            inst.budget, inst.projects, inst.groups, inst.labels,
            tiebreak, inst.allow_nonlaminar,
        )
    return model.validate_instance(inst)


def _load_votes(instance, path):
    votes = formats.parse_votes(formats.read_text(path))
    return model.validate_profile(instance, votes)


def _policy_override(spec_str):
    if spec_str is None:
        return None
    if spec_str == "default":
        return model.DEFAULT_POLICY
    if spec_str == "index-sum":
        return model.TieBreakPolicy(bundle_rule=model.RULE_INDEX_SUM)
    if spec_str.startswith("file:"):
        obj = json.loads(formats.read_text(spec_str[5:]))
        return formats.policy_from_obj(obj)
    raise PBError(f"unknown tiebreak {spec_str!r}; use default, index-sum, or file:<path>")


def _names(instance, ids):
    pm = instance.project_map()
    return "{" + ",".join(pm[p].name for p in sorted(ids)) + "}"


def _entry_text(instance, gid, e):
    s = _names(instance, e.approvals) if e.approvals else "{}"
    bit = f" t={e.complement}" if e.complement else ""
    return f"g{gid}: f={e.funds} s={s}{bit}"


def _print_result(args, instance, result):
    if args.format == "structured":
        print(formats.serialize_result(result), end="")
        return
    print(f"outcome: {_names(instance, result.outcome)}")
    print(f"spend: {result.spend}")
    print(f"social welfare: {result.social_welfare}")
    print(f"solver: {result.solver} ({result.dispatch})")
    for vid in sorted(result.per_voter_utility, key=str):
        print(f"  voter {vid}: utility {result.per_voter_utility[vid]}")
    _print_compliance_text(result.compliance)
    for w in result.warnings:
        print(f"warning: {w}")


def _print_compliance_text(report, file=None):
    out = file or sys.stdout
    for gid, v in report.group_verdicts:
        line = f"group {gid}: {v.kind}"
        if v.orders:
            line += " [" + " | ".join(" > ".join(f"p{p}" for p in o) for o in v.orders) + "]"
        if v.reason:
            line += f" ({v.reason})"
        print(line, file=out)
    k = report.compliant_with_k_deviants
    if report.compliant:
        print("profile: compliant", file=out)
    elif k is not None:
        names = ", ".join(report.deviant_voters)
        print(f"profile: compliant after removing {k} voter(s): {names}", file=out)
    else:
        print("profile: not compliant for any small deviant set", file=out)


def cmd_validate(args):
    instance = _load_instance(args.instance)
    warnings = []
    n = None
    if args.votes:
        votes, warnings = _load_votes(instance, args.votes)
        n = len(votes)
    if args.format == "structured":
        obj = {"ok": True, "projects": len(instance.projects),
               "groups": len(instance.groups), "warnings": list(warnings)}
        if n is not None:
            obj["votes"] = n
        print(json.dumps(obj, indent=2, sort_keys=True))
        return 0
    print(f"instance ok: {len(instance.projects)} projects, "
          f"{len(instance.groups)} groups, budget {instance.budget}")
    if n is not None:
        print(f"votes ok: {n}")
    for w in warnings:
        print(f"warning: {w}")
    return 0


def cmd_classify(args):
    instance = _load_instance(args.instance)
    votes, _ = _load_votes(instance, args.votes)
    report = profiles.classify(instance, votes)
    if args.format == "structured":
        print(formats.serialize_compliance(report), end="")
    else:
        _print_compliance_text(report)
    return 0


def cmd_tally(args):
    instance = _load_instance(args.instance, _policy_override(args.tiebreak))
    votes, warnings = _load_votes(instance, args.votes)
    result = solvers.solve(
        instance, votes, mode=args.mode, smax_cap=args.smax_cap, pad=not args.no_pad,
    )
    if warnings:
        result = solvers.TallyResult(
            result.outcome, result.spend, result.social_welfare,
            result.per_voter_utility, result.solver, result.compliance,
            tuple(warnings) + tuple(result.warnings), result.dispatch,
        )
    if args.out:
        formats.write_text(args.out, formats.serialize_result(result))
    _print_result(args, instance, result)
    return 0


def cmd_attack(args):
    if args.exhaustive and args.single_group:
        raise PBError("--exhaustive conflicts with --single-group")
    instance = _load_instance(args.instance, _policy_override(args.tiebreak))
    votes, _ = _load_votes(instance, args.votes)
    if not any(v.voter_id == args.voter for v in votes):
        raise PBError(f"no vote from voter {args.voter!r}", entity=args.voter)
    found = strategy.find_profitable_deviation(
        instance, votes, args.voter, solver_mode=args.mode,
        single_group=args.single_group, space_cap=args.space_cap,
    )
    mode_note = "single-group search" if args.single_group else "exhaustive search"
    if args.format == "structured":
        obj = {"voter": args.voter, "profitable": found is not None,
               "search": mode_note}
        if found:
            obj.update({
                "deviated_vote": formats.vote_to_obj(found.deviated_vote),
                "truthful_outcome": sorted(found.truthful_outcome),
                "deviated_outcome": sorted(found.deviated_outcome),
                "true_utility": [found.truthful_utility, found.deviated_utility],
                "reported_welfare": [found.welfare_truthful, found.welfare_deviated],
            })
        print(json.dumps(obj, indent=2, sort_keys=True))
        return 0
    if found is None:
        print(f"no profitable deviation for voter {args.voter} ({mode_note})")
        return 0
    print(f"voter {args.voter} profits by deviating ({mode_note})")
    parts = "; ".join(_entry_text(instance, g, e) for g, e in found.deviated_vote.entries)
    print(f"  deviated vote: {parts if parts else '(empty)'}")
    print(f"  outcome: {_names(instance, found.truthful_outcome)} -> "
          f"{_names(instance, found.deviated_outcome)}")
    print(f"  true utility: {found.truthful_utility} -> {found.deviated_utility} "
          f"(+{found.delta})")
    print(f"  reported welfare: {found.welfare_truthful} -> {found.welfare_deviated}")
    return 0


def cmd_gen(args):
    if args.out and len(args.out) > 2:
        raise PBError("--out takes at most two paths: instance, votes")
    params = gen.GenParams(seed=args.seed, kind=gen.normalize_kind(args.kind))
    instance = gen.gen_instance(params)
    votes = gen.gen_profile(instance, params)
    if args.out:
        formats.write_text(args.out[0], formats.serialize_instance(instance))
        if len(args.out) > 1:
            formats.write_text(args.out[1], formats.serialize_votes(votes))
        print(f"wrote {', '.join(args.out)}")
        return 0
    obj = {
        "instance": json.loads(formats.serialize_instance(instance)),
        "votes": json.loads(formats.serialize_votes(votes)),
    }
    print(json.dumps(obj, indent=2))
    return 0


def cmd_fixtures(args):
    bundles = strategy.fixtures()
    if not args.write_all and not args.name:
        for name, fx in bundles.items():
            print(f"{name}: {fx.note}")
        return 0
    names = list(bundles) if args.write_all else [args.name]
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in names:
        if name not in bundles:
            raise PBError(f"unknown fixture {name!r}; have {', '.join(bundles)}")
        fx = bundles[name]
        ipath = outdir / f"{name}.instance.json"
        vpath = outdir / f"{name}.votes.json"
        formats.write_text(str(ipath), formats.serialize_instance(fx.instance))
        formats.write_text(str(vpath), formats.serialize_votes(fx.votes))
        written += [str(ipath), str(vpath)]
    print("\n".join(written))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="pbtally", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, votes=True):
        sp.add_argument("instance", help="instance JSON file")
        if votes:
            sp.add_argument("votes", help="votes JSON file")
        sp.add_argument("--format", choices=["text", "structured"], default="text")

    sp = sub.add_parser("validate", help="check an instance (and optional votes) file")
    sp.add_argument("instance")
    sp.add_argument("votes", nargs="?")
    sp.add_argument("--format", choices=["text", "structured"], default="text")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("classify", help="report per-group profile structure")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("tally", help="aggregate votes into a funded outcome")
    common(sp)
    sp.add_argument("--mode", choices=list(solvers.MODES), default="auto")
    sp.add_argument("--tiebreak", help="default | index-sum | file:<path>")
    sp.add_argument("--smax-cap", type=int, default=solvers.DEFAULT_SMAX_CAP)
    sp.add_argument("--no-pad", action="store_true",
                    help="greedy: stop when the best marginal gain is zero")
    sp.add_argument("--out", help="also write the structured result here")
    sp.set_defaults(func=cmd_tally)

    sp = sub.add_parser("attack", help="search one voter's deviations for a profitable lie")
    common(sp)
    sp.add_argument("--voter", required=True)
    sp.add_argument("--mode", choices=list(solvers.MODES), default="exact")
    sp.add_argument("--tiebreak", help="default | index-sum | file:<path>")
    sp.add_argument("--exhaustive", action="store_true",
                    help="full cross-group deviation space (the default)")
    sp.add_argument("--single-group", action="store_true",
                    help="restrict deviations to one group at a time")
    sp.add_argument("--space-cap", type=int, default=strategy.DEFAULT_SPACE_CAP)
    sp.set_defaults(func=cmd_attack)

    sp = sub.add_parser("gen", help="generate a random instance and profile")
    sp.add_argument("--kind", default="general",
                    help="general | structured | singleton | complements")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", nargs="+", metavar="PATH",
                    help="instance path, optionally followed by votes path")
    sp.add_argument("--format", choices=["text", "structured"], default="text")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("fixtures", help="list or write the bundled counterexamples")
    sp.add_argument("name", nargs="?", help="write just this fixture")
    sp.add_argument("--write-all", action="store_true")
    sp.add_argument("--out", help="output directory (default .)")
    sp.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    try:
        return args.func(args)
    except PBError as exc:
        if getattr(args, "format", "text") == "structured":
            print(json.dumps({"error": exc.to_dict()}, indent=2, sort_keys=True),
                  file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON at line {exc.lineno}: {exc.msg}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
