"""Print every value the test suite freezes, for eyeball verification.

Not part of the shipped package; run once while pinning expected test
values so the suite asserts observed-and-checked numbers, not hopes.
"""

import json

from pbtally import formats, gen, model, oracle, profiles, solvers, strategy

FX = strategy.fixtures()


def show(tag, value):
    print(f"{tag}: {value}")


def res_line(r):
    return (f"outcome={sorted(r.outcome.selected)} welfare={r.social_welfare} "
            f"spend={r.spend} solver={r.solver} dispatch={r.dispatch!r} "
            f"warnings={list(r.warnings)} per_voter={dict(sorted(r.per_voter_utility.items()))}")


print("== complement-lockin ==")
fx = FX["complement-lockin"]
show("exact", res_line(solvers.solve_exact(fx.instance, fx.votes)))
show("auto dispatch", solvers.solve(fx.instance, fx.votes).dispatch)
v1 = fx.votes[0]
show("utility v1 {1,2,4}", model.utility(fx.instance, v1, model.Outcome.of({1, 2, 4})))
dev = strategy.find_profitable_deviation(fx.instance, fx.votes, "3")
show("deviation voter3", (dev.deviated_vote.entries, sorted(dev.truthful_outcome),
                          sorted(dev.deviated_outcome), dev.truthful_utility,
                          dev.deviated_utility, dev.welfare_truthful, dev.welfare_deviated,
                          dev.exhaustive))
space = strategy.build_deviation_space(fx.instance, fx.votes[2])
show("space size voter3", space.size)
g1 = fx.instance.group_map()[1]
deviated_votes = [fx.votes[0], fx.votes[1], dev.deviated_vote]
show("best_group_subset g1 b=3 deviated",
     solvers.best_group_subset(fx.instance, g1, deviated_votes, 3))
show("greedy no votes", res_line(solvers.solve_greedy(fx.instance, [])))
show("greedy no votes no pad", res_line(solvers.solve_greedy(fx.instance, [], pad=False)))
compressed = [
    model.make_vote("a", {1: (2, {1, 2}, 0), 2: (1, {4}, 0)}, weight=2),
    model.make_vote("b", {1: (1, {3}, 0), 2: (2, {5, 6}, 0)}),
]
show("distinct compressed", res_line(solvers.solve_distinct_votes(fx.instance, compressed)))
single = [model.make_vote("z", {1: (2, {1, 2}, 0)}, weight=3)]
show("distinct single w3", res_line(solvers.solve_distinct_votes(fx.instance, single)))
rep = profiles.classify(fx.instance, fx.votes)
show("classify", {g: (v.kind, v.orders) for g, v in rep.group_verdicts})
show("oracle via solve()", res_line(solvers.solve(fx.instance, fx.votes, mode="oracle")))

print()
print("== substitute-swap ==")
fx = FX["substitute-swap"]
show("exact", res_line(solvers.solve_exact(fx.instance, fx.votes)))
dev = strategy.find_profitable_deviation(fx.instance, fx.votes, "7")
show("deviation voter7", (dev.deviated_vote.entries, sorted(dev.truthful_outcome),
                          sorted(dev.deviated_outcome), dev.truthful_utility,
                          dev.deviated_utility, dev.welfare_truthful, dev.welfare_deviated))
rep = profiles.classify(fx.instance, fx.votes)
show("classify", {g: (v.kind, v.orders) for g, v in rep.group_verdicts})
show("deviants", (rep.deviant_voters, rep.compliant_with_k_deviants, rep.compliant))
show("greedy forced", res_line(solvers.solve_greedy(fx.instance, fx.votes)))
show("auto dispatch", solvers.solve(fx.instance, fx.votes).dispatch)

print()
print("== overlapping-labels ==")
fx = FX["overlapping-labels"]
show("exact", res_line(solvers.solve_exact(fx.instance, fx.votes)))
show("enumerate", [sorted(q) for q in oracle.enumerate_feasible(fx.instance)])
for dev in strategy.nash_check(fx.instance, fx.votes):
    show("nash finding", (dev.voter_id, dev.deviated_vote.entries,
                          sorted(dev.truthful_outcome), sorted(dev.deviated_outcome),
                          dev.truthful_utility, dev.deviated_utility))
show("feasible {3}", model.is_feasible_outcome(fx.instance, {3}))
show("feasible {1,2}", model.is_feasible_outcome(fx.instance, {1, 2}))
show("feasible {1,3}", model.is_feasible_outcome(fx.instance, {1, 3}))
show("feasible {1}", model.is_feasible_outcome(fx.instance, {1}))

print()
print("== showcase ==")
fx = FX["showcase"]
rep = profiles.classify(fx.instance, fx.votes)
show("classify", {g: (v.kind, v.orders) for g, v in rep.group_verdicts})
show("chains_hold g2", profiles.chains_hold(
    fx.instance.group_map()[2], fx.votes, rep.verdict(2).orders))
show("exact", res_line(solvers.solve_exact(fx.instance, fx.votes)))
show("greedy", res_line(solvers.solve_greedy(fx.instance, fx.votes)))
show("oracle", res_line(oracle.solve_oracle(fx.instance, fx.votes)))
show("auto dispatch", solvers.solve(fx.instance, fx.votes).dispatch)
crosser = list(fx.votes) + [model.make_vote("9x", {2: (2, {4, 7}, 0)})]
repx = profiles.classify(fx.instance, crosser)
show("crosser verdicts", {g: v.kind for g, v in repx.group_verdicts})
show("crosser deviants", (repx.deviant_voters, repx.compliant_with_k_deviants))

print()
print("== group_options order (2 unit projects, B=3) ==")
inst = model.validate_instance(model.Instance(
    budget=3,
    projects=(model.Project(1, "p1", 1, 1), model.Project(2, "p2", 1, 1)),
    groups=(model.Group(1),),
))
for e in strategy.group_options(inst, inst.groups[0]):
    print(f"  {e}")
print("no complements:")
for e in strategy.group_options(inst, inst.groups[0], include_complements=False):
    print(f"  {e}")

print()
print("== effective bounds example ==")
inst = model.validate_instance(model.Instance(
    budget=10,
    projects=tuple(model.Project(i, f"p{i}", 1, 1 + (i > 5)) for i in range(1, 11)),
    groups=(model.Group(1, label_id=2), model.Group(2, label_id=3)),
    labels=(model.LabelNode(1, None, 0, 10),
            model.LabelNode(2, 1, 2, 5),
            model.LabelNode(3, 1, 3, 4)),
))
eb = model.effective_bounds(inst)
show("bounds", dict(sorted(eb.bounds.items())))
show("ROOT_ID", model.ROOT_ID)

print()
print("== serialize_result golden (complement-lockin exact) ==")
fx = FX["complement-lockin"]
r = solvers.solve_exact(fx.instance, fx.votes)
print(formats.serialize_result(r))

print()
print("== NoApplicableSolver message ==")
big = model.validate_instance(model.Instance(
    budget=2,
    projects=tuple(model.Project(i, f"p{i}", 1, 1) for i in range(1, 20)),
    groups=(model.Group(1),),
))
vote = model.make_vote("1", {1: (2, {1, 2}, 1)})
try:
    solvers.solve(big, [vote], smax_cap=4)
except Exception as exc:
    show("error", f"{type(exc).__name__}: {exc}")

print()
print("== gen smoke (structured seed 5) ==")
params = gen.GenParams(seed=5, kind=gen.KIND_STRUCTURED)
inst = gen.gen_instance(params)
votes = gen.gen_profile(inst, params)
show("m,B,n", (len(inst.projects), inst.budget, len(votes)))
rep = profiles.classify(inst, votes)
show("compliant", (rep.compliant, rep.compliant_with_k_deviants))
votes2, who = gen.inject_deviant(inst, votes, seed=5)
rep2 = profiles.classify(inst, votes2)
show("injected", (who, rep2.compliant_with_k_deviants))

print()
print("== CLI attack structured (complement-lockin) ==")
import io
import pathlib
import tempfile
from contextlib import redirect_stdout

from pbtally import cli

with tempfile.TemporaryDirectory() as td:
    rc = cli.main(["fixtures", "complement-lockin", "--out", td])
    ipath = str(pathlib.Path(td) / "complement-lockin.instance.json")
    vpath = str(pathlib.Path(td) / "complement-lockin.votes.json")
    buf = io.StringIO()
    with redirect_stdout(buf):
        rc = cli.main(["attack", ipath, vpath, "--voter", "3", "--exhaustive",
                       "--format", "structured"])
    print(f"rc={rc}")
    print(buf.getvalue())
    buf = io.StringIO()
    with redirect_stdout(buf):
        rc = cli.main(["tally", ipath, vpath, "--mode", "exact"])
    print(f"tally rc={rc}")
    print(buf.getvalue())
