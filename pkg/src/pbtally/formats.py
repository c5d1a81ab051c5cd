"""Canonical JSON file formats for instances, votes, and tally reports.

Canonical form is two-space-indented JSON with a fixed key order and a
trailing newline.  Files written by this module parse back to equal
values, and re-serializing a parsed canonical file reproduces it byte
for byte.  Parsers are lenient about optional keys; serializers always
write the full canonical shape.
"""

import json

from .errors import ParseError
from .model import (
    Group,
    Instance,
    LabelNode,
    Project,
    TieBreakPolicy,
    Vote,
    VoteEntry,
)

INSTANCE_SUFFIX = ".pb"
VOTES_SUFFIX = ".pbv"


def _dump(obj):
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _require(mapping, key, where):
    if key not in mapping:
        raise ParseError(f"{where}: missing required field {key!r}")
    return mapping[key]


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# instance files


def instance_to_obj(instance):
    obj = {
        "budget": instance.budget,
        "projects": [
            {"id": p.id, "name": p.name, "cost": p.cost, "group": p.group_id}
            for p in instance.projects
        ],
        "groups": [
            {
                "id": g.id,
                "kind": g.kind,
                "max_approvals": g.max_approvals,
                "label_leaf": g.label_id,
            }
            for g in instance.groups
        ],
        "labels": [],
        "tiebreak": {
            "project_priority": list(instance.tiebreak.project_priority)
            if instance.tiebreak.project_priority is not None
            else None,
            "bundle_rule": instance.tiebreak.bundle_rule,
            "ranked_bundles": [sorted(b) for b in instance.tiebreak.ranked_bundles],
        },
    }
    for lab in instance.labels:
        rec = {"id": lab.id, "parent": lab.parent_id, "min": lab.b_min, "max": lab.b_max}
        if lab.group_ids is not None:
            rec["groups"] = list(lab.group_ids)
        obj["labels"].append(rec)
    if instance.allow_nonlaminar:
        obj["allow_nonlaminar"] = True
    return obj


def serialize_instance(instance):
    return _dump(instance_to_obj(instance))


def policy_from_obj(tb):
    if not isinstance(tb, dict):
        raise ParseError("tiebreak: expected an object")
    return TieBreakPolicy(
        project_priority=tuple(tb["project_priority"]) if tb.get("project_priority") else None,
        bundle_rule=tb.get("bundle_rule", "lex"),
        ranked_bundles=tuple(frozenset(b) for b in tb.get("ranked_bundles", [])),
    )


def instance_from_obj(obj):
    if not isinstance(obj, dict):
        raise ParseError("instance file: expected a top-level object")
    budget = _int(_require(obj, "budget", "instance"), "budget")
    projects = []
    for rec in _require(obj, "projects", "instance"):
        projects.append(
            Project(
                id=_int(_require(rec, "id", "project"), "project id"),
                name=str(rec.get("name", f"p{rec.get('id')}")),
                cost=_int(_require(rec, "cost", "project"), "project cost"),
                group_id=_int(_require(rec, "group", "project"), "project group"),
            )
        )
    groups = []
    for rec in _require(obj, "groups", "instance"):
        max_app = rec.get("max_approvals")
        groups.append(
            Group(
                id=_int(_require(rec, "id", "group"), "group id"),
                kind=str(rec.get("kind", "standard")),
                max_approvals=None if max_app is None else _int(max_app, "max_approvals"),
                label_id=None if rec.get("label_leaf") is None else _int(rec["label_leaf"], "label_leaf"),
            )
        )
    labels = []
    for rec in obj.get("labels", []):
        bmax = rec.get("max")
        labels.append(
            LabelNode(
                id=_int(_require(rec, "id", "label"), "label id"),
                parent_id=None if rec.get("parent") is None else _int(rec["parent"], "label parent"),
                b_min=_int(rec.get("min", 0), "label min"),
                b_max=None if bmax is None else _int(bmax, "label max"),
                group_ids=tuple(rec["groups"]) if rec.get("groups") is not None else None,
            )
        )
    policy = policy_from_obj(obj.get("tiebreak") or {})
    return Instance(
        budget=budget,
        projects=tuple(projects),
        groups=tuple(groups),
        labels=tuple(labels),
        tiebreak=policy,
        allow_nonlaminar=bool(obj.get("allow_nonlaminar", False)),
    )


def parse_instance(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"instance file: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return instance_from_obj(obj)


# ---------------------------------------------------------------------------
# votes files


def vote_to_obj(vote):
    return {
        "voter": vote.voter_id,
        "weight": vote.weight,
        "entries": {
            str(gid): {
                "funds": e.funds,
                "approvals": sorted(e.approvals),
                "complement": e.complement,
            }
            for gid, e in vote.entries
        },
    }


def serialize_votes(votes):
    return _dump([vote_to_obj(v) for v in votes])


def vote_from_obj(rec, where="vote"):
    if not isinstance(rec, dict):
        raise ParseError(f"{where}: expected an object")
    voter = _require(rec, "voter", where)
    if not isinstance(voter, (str, int)):
        raise ParseError(f"{where}: voter id must be a string")
    entries = []
    raw = rec.get("entries", {})
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: entries must be an object keyed by group id")
    for key in raw:
        try:
            gid = int(key)
        except (TypeError, ValueError):
            raise ParseError(f"{where}: bad group key {key!r}") from None
        e = raw[key]
        if not isinstance(e, dict):
            raise ParseError(f"{where}: entry for group {key} must be an object")
        entries.append(
            (
                gid,
                VoteEntry(
                    funds=_int(e.get("funds", 0), f"{where} funds"),
                    approvals=frozenset(
                        _int(p, f"{where} approval id") for p in e.get("approvals", [])
                    ),
                    complement=_int(e.get("complement", 0), f"{where} complement"),
                ),
            )
        )
    entries.sort(key=lambda pair: pair[0])
    return Vote(str(voter), tuple(entries), _int(rec.get("weight", 1), f"{where} weight"))


def parse_votes(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"votes file: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(obj, list):
        raise ParseError("votes file: expected a top-level list of vote records")
    return tuple(vote_from_obj(rec, f"vote #{i}") for i, rec in enumerate(obj))


# ---------------------------------------------------------------------------
# tally reports (see solvers.result for the dataclass)


def result_to_obj(result):
    obj = {
        "outcome": sorted(result.outcome.selected),
        "spend": result.spend,
        "social_welfare": result.social_welfare,
        "per_voter_utility": {vid: result.per_voter_utility[vid] for vid in sorted(result.per_voter_utility)},
        "solver": result.solver,
        "dispatch": result.dispatch,
        "compliance": compliance_to_obj(result.compliance) if result.compliance else None,
        "warnings": list(result.warnings),
    }
    return obj


def serialize_result(result):
    return _dump(result_to_obj(result))


def compliance_to_obj(report):
    groups = {}
    for gid, verdict in report.group_verdicts:
        rec = {"verdict": verdict.kind}
        if verdict.kind == "SubstituteChains":
            rec["subgroups"] = [list(order) for order in verdict.orders]
        if verdict.kind == "NonCompliant":
            rec["reason"] = verdict.reason
        groups[str(gid)] = rec
    return {
        "groups": groups,
        "deviant_voters": list(report.deviant_voters),
        "compliant_with_k_deviants": report.compliant_with_k_deviants,
    }


def serialize_compliance(report):
    return _dump(compliance_to_obj(report))


def read_text(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
