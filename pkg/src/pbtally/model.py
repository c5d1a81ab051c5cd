"""Domain model: instances, votes, outcomes, utilities, feasibility.

An instance is a budget B, a set of projects partitioned into groups, and a
set of funding labels.  Each label carries spending bounds; label project
sets must be pairwise nested-or-disjoint (we call that a nested labelling)
so they form a rooted tree under a synthesized root that represents the
overall budget.  A vote gives, per group g, a triple (funds f_g, approval
set s_g, all-or-nothing bit t_g).

Utility of a vote against an outcome Q:

    sum over groups of
        t_g * 1{s_g in Q} * min(f_g, cost(Q & s_g))
      + (1 - t_g)        * min(f_g, cost(Q & s_g))

Voter weights are applied by ``social_welfare``, never by ``utility``.
"""

from dataclasses import dataclass, field, replace

from .errors import (
    BoundsInverted,
    BudgetExceeded,
    DuplicateId,
    DuplicateProject,
    EmptyGroup,
    Infeasible,
    NegativeAllocation,
    NonLaminarLabels,
    NonPositiveCost,
    NotATree,
    TooManyApprovalsInContradictoryGroup,
    UnknownId,
    ValidationError,
)

# synthesized root label; never appears in files
ROOT_ID = -1

STANDARD = "standard"
CONTRADICTORY = "contradictory"

RULE_LEX = "lex"
RULE_INDEX_SUM = "index-sum"
RULE_CUSTOM = "custom"
BUNDLE_RULES = (RULE_LEX, RULE_INDEX_SUM, RULE_CUSTOM)


@dataclass(frozen=True)
class Project:
    id: int
    name: str
    cost: int
    group_id: int


@dataclass(frozen=True)
class Group:
    id: int
    kind: str = STANDARD
    max_approvals: int | None = None  # cap k, contradictory groups only
    project_ids: tuple = ()  # derived from projects during validation
    label_id: int | None = None  # deepest label this group attaches to

    @property
    def contradictory(self):
        return self.kind == CONTRADICTORY

    @property
    def cap(self):
        """Max simultaneously implementable projects of this group."""
        if self.kind == CONTRADICTORY:
            return self.max_approvals if self.max_approvals is not None else 1
        return len(self.project_ids)


@dataclass(frozen=True)
class LabelNode:
    id: int
    parent_id: int | None = None
    b_min: int = 0
    b_max: int | None = None  # None means "no cap" and resolves to B
    # explicit membership as group ids; overrides tree-derived membership
    # (only route to a labelling that is not nested)
    group_ids: tuple | None = None


@dataclass(frozen=True)
class TieBreakPolicy:
    """Deterministic tie resolution for solvers.

    ``project_priority`` orders single-project picks (greedy); None means
    ascending id.  ``bundle_rule`` orders whole outcomes: "lex" compares
    sorted id tuples, "index-sum" compares (sum of ids, sorted tuple),
    "custom" consults ``ranked_bundles`` first and falls back to "lex".
    """

    project_priority: tuple | None = None
    bundle_rule: str = RULE_LEX
    ranked_bundles: tuple = ()  # tuple of frozensets, custom rule only


DEFAULT_POLICY = TieBreakPolicy()


@dataclass(frozen=True)
class Instance:
    budget: int
    projects: tuple = ()
    groups: tuple = ()
    labels: tuple = ()
    tiebreak: TieBreakPolicy = DEFAULT_POLICY
    allow_nonlaminar: bool = False

    def project_map(self):
        return {p.id: p for p in self.projects}

    def group_map(self):
        return {g.id: g for g in self.groups}

    def label_map(self):
        return {l.id: l for l in self.labels}

    def cost_of(self, ids):
        pm = self.project_map()
        return sum(pm[i].cost for i in ids)

    def unit_cost(self):
        return all(p.cost == 1 for p in self.projects)


@dataclass(frozen=True)
class VoteEntry:
    funds: int
    approvals: frozenset
    complement: int = 0


ZERO_ENTRY = VoteEntry(0, frozenset(), 0)


@dataclass(frozen=True)
class Vote:
    voter_id: str
    entries: tuple = ()  # ((group_id, VoteEntry), ...) sorted by group id
    weight: int = 1

    def entry(self, group_id):
        for gid, e in self.entries:
            if gid == group_id:
                return e
        return ZERO_ENTRY

    def total_funds(self):
        return sum(e.funds for _, e in self.entries)


def make_vote(voter_id, entries, weight=1):
    """Build a Vote from a {group_id: (funds, approvals, complement)} map."""
    packed = []
    for gid in sorted(entries):
        e = entries[gid]
        if not isinstance(e, VoteEntry):
            f, s, t = e
            e = VoteEntry(int(f), frozenset(s), int(t))
        packed.append((gid, e))
    return Vote(str(voter_id), tuple(packed), weight)


@dataclass(frozen=True)
class Outcome:
    selected: frozenset

    @staticmethod
    def of(ids):
        return Outcome(frozenset(ids))

    def __iter__(self):
        return iter(self.selected)

    def __contains__(self, pid):
        return pid in self.selected

    def __len__(self):
        return len(self.selected)


def _ids(outcome):
    """Accept an Outcome or a bare iterable of project ids."""
    return outcome.selected if isinstance(outcome, Outcome) else frozenset(outcome)


@dataclass(frozen=True)
class EffectiveBounds:
    """Per-label implied bounds; root appears under ROOT_ID."""

    bounds: dict = field(default_factory=dict)  # label id -> (b_min, b_max)

    def __getitem__(self, label_id):
        return self.bounds[label_id]


# ---------------------------------------------------------------------------
# membership and tree structure


def label_memberships(instance):
    """Map every label id to the frozenset of project ids it constrains.

    Explicit ``group_ids`` win; otherwise membership is the union of the
    projects of groups attached at the label and of all labels below it.
    """
    by_group = {g.id: frozenset(g.project_ids) for g in instance.groups}
    children = {}
    for lab in instance.labels:
        if lab.parent_id is not None:
            children.setdefault(lab.parent_id, []).append(lab.id)
    attached = {}
    for g in instance.groups:
        if g.label_id is not None:
            attached.setdefault(g.label_id, []).append(g.id)

    labmap = instance.label_map()
    out = {}

    def resolve(lid, trail):
        if lid in out:
            return out[lid]
        if lid in trail:
            raise NotATree(f"label {lid} is its own ancestor", entity=lid)
        lab = labmap[lid]
        if lab.group_ids is not None:
            members = frozenset().union(*(by_group[gid] for gid in lab.group_ids)) if lab.group_ids else frozenset()
        else:
            trail = trail | {lid}
            parts = [by_group[gid] for gid in attached.get(lid, [])]
            parts += [resolve(c, trail) for c in children.get(lid, [])]
            members = frozenset().union(*parts) if parts else frozenset()
        out[lid] = members
        return members

    for lab in instance.labels:
        resolve(lab.id, frozenset())
    return out


def is_laminar(instance):
    """True when every pair of label project sets is nested or disjoint."""
    sets = list(label_memberships(instance).values())
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            a, b = sets[i], sets[j]
            inter = a & b
            if inter and not (a <= b or b <= a):
                return False
    return True


@dataclass
class TreeNode:
    id: int
    b_min: int
    b_max: int  # resolved, never None
    members: frozenset  # project ids in the subtree
    group_ids: list = field(default_factory=list)  # groups attached here
    children: list = field(default_factory=list)  # child TreeNodes
    depth: int = 0
    phantom: bool = False


def build_label_tree(instance):
    """Arrange labels into a rooted tree by membership inclusion.

    Returns the synthesized root TreeNode (bounds 0..B, all projects).
    Groups attach at their deepest enclosing node; a node holding both
    children and directly attached groups gets a phantom child leaf for
    those groups so that every internal node's projects is exactly the
    union of its children's (required by the bound recursion).

    Raises NonLaminarLabels when the labelling is not nested.
    """
    if not is_laminar(instance):
        raise NonLaminarLabels("label project sets overlap without nesting")
    B = instance.budget
    members = label_memberships(instance)
    all_projects = frozenset(p.id for p in instance.projects)
    root = TreeNode(ROOT_ID, 0, B, all_projects)
    nodes = [root]
    # smaller sets nest inside larger; equal sets stack by id
    order = sorted(instance.labels, key=lambda l: (-len(members[l.id]), l.id))
    for lab in order:
        bmax = min(lab.b_max, B) if lab.b_max is not None else B
        node = TreeNode(lab.id, lab.b_min, bmax, members[lab.id])
        parent = root
        advanced = True
        while advanced:
            advanced = False
            for cand in parent.children:
                if not cand.phantom and node.members <= cand.members:
                    parent = cand
                    advanced = True
                    break
        node.depth = parent.depth + 1
        parent.children.append(node)
        nodes.append(node)
    # attach each group at its deepest node containing it
    for g in instance.groups:
        gset = frozenset(g.project_ids)
        host = root
        advanced = True
        while advanced:
            advanced = False
            for cand in host.children:
                if not cand.phantom and gset <= cand.members:
                    host = cand
                    advanced = True
                    break
        host.group_ids.append(g.id)
    # phantom leaves isolate direct attachments of internal nodes
    for node in list(nodes):
        if node.children and node.group_ids:
            gset = frozenset().union(*(frozenset(instance.group_map()[gid].project_ids) for gid in node.group_ids))
            phantom = TreeNode(-10 - node.id, 0, min(instance.cost_of(gset), B), gset,
                               group_ids=node.group_ids, depth=node.depth + 1, phantom=True)
            node.group_ids = []
            node.children.append(phantom)
    # deterministic child order
    def sort_children(node):
        node.children.sort(key=lambda c: c.id)
        node.group_ids.sort()
        for c in node.children:
            sort_children(c)
    sort_children(root)
    return root


def tree_nodes(root):
    """All nodes of a tree, parents before children, children by id."""
    out = [root]
    i = 0
    while i < len(out):
        out.extend(out[i].children)
        i += 1
    return out


# ---------------------------------------------------------------------------
# validation


def validate_instance(instance):
    """Check structural invariants; return the normalized instance.

    Normalization sorts projects, groups, and labels by id and fills in
    each group's project list from the projects' group references.
    """
    if instance.budget < 1:
        raise ValidationError(f"budget must be at least 1, got {instance.budget}")

    seen = set()
    for p in instance.projects:
        if p.id in seen:
            raise DuplicateProject(f"project id {p.id} declared twice", entity=p.id)
        seen.add(p.id)
        if p.id < 0:
            raise ValidationError(f"project id {p.id} is negative", entity=p.id)
        if p.cost < 1:
            raise NonPositiveCost(f"project {p.id} has cost {p.cost}", entity=p.id)
    if not instance.projects:
        raise ValidationError("instance has no projects")

    gids = set()
    for g in instance.groups:
        if g.id in gids:
            raise DuplicateId(f"group id {g.id} declared twice", entity=g.id)
        gids.add(g.id)
        if g.kind not in (STANDARD, CONTRADICTORY):
            raise ValidationError(f"group {g.id} has unknown kind {g.kind!r}", entity=g.id)
        if g.contradictory and g.cap < 1:
            raise ValidationError(f"group {g.id} needs max_approvals >= 1", entity=g.id)
    for p in instance.projects:
        if p.group_id not in gids:
            raise UnknownId(f"project {p.id} references unknown group {p.group_id}", entity=p.id)

    by_group = {gid: [] for gid in gids}
    for p in sorted(instance.projects, key=lambda p: p.id):
        by_group[p.group_id].append(p.id)
    for g in instance.groups:
        if not by_group[g.id]:
            raise EmptyGroup(f"group {g.id} has no projects", entity=g.id)

    lids = set()
    for lab in instance.labels:
        if lab.id in lids:
            raise DuplicateId(f"label id {lab.id} declared twice", entity=lab.id)
        lids.add(lab.id)
        if lab.id < 0:
            raise ValidationError(f"label id {lab.id} is negative", entity=lab.id)
        if lab.b_min < 0:
            raise ValidationError(f"label {lab.id} has negative b_min", entity=lab.id)
        if lab.b_max is not None and lab.b_min > lab.b_max:
            raise BoundsInverted(f"label {lab.id} has b_min {lab.b_min} > b_max {lab.b_max}", entity=lab.id)
    for lab in instance.labels:
        if lab.parent_id is not None and lab.parent_id not in lids:
            raise UnknownId(f"label {lab.id} references unknown parent {lab.parent_id}", entity=lab.id)
        if lab.group_ids is not None:
            for gid in lab.group_ids:
                if gid not in gids:
                    raise UnknownId(f"label {lab.id} references unknown group {gid}", entity=lab.id)
    for g in instance.groups:
        if g.label_id is not None and g.label_id not in lids:
            raise UnknownId(f"group {g.id} references unknown label {g.label_id}", entity=g.id)

    normalized = replace(
        instance,
        projects=tuple(sorted(instance.projects, key=lambda p: p.id)),
        groups=tuple(
            replace(g, project_ids=tuple(by_group[g.id]))
            for g in sorted(instance.groups, key=lambda g: g.id)
        ),
        labels=tuple(sorted(instance.labels, key=lambda l: l.id)),
    )

    label_memberships(normalized)  # raises NotATree on parent cycles
    if not is_laminar(normalized) and not normalized.allow_nonlaminar:
        raise NonLaminarLabels("label project sets overlap without nesting")

    pol = normalized.tiebreak
    if pol.bundle_rule not in BUNDLE_RULES:
        raise ValidationError(f"unknown bundle rule {pol.bundle_rule!r}")
    if pol.project_priority is not None:
        if sorted(pol.project_priority) != sorted(p.id for p in normalized.projects):
            raise ValidationError("project_priority must be a permutation of all project ids")
    return normalized


def validate_vote(instance, vote):
    """Normalize one vote; return (vote, warnings).

    Enforces the budget cap and contradictory-group rules.  Normalizations
    (each flagged in warnings): approvals cleared where funds are 0, the
    all-or-nothing bit cleared on contradictory groups, zero entries
    dropped.
    """
    groups = instance.group_map()
    warnings = []
    if vote.weight < 1:
        raise ValidationError(f"voter {vote.voter_id}: weight must be positive", entity=vote.voter_id)
    entries = {}
    for gid, e in vote.entries:
        if gid not in groups:
            raise UnknownId(f"voter {vote.voter_id}: unknown group {gid}", entity=gid)
        if gid in entries:
            raise DuplicateId(f"voter {vote.voter_id}: group {gid} listed twice", entity=gid)
        g = groups[gid]
        if e.funds < 0:
            raise NegativeAllocation(f"voter {vote.voter_id}: negative funds on group {gid}", entity=gid)
        unknown = set(e.approvals) - set(g.project_ids)
        if unknown:
            raise UnknownId(
                f"voter {vote.voter_id}: approvals {sorted(unknown)} are not in group {gid}",
                entity=gid,
            )
        funds, approvals, comp = e.funds, frozenset(e.approvals), int(e.complement)
        if comp not in (0, 1):
            raise ValidationError(f"voter {vote.voter_id}: complement must be 0 or 1", entity=gid)
        if g.contradictory:
            if len(approvals) > g.cap:
                raise TooManyApprovalsInContradictoryGroup(
                    f"voter {vote.voter_id}: {len(approvals)} approvals in group {gid}, cap is {g.cap}",
                    entity=gid,
                )
            if comp == 1:
                warnings.append(f"group {gid}: all-or-nothing flag cleared (contradictory group)")
                comp = 0
        if funds == 0:
            if approvals:
                warnings.append(f"group {gid}: approvals cleared (no funds allocated)")
            continue  # zero entries are dropped; funds without approvals are kept
        entries[gid] = VoteEntry(funds, approvals, comp)
    total = sum(e.funds for e in entries.values())
    if total > instance.budget:
        raise BudgetExceeded(
            f"voter {vote.voter_id}: allocations sum to {total}, budget is {instance.budget}",
            entity=vote.voter_id,
        )
    packed = tuple((gid, entries[gid]) for gid in sorted(entries))
    return Vote(str(vote.voter_id), packed, vote.weight), tuple(warnings)


def validate_profile(instance, votes):
    """Validate a full profile; returns (votes, warnings). Voter ids must be unique."""
    seen = set()
    out = []
    warnings = []
    for v in votes:
        if v.voter_id in seen:
            raise DuplicateId(f"voter id {v.voter_id} appears twice", entity=v.voter_id)
        seen.add(v.voter_id)
        nv, w = validate_vote(instance, v)
        out.append(nv)
        warnings.extend(f"voter {v.voter_id}: {msg}" for msg in w)
    return tuple(out), tuple(warnings)


# ---------------------------------------------------------------------------
# utility and welfare


def utility(instance, vote, outcome):
    """Utility of one vote against an outcome, weight not applied."""
    q = _ids(outcome)
    pm = instance.project_map()
    total = 0
    for gid, e in vote.entries:
        inter = q & e.approvals
        gain = min(e.funds, sum(pm[p].cost for p in inter))
        if e.complement:
            if e.approvals <= q:
                total += gain
        else:
            total += gain
    return total


def social_welfare(instance, votes, outcome):
    """Weighted sum of utilities."""
    return sum(v.weight * utility(instance, v, outcome) for v in votes)


# ---------------------------------------------------------------------------
# feasibility


def is_feasible_outcome(instance, outcome):
    """Budget plus every label's spending bounds; group caps not included."""
    q = _ids(outcome)
    pm = instance.project_map()
    if not q <= set(pm):
        return False
    if sum(pm[p].cost for p in q) > instance.budget:
        return False
    B = instance.budget
    for lab, members in label_memberships(instance).items():
        spend = sum(pm[p].cost for p in q & members)
        node = instance.label_map()[lab]
        bmax = min(node.b_max, B) if node.b_max is not None else B
        if not node.b_min <= spend <= bmax:
            return False
    return True


def respects_group_caps(instance, outcome):
    """At most k projects of each contradictory group are implemented."""
    q = _ids(outcome)
    for g in instance.groups:
        if g.contradictory and len(q & set(g.project_ids)) > g.cap:
            return False
    return True


def effective_bounds(instance):
    """Implied per-label bounds, computed bottom-up over the label tree.

    A leaf keeps its declared bounds; an inner node l gets
    max(sum of child minima, b_min_l) and min(sum of child maxima, b_max_l).
    Raises Infeasible when any implied interval is empty or the root
    minimum exceeds the budget.
    """
    root = build_label_tree(instance)
    out = {}

    def walk(node):
        if node.children:
            lo = sum(walk(c)[0] for c in node.children)
            hi = sum(out[c.id][1] for c in node.children)
            eff = (max(lo, node.b_min), min(hi, node.b_max))
        else:
            eff = (node.b_min, node.b_max)
        if eff[0] > eff[1]:
            raise Infeasible(f"label {node.id}: implied bounds {eff[0]}..{eff[1]} are empty", entity=node.id)
        out[node.id] = eff
        return eff

    walk(root)
    if out[ROOT_ID][0] > instance.budget:
        raise Infeasible(f"labels force spending {out[ROOT_ID][0]}, budget is {instance.budget}")
    return EffectiveBounds({lid: b for lid, b in out.items() if lid == ROOT_ID or lid >= 0})


def _group_spend_options(instance, group):
    """Reachable spending amounts of one group, honoring its cap."""
    pm = instance.project_map()
    costs = sorted(pm[p].cost for p in group.project_ids)
    cap = group.cap
    B = instance.budget
    reachable = {0: 0}  # spend -> min count used
    for c in costs:
        nxt = dict(reachable)
        for s, k in reachable.items():
            if k + 1 <= cap and s + c <= B:
                cur = nxt.get(s + c)
                if cur is None or k + 1 < cur:
                    nxt[s + c] = k + 1
        reachable = nxt
    return set(reachable)


def check_feasibility(instance):
    """True when at least one outcome satisfies all bounds and the budget.

    Computed exactly by bottom-up reachable-spend sets over the label
    tree (subset sums per group, sumsets at inner nodes, interval filter
    at every node).  Exponential only in pathological instances.
    """
    try:
        root = build_label_tree(instance)
    except NonLaminarLabels:
        from .oracle import enumerate_feasible  # lazy; avoids a cycle

        for _ in enumerate_feasible(instance):
            return True
        return False
    gm = instance.group_map()
    B = instance.budget

    def walk(node):
        sums = {0}
        for gid in node.group_ids:
            opts = _group_spend_options(instance, gm[gid])
            sums = {a + b for a in sums for b in opts if a + b <= B}
        for child in node.children:
            opts = walk(child)
            sums = {a + b for a in sums for b in opts if a + b <= B}
        return {s for s in sums if node.b_min <= s <= node.b_max}

    return bool(walk(root))


# ---------------------------------------------------------------------------
# tie-breaking


def priority_rank(instance):
    """Map project id to its greedy pick priority (lower wins)."""
    order = instance.tiebreak.project_priority
    if order is None:
        order = sorted(p.id for p in instance.projects)
    return {pid: i for i, pid in enumerate(order)}


def bundle_key(policy, ids):
    """Sort key ordering outcomes under the policy's bundle rule."""
    seq = tuple(sorted(ids))
    if policy.bundle_rule == RULE_INDEX_SUM:
        return (sum(seq), seq)
    if policy.bundle_rule == RULE_CUSTOM:
        target = frozenset(ids)
        for i, ranked in enumerate(policy.ranked_bundles):
            if ranked == target:
                return (i, seq)
        return (len(policy.ranked_bundles), seq)
    return seq


def cell_key(policy, seq):
    """Per-cell representative key used inside the exact solver.

    Only "lex" and "index-sum" compose across disjoint unions; the custom
    rule is applied at the root over co-optimal outcomes instead.
    """
    if policy.bundle_rule == RULE_INDEX_SUM:
        return (sum(seq), seq)
    return seq
