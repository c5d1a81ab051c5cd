// Ballot view model: per-group fund sliders under a shared budget, approval
// checkboxes, single-select behavior for contradictory groups, and the
// per-group all-or-nothing question.  Pure state + operations; the DOM layer
// renders from it and every control change goes through one operation here.
//
// The client never enforces more than the server does on valid votes: funds
// are clamped only against the shared budget (overshooting a group's total
// cost is a valid vote), approvals are capped only in contradictory groups.

import type { BallotSchema, SchemaGroup, VotePayload, VoteEntryBody } from "./types.js";

/** Wording is fixed; the semantics gate a group's utility on full funding. */
export const COMPLEMENT_QUESTION =
  "Are ALL your approved projects in this group needed together?";

/** One group's working entry: integer funds, approval set, all-or-nothing answer. */
export interface GroupEntry {
  funds: number;
  approvals: Set<number>;
  complement: boolean;
}

/** What a single control change did; `notice` is the line shown to the voter. */
export interface ChangeReport {
  applied: boolean;
  clamped: boolean;
  notice: string | null;
}

export interface BallotViewModel {
  budget: number;
  groups: SchemaGroup[];
  entries: Map<number, GroupEntry>;
}

const APPLIED: ChangeReport = { applied: true, clamped: false, notice: null };

function refused(notice: string): ChangeReport {
  return { applied: false, clamped: false, notice };
}

function groupOf(vm: BallotViewModel, groupId: number): SchemaGroup {
  const g = vm.groups.find((g) => g.id === groupId);
  if (!g) throw new Error(`unknown group ${groupId}`);
  return g;
}

function entryOf(vm: BallotViewModel, groupId: number): GroupEntry {
  const e = vm.entries.get(groupId);
  if (!e) throw new Error(`unknown group ${groupId}`);
  return e;
}

/** Max projects of the group an outcome may implement (and we may approve). */
export function approvalCap(group: SchemaGroup): number {
  if (group.kind === "contradictory") return group.max_approvals ?? 1;
  return group.projects.length;
}

export function createBallot(schema: BallotSchema): BallotViewModel {
  return {
    budget: schema.budget,
    groups: schema.groups.map((g) => ({ ...g, projects: [...g.projects] })),
    entries: new Map(
      schema.groups.map((g) => [
        g.id,
        { funds: 0, approvals: new Set<number>(), complement: false },
      ]),
    ),
  };
}

export function runningTotal(vm: BallotViewModel): number {
  let total = 0;
  for (const e of vm.entries.values()) total += e.funds;
  return total;
}

/** Headroom for one group's slider: budget minus what the others hold. */
export function headroomFor(vm: BallotViewModel, groupId: number): number {
  entryOf(vm, groupId);
  let others = 0;
  for (const [gid, e] of vm.entries) if (gid !== groupId) others += e.funds;
  return Math.max(0, vm.budget - others);
}

/** The "Funds Allotted" meter under the sliders. */
export function budgetMeter(vm: BallotViewModel): {
  total: number;
  budget: number;
  remaining: number;
} {
  const total = runningTotal(vm);
  return { total, budget: vm.budget, remaining: vm.budget - total };
}

/** The all-or-nothing question is asked only where it has effect: standard
 *  groups to which the voter allocates nonzero funds. */
export function complementVisible(vm: BallotViewModel, groupId: number): boolean {
  const g = groupOf(vm, groupId);
  return g.kind !== "contradictory" && entryOf(vm, groupId).funds > 0;
}

/** Snapshot of question visibility per group, keyed by group id as a string. */
export function visibilityMap(vm: BallotViewModel): Record<string, boolean> {
  const out: Record<string, boolean> = {};
  for (const g of vm.groups) out[String(g.id)] = complementVisible(vm, g.id);
  return out;
}

/** Move a group's fund slider.  Values are floored to integers and clamped to
 *  [0, budget - funds held by other groups]; clamping reports a notice.
 *  Dropping to 0 clears the group's approvals and all-or-nothing answer. */
export function setFunds(
  vm: BallotViewModel,
  groupId: number,
  requested: number,
): ChangeReport {
  const g = groupOf(vm, groupId);
  const e = entryOf(vm, groupId);
  if (!Number.isFinite(requested)) return refused(`${g.name}: funds must be a number`);
  let value = Math.floor(requested);
  let clamped = false;
  const notes: string[] = [];
  if (value < 0) {
    value = 0;
    clamped = true;
    notes.push(`${g.name}: funds cannot be negative`);
  }
  const ceiling = headroomFor(vm, groupId);
  if (value > ceiling) {
    value = ceiling;
    clamped = true;
    notes.push(
      `only ${ceiling} of the ${vm.budget} budget is left for ${g.name}; funds set to ${ceiling}`,
    );
  }
  e.funds = value;
  if (value === 0 && (e.approvals.size > 0 || e.complement)) {
    e.approvals.clear();
    e.complement = false;
    notes.push(`${g.name}: approvals and the all-or-nothing answer cleared (no funds allocated)`);
  }
  return { applied: true, clamped, notice: notes.length ? notes.join("; ") : null };
}

/** Check or uncheck one project.  Approvals stay disabled while the group's
 *  funds are 0.  Contradictory groups select at most k: with k = 1 a new check
 *  replaces the old one; with k > 1 checks past the cap are refused. */
export function toggleApproval(
  vm: BallotViewModel,
  groupId: number,
  projectId: number,
): ChangeReport {
  const g = groupOf(vm, groupId);
  const e = entryOf(vm, groupId);
  if (!g.projects.some((p) => p.id === projectId)) {
    return refused(`${g.name}: project ${projectId} is not on this ballot`);
  }
  if (e.approvals.has(projectId)) {
    e.approvals.delete(projectId);
    return APPLIED;
  }
  if (e.funds === 0) {
    return refused(`${g.name}: allocate funds before approving projects`);
  }
  const cap = approvalCap(g);
  if (g.kind === "contradictory" && e.approvals.size >= cap) {
    if (cap === 1) {
      e.approvals.clear();
      e.approvals.add(projectId);
      return APPLIED;
    }
    return refused(`${g.name}: at most ${cap} approvals in this single-choice group`);
  }
  e.approvals.add(projectId);
  return APPLIED;
}

/** Answer the all-or-nothing question; refused wherever it is not asked. */
export function setComplement(
  vm: BallotViewModel,
  groupId: number,
  value: boolean,
): ChangeReport {
  const g = groupOf(vm, groupId);
  if (!complementVisible(vm, groupId)) {
    return refused(`${g.name}: the all-or-nothing question is not asked here`);
  }
  entryOf(vm, groupId).complement = value;
  return APPLIED;
}

/** Client pre-validation.  Empty by construction when all changes went
 *  through the operations above; re-checked before every submit anyway. */
export function validationMessages(vm: BallotViewModel): string[] {
  const out: string[] = [];
  const total = runningTotal(vm);
  if (total > vm.budget) {
    out.push(`allocations sum to ${total}, budget is ${vm.budget}`);
  }
  for (const g of vm.groups) {
    const e = entryOf(vm, g.id);
    if (!Number.isInteger(e.funds) || e.funds < 0) {
      out.push(`${g.name}: funds must be a non-negative integer`);
    }
    if (g.kind === "contradictory" && e.approvals.size > approvalCap(g)) {
      out.push(`${g.name}: over the ${approvalCap(g)}-approval cap`);
    }
    if (e.funds === 0 && e.approvals.size > 0) {
      out.push(`${g.name}: approvals without funds`);
    }
    for (const pid of e.approvals) {
      if (!g.projects.some((p) => p.id === pid)) {
        out.push(`${g.name}: approval ${pid} is not on this ballot`);
      }
    }
  }
  return out;
}

/** The vote body to POST: one entry per group with nonzero funds. */
export function buildPayload(vm: BallotViewModel): VotePayload {
  const entries: Record<string, VoteEntryBody> = {};
  for (const g of vm.groups) {
    const e = entryOf(vm, g.id);
    if (e.funds === 0) continue;
    entries[String(g.id)] = {
      funds: e.funds,
      approvals: [...e.approvals].sort((a, b) => a - b),
      complement: g.kind !== "contradictory" && e.complement ? 1 : 0,
    };
  }
  return { entries };
}
