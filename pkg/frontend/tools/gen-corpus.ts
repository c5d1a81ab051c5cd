// Interaction-corpus generator: drives the real ballot view model through
// seeded pseudo-random UI event scripts and records, per session, the exact
// payload the client would POST plus the visibility of the all-or-nothing
// question at submit time.  The committed corpus.json is replayed against the
// live service by the acceptance suite; regeneration is byte-identical.

import { mkdirSync, existsSync, writeFileSync } from "node:fs";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

import type { BallotSchema, SchemaGroup, VotePayload } from "../src/types.js";
import {
  approvalCap,
  complementVisible,
  createBallot,
  buildPayload,
  headroomFor,
  setComplement,
  setFunds,
  toggleApproval,
  validationMessages,
  visibilityMap,
} from "../src/viewmodel.js";
import { Rng, chance, pick, randInt, rngFor, sample } from "./rng.js";

export const CORPUS_SEED = "pbtally-ballot-corpus-v1";
export const TARGET_SESSIONS = 220;

/** Instance document shape accepted by POST /elections. */
export interface InstanceObj {
  budget: number;
  projects: { id: number; name: string; cost: number; group: number }[];
  groups: { id: number; kind: string; max_approvals: number | null }[];
  labels: never[];
}

export interface CorpusSession {
  id: string;
  instance: InstanceObj;
  voter: string;
  payload: VotePayload;
  ui: { complement_visible: Record<string, boolean> };
}

export interface Corpus {
  seed: string;
  sessions: CorpusSession[];
}

export function buildInstance(rng: Rng): InstanceObj {
  const budget = randInt(rng, 2, 10);
  const nGroups = randInt(rng, 1, 4);
  const projects: InstanceObj["projects"] = [];
  const groups: InstanceObj["groups"] = [];
  let pid = 1;
  for (let gid = 1; gid <= nGroups; gid++) {
    const size = randInt(rng, 1, 4);
    const contradictory = size >= 2 && chance(rng, 0.3);
    groups.push({
      id: gid,
      kind: contradictory ? "contradictory" : "standard",
      max_approvals: contradictory ? randInt(rng, 1, Math.min(2, size)) : null,
    });
    for (let j = 0; j < size; j++) {
      projects.push({ id: pid, name: `p${pid}`, cost: randInt(rng, 1, 3), group: gid });
      pid++;
    }
  }
  return { budget, projects, groups, labels: [] };
}

/** The schema document the service would serve for this instance. */
export function schemaFromInstance(inst: InstanceObj): BallotSchema {
  const groups: SchemaGroup[] = inst.groups.map((g) => ({
    id: g.id,
    name: `Group ${g.id}`,
    kind: g.kind === "contradictory" ? "contradictory" : "standard",
    max_approvals: g.kind === "contradictory" ? (g.max_approvals ?? 1) : null,
    projects: inst.projects
      .filter((p) => p.group === g.id)
      .sort((a, b) => a.id - b.id)
      .map((p) => ({ id: p.id, name: p.name, cost: p.cost })),
  }));
  const caps: Record<string, number> = {};
  for (const g of groups) {
    if (g.kind === "contradictory") caps[String(g.id)] = g.max_approvals ?? 1;
  }
  return {
    election: "corpus",
    state: "open",
    budget: inst.budget,
    groups,
    rules: { total_funds_at_most: inst.budget, contradictory_max_approvals: caps },
  };
}

/** One scripted session: a plausible fill-in pass, then a few adversarial
 *  events (over-budget drags, extra checks in capped groups, answers to
 *  hidden questions) that the view model must absorb or refuse. */
export function driveSession(
  rng: Rng,
  schema: BallotSchema,
): { payload: VotePayload; visible: Record<string, boolean> } {
  const vm = createBallot(schema);

  for (const g of vm.groups) {
    if (!chance(rng, 0.75)) continue;
    const headroom = headroomFor(vm, g.id);
    if (headroom === 0) continue;
    setFunds(vm, g.id, randInt(rng, 1, headroom));
    const most = Math.min(approvalCap(g), g.projects.length);
    const wanted = randInt(rng, 0, most);
    for (const p of sample(rng, g.projects, wanted)) {
      toggleApproval(vm, g.id, p.id);
    }
    const entry = vm.entries.get(g.id)!;
    if (complementVisible(vm, g.id) && entry.approvals.size >= 2 && chance(rng, 0.4)) {
      setComplement(vm, g.id, true);
    }
  }

  const events = randInt(rng, 0, 6);
  for (let i = 0; i < events; i++) {
    const g = pick(rng, vm.groups);
    const roll = rng();
    if (roll < 0.4) {
      setFunds(vm, g.id, randInt(rng, 0, schema.budget + 3));
    } else if (roll < 0.75) {
      toggleApproval(vm, g.id, pick(rng, g.projects).id);
    } else {
      setComplement(vm, g.id, chance(rng, 0.5));
    }
  }

  const problems = validationMessages(vm);
  if (problems.length > 0) {
    throw new Error(`generator produced an invalid ballot: ${problems.join("; ")}`);
  }
  return { payload: buildPayload(vm), visible: visibilityMap(vm) };
}

export function buildCorpus(seed: string = CORPUS_SEED): Corpus {
  const sessions: CorpusSession[] = [];
  let instanceIdx = 0;
  while (sessions.length < TARGET_SESSIONS) {
    const irng = rngFor(`${seed}:instance:${instanceIdx}`);
    const inst = buildInstance(irng);
    const schema = schemaFromInstance(inst);
    const perInstance = randInt(irng, 1, 3);
    for (let k = 0; k < perInstance && sessions.length < TARGET_SESSIONS; k++) {
      const srng = rngFor(`${seed}:session:${instanceIdx}:${k}`);
      const { payload, visible } = driveSession(srng, schema);
      sessions.push({
        id: `s${String(sessions.length).padStart(3, "0")}`,
        instance: inst,
        voter: "v1",
        payload,
        ui: { complement_visible: visible },
      });
    }
    instanceIdx++;
  }
  return { seed, sessions };
}

export function corpusText(corpus: Corpus): string {
  return JSON.stringify(corpus, null, 2) + "\n";
}

/** frontend/ root: nearest ancestor of this module holding package.json. */
function packageRoot(): string {
  let dir = dirname(fileURLToPath(import.meta.url));
  for (let i = 0; i < 5; i++) {
    if (existsSync(join(dir, "package.json"))) return dir;
    dir = dirname(dir);
  }
  throw new Error("package.json not found above " + import.meta.url);
}

const isMain =
  process.argv[1] !== undefined &&
  resolve(process.argv[1]) === fileURLToPath(import.meta.url);

if (isMain) {
  const corpus = buildCorpus();
  const target = join(packageRoot(), "corpus.json");
  mkdirSync(dirname(target), { recursive: true });
  writeFileSync(target, corpusText(corpus));
  const distinct = new Set(corpus.sessions.map((s) => JSON.stringify(s.instance)));
  console.log(
    `wrote ${corpus.sessions.length} sessions over ${distinct.size} ballots to ${target}`,
  );
}
