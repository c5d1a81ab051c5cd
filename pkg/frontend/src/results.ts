// Results view: the funded list, per-label spend against its bounds, social
// welfare, and this voter's own utility.  A results fetch before close gets
// the "still open" view, not an error page.

import type { ServiceClient } from "./client.js";
import type {
  BallotSchema,
  ErrorBody,
  ResultDoc,
  SchemaProject,
} from "./types.js";

export interface LabelBar {
  labelId: number;
  min: number;
  max: number;
  spend: number;
  within: boolean;
}

export interface ResultsView {
  funded: SchemaProject[];
  spend: number;
  budget: number;
  socialWelfare: number;
  /** Null before this voter submitted (or when the tally has no row for them). */
  yourUtility: number | null;
  /** Empty unless the election exposes its funding constraints. */
  labelBars: LabelBar[];
  solver: string;
  warnings: string[];
}

export type ResultsOutcome =
  | { kind: "results"; view: ResultsView }
  | { kind: "open"; message: string }
  | { kind: "failed"; message: string };

export function renderResults(
  doc: ResultDoc,
  schema: BallotSchema,
  voterId: string | null,
): ResultsView {
  const funded = new Set(doc.outcome);
  const projects: SchemaProject[] = [];
  for (const g of schema.groups) {
    for (const p of g.projects) if (funded.has(p.id)) projects.push(p);
  }
  projects.sort((a, b) => a.id - b.id);

  const bars: LabelBar[] = [];
  for (const rec of schema.constraints ?? []) {
    let spend = 0;
    for (const g of schema.groups) {
      for (const p of g.projects) {
        if (funded.has(p.id) && rec.projects.includes(p.id)) spend += p.cost;
      }
    }
    const max = rec.max ?? schema.budget;
    bars.push({
      labelId: rec.id,
      min: rec.min,
      max,
      spend,
      within: rec.min <= spend && spend <= max,
    });
  }

  const utility =
    voterId !== null && voterId in doc.per_voter_utility
      ? doc.per_voter_utility[voterId]
      : null;
  return {
    funded: projects,
    spend: doc.spend,
    budget: schema.budget,
    socialWelfare: doc.social_welfare,
    yourUtility: utility,
    labelBars: bars,
    solver: doc.solver,
    warnings: doc.warnings,
  };
}

export async function fetchResults(
  client: ServiceClient,
  electionId: string,
  schema: BallotSchema,
  voterId: string | null,
): Promise<ResultsOutcome> {
  let reply;
  try {
    reply = await client.get(`/elections/${electionId}/results`);
  } catch (exc) {
    return { kind: "failed", message: String(exc) };
  }
  if (reply.status === 200) {
    return {
      kind: "results",
      view: renderResults(reply.body as ResultDoc, schema, voterId),
    };
  }
  if (reply.status === 409) {
    return { kind: "open", message: "the election is still open" };
  }
  const err = (reply.body ?? {}) as ErrorBody;
  return { kind: "failed", message: err.message ?? `unexpected status ${reply.status}` };
}
