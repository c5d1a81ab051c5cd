// Wire shapes of the election service HTTP API, as the client consumes them.

export interface SchemaProject {
  id: number;
  name: string;
  cost: number;
}

export type GroupKind = "standard" | "contradictory";

export interface SchemaGroup {
  id: number;
  name: string;
  kind: GroupKind;
  /** Approval cap for contradictory groups; null on standard groups. */
  max_approvals: number | null;
  projects: SchemaProject[];
}

/** One funding-bound record; present only when the election shows constraints. */
export interface ConstraintRecord {
  id: number;
  parent: number | null;
  min: number;
  /** null reads as "up to the whole budget". */
  max: number | null;
  /** Ids of the projects whose spending the bound covers. */
  projects: number[];
}

export interface BallotSchema {
  election: string;
  state: "open" | "closed";
  budget: number;
  groups: SchemaGroup[];
  rules: {
    total_funds_at_most: number;
    contradictory_max_approvals: Record<string, number>;
  };
  constraints?: ConstraintRecord[];
}

export interface VoteEntryBody {
  funds: number;
  approvals: number[];
  complement: 0 | 1;
}

/** POST /elections/{id}/votes body; voter identity comes from the bearer credential. */
export interface VotePayload {
  entries: Record<string, VoteEntryBody>;
}

export interface VoteEcho {
  seq: number;
  replaced: boolean;
  vote: { voter: string; weight: number; entries: Record<string, VoteEntryBody> };
  warnings: string[];
}

/** Every service error body carries these three fields. */
export interface ErrorBody {
  code: string;
  message: string;
  entity: string | number | null;
}

export interface ResultDoc {
  outcome: number[];
  spend: number;
  social_welfare: number;
  per_voter_utility: Record<string, number>;
  solver: string;
  dispatch: string | null;
  compliance: unknown;
  warnings: string[];
}
