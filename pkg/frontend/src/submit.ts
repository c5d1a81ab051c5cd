// Submission flow: POST the built payload, then map the reply onto the form.
// Server reason codes anchor to the control they fault; one submission is in
// flight at a time; the normalized echo, not local state, is what a receipt
// shows.

import type { ServiceClient } from "./client.js";
import type { BallotSchema, ErrorBody, VoteEcho } from "./types.js";
import { BallotViewModel, buildPayload, validationMessages } from "./viewmodel.js";

export type SubmitOutcome =
  | {
      kind: "receipt";
      seq: number;
      replaced: boolean;
      echo: VoteEcho;
      /** Shown under the receipt on resubmission. */
      notice: string | null;
    }
  | {
      kind: "rejected";
      code: string;
      message: string;
      /** Group whose controls the error anchors to, when the code names one. */
      groupId: number | null;
      /** True when the error anchors to the budget meter instead. */
      budget: boolean;
    }
  | { kind: "closed"; message: string }
  | { kind: "unauthorized"; message: string }
  | { kind: "busy" }
  | { kind: "failed"; message: string };

/** Which control a service error body points at. */
export function anchorOf(
  err: ErrorBody,
  schema: BallotSchema,
): { groupId: number | null; budget: boolean } {
  if (err.code === "BudgetExceeded") return { groupId: null, budget: true };
  const entity = typeof err.entity === "string" ? Number(err.entity) : err.entity;
  if (
    typeof entity === "number" &&
    Number.isInteger(entity) &&
    schema.groups.some((g) => g.id === entity)
  ) {
    return { groupId: entity, budget: false };
  }
  return { groupId: null, budget: false };
}

export type SubmitVote = (
  electionId: string,
  token: string,
  vm: BallotViewModel,
) => Promise<SubmitOutcome>;

/** Build the submit operation; the closure holds the single in-flight slot. */
export function createSubmitter(client: ServiceClient, schema: BallotSchema): SubmitVote {
  let inFlight = false;

  return async function submitVote(electionId, token, vm) {
    if (inFlight) return { kind: "busy" };
    const problems = validationMessages(vm);
    if (problems.length > 0) {
      return {
        kind: "rejected",
        code: "ClientValidation",
        message: problems.join("; "),
        groupId: null,
        budget: false,
      };
    }
    inFlight = true;
    try {
      const reply = await client.post(
        `/elections/${electionId}/votes`,
        buildPayload(vm),
        { Authorization: `Bearer ${token}` },
      );
      if (reply.status === 200) {
        const echo = reply.body as VoteEcho;
        return {
          kind: "receipt",
          seq: echo.seq,
          replaced: echo.replaced,
          echo,
          notice: echo.replaced ? "previous vote replaced" : null,
        };
      }
      const err = (reply.body ?? {}) as ErrorBody;
      if (reply.status === 401) {
        return { kind: "unauthorized", message: err.message ?? "credential refused" };
      }
      if (reply.status === 409) {
        return { kind: "closed", message: "election closed" };
      }
      if (reply.status === 400 || reply.status === 422) {
        return {
          kind: "rejected",
          code: err.code ?? "Error",
          message: err.message ?? "vote refused",
          ...anchorOf(err, schema),
        };
      }
      return { kind: "failed", message: `unexpected status ${reply.status}` };
    } catch (exc) {
      return { kind: "failed", message: String(exc) };
    } finally {
      inFlight = false;
    }
  };
}
