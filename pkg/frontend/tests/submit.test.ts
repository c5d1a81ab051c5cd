import { describe, expect, it } from "vitest";

import type { HttpReply, ServiceClient } from "../src/client.js";
import type { BallotSchema } from "../src/types.js";
import { anchorOf, createSubmitter } from "../src/submit.js";
import { buildPayload, createBallot, setFunds, toggleApproval } from "../src/viewmodel.js";

function schema(): BallotSchema {
  return {
    election: "e1",
    state: "open",
    budget: 5,
    groups: [
      {
        id: 1,
        name: "Group 1",
        kind: "standard",
        max_approvals: null,
        projects: [
          { id: 1, name: "p1", cost: 1 },
          { id: 2, name: "p2", cost: 1 },
        ],
      },
      {
        id: 3,
        name: "Group 3",
        kind: "contradictory",
        max_approvals: 1,
        projects: [
          { id: 5, name: "p5", cost: 2 },
          { id: 6, name: "p6", cost: 2 },
        ],
      },
    ],
    rules: { total_funds_at_most: 5, contradictory_max_approvals: { "3": 1 } },
  };
}

interface Sent {
  path: string;
  body: unknown;
  headers: Record<string, string>;
}

function cannedClient(replies: HttpReply[]): { client: ServiceClient; sent: Sent[] } {
  const sent: Sent[] = [];
  const queue = [...replies];
  return {
    sent,
    client: {
      async get() {
        throw new Error("not used");
      },
      async post(path, body, headers = {}) {
        sent.push({ path, body, headers });
        const next = queue.shift();
        if (!next) throw new Error("no canned reply left");
        return next;
      },
    },
  };
}

function filledBallot() {
  const vm = createBallot(schema());
  setFunds(vm, 1, 2);
  toggleApproval(vm, 1, 1);
  setFunds(vm, 3, 2);
  toggleApproval(vm, 3, 5);
  return vm;
}

function echoBody(seq: number, replaced: boolean) {
  return {
    seq,
    replaced,
    vote: {
      voter: "a",
      weight: 1,
      entries: { "1": { funds: 2, approvals: [1], complement: 0 } },
    },
    warnings: [],
  };
}

describe("submitVote", () => {
  it("posts the built payload with the bearer credential and returns a receipt", async () => {
    const { client, sent } = cannedClient([{ status: 200, body: echoBody(1, false) }]);
    const vm = filledBallot();
    const submit = createSubmitter(client, schema());
    const outcome = await submit("e1", "tok123", vm);
    expect(sent).toHaveLength(1);
    expect(sent[0].path).toBe("/elections/e1/votes");
    expect(sent[0].headers.Authorization).toBe("Bearer tok123");
    expect(sent[0].body).toEqual(buildPayload(vm));
    expect(outcome).toMatchObject({ kind: "receipt", seq: 1, replaced: false, notice: null });
  });

  it("notes the replacement on resubmission", async () => {
    const { client } = cannedClient([{ status: 200, body: echoBody(2, true) }]);
    const outcome = await createSubmitter(client, schema())("e1", "t", filledBallot());
    expect(outcome).toMatchObject({
      kind: "receipt",
      seq: 2,
      replaced: true,
      notice: "previous vote replaced",
    });
  });

  it("anchors a contradictory over-approval to its group", async () => {
    const { client } = cannedClient([
      {
        status: 400,
        body: {
          code: "TooManyApprovalsInContradictoryGroup",
          message: "2 approvals in group 3, cap is 1",
          entity: 3,
        },
      },
    ]);
    const outcome = await createSubmitter(client, schema())("e1", "t", filledBallot());
    expect(outcome).toMatchObject({
      kind: "rejected",
      code: "TooManyApprovalsInContradictoryGroup",
      groupId: 3,
      budget: false,
    });
  });

  it("anchors a budget overrun to the meter", async () => {
    const { client } = cannedClient([
      {
        status: 400,
        body: { code: "BudgetExceeded", message: "allocations sum to 9, budget is 5", entity: "a" },
      },
    ]);
    const outcome = await createSubmitter(client, schema())("e1", "t", filledBallot());
    expect(outcome).toMatchObject({ kind: "rejected", budget: true, groupId: null });
  });

  it("maps 401 and 409 to their views", async () => {
    const { client } = cannedClient([
      { status: 401, body: { code: "BadCredential", message: "nope", entity: null } },
      { status: 409, body: { code: "ElectionClosed", message: "closed", entity: "e1" } },
    ]);
    const submit = createSubmitter(client, schema());
    expect((await submit("e1", "t", filledBallot())).kind).toBe("unauthorized");
    const closed = await submit("e1", "t", filledBallot());
    expect(closed).toEqual({ kind: "closed", message: "election closed" });
  });

  it("maps 422 capacity refusals onto the rejected view", async () => {
    const { client } = cannedClient([
      { status: 422, body: { code: "GroupTooLarge", message: "cap is 8", entity: 1 } },
    ]);
    const outcome = await createSubmitter(client, schema())("e1", "t", filledBallot());
    expect(outcome).toMatchObject({ kind: "rejected", code: "GroupTooLarge", groupId: 1 });
  });

  it("turns transport failures into the retry view", async () => {
    const client: ServiceClient = {
      async get() {
        throw new Error("not used");
      },
      async post() {
        throw new Error("connection refused");
      },
    };
    const outcome = await createSubmitter(client, schema())("e1", "t", filledBallot());
    expect(outcome.kind).toBe("failed");
  });

  it("refuses to post a locally invalid ballot", async () => {
    const { client, sent } = cannedClient([]);
    const vm = filledBallot();
    vm.entries.get(1)!.funds = 99; // corrupted behind the operations' back
    const outcome = await createSubmitter(client, schema())("e1", "t", vm);
    expect(outcome).toMatchObject({ kind: "rejected", code: "ClientValidation" });
    expect(sent).toHaveLength(0);
  });

  it("holds a single in-flight submission", async () => {
    let release: (reply: HttpReply) => void = () => {};
    const gate = new Promise<HttpReply>((res) => (release = res));
    const client: ServiceClient = {
      async get() {
        throw new Error("not used");
      },
      post: () => gate,
    };
    const submit = createSubmitter(client, schema());
    const vm = filledBallot();
    const first = submit("e1", "t", vm);
    expect(await submit("e1", "t", vm)).toEqual({ kind: "busy" });
    release({ status: 200, body: echoBody(1, false) });
    expect((await first).kind).toBe("receipt");
    // the slot frees up afterwards
    const { client: c2 } = cannedClient([{ status: 200, body: echoBody(2, true) }]);
    expect((await createSubmitter(c2, schema())("e1", "t", vm)).kind).toBe("receipt");
  });
});

describe("anchorOf", () => {
  it("coerces numeric-string entities onto group ids", () => {
    expect(
      anchorOf({ code: "UnknownId", message: "", entity: "3" }, schema()),
    ).toEqual({ groupId: 3, budget: false });
  });

  it("ignores entities that name no group", () => {
    expect(
      anchorOf({ code: "UnknownId", message: "", entity: 42 }, schema()),
    ).toEqual({ groupId: null, budget: false });
    expect(anchorOf({ code: "ParseError", message: "", entity: null }, schema())).toEqual({
      groupId: null,
      budget: false,
    });
  });
});
