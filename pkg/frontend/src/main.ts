// Browser entry: wires the ballot view model to form controls.  All state
// changes go through the view-model operations; this file only renders and
// forwards events.  Connection details come from the location hash
// (#election=ID&token=TOKEN[&base=URL]) or the connect form.

import { httpClient, ServiceClient } from "./client.js";
import { fetchResults } from "./results.js";
import { createSubmitter, SubmitVote } from "./submit.js";
import type { BallotSchema, SchemaGroup } from "./types.js";
import {
  BallotViewModel,
  COMPLEMENT_QUESTION,
  approvalCap,
  budgetMeter,
  complementVisible,
  createBallot,
  setComplement,
  setFunds,
  toggleApproval,
} from "./viewmodel.js";

interface Session {
  client: ServiceClient;
  electionId: string;
  token: string;
  schema: BallotSchema;
  vm: BallotViewModel;
  submit: SubmitVote;
  voterId: string | null;
}

let session: Session | null = null;

const $ = (id: string) => document.getElementById(id) as HTMLElement;

function hashParams(): Record<string, string> {
  const out: Record<string, string> = {};
  for (const part of window.location.hash.replace(/^#/, "").split("&")) {
    const [k, v] = part.split("=");
    if (k && v !== undefined) out[k] = decodeURIComponent(v);
  }
  return out;
}

function notice(text: string | null, tone: "info" | "error" = "info"): void {
  const box = $("notice");
  box.textContent = text ?? "";
  box.className = text ? `notice ${tone}` : "notice";
}

async function connect(base: string, electionId: string, token: string): Promise<void> {
  const client = httpClient(base);
  let reply;
  try {
    reply = await client.get(`/elections/${electionId}/schema`);
  } catch (exc) {
    renderRetry(`could not reach the election service: ${exc}`, base, electionId, token);
    return;
  }
  if (reply.status !== 200) {
    renderRetry(`schema fetch failed (status ${reply.status})`, base, electionId, token);
    return;
  }
  const schema = reply.body as BallotSchema;
  session = {
    client,
    electionId,
    token,
    schema,
    vm: createBallot(schema),
    submit: createSubmitter(client, schema),
    voterId: null,
  };
  renderBallot();
}

function renderRetry(message: string, base: string, electionId: string, token: string): void {
  const root = $("app");
  root.innerHTML = "";
  const p = el("p", "error", message);
  const btn = el("button", "", "retry") as HTMLButtonElement;
  btn.onclick = () => void connect(base, electionId, token);
  root.append(p, btn);
}

function el(tag: string, cls = "", text = ""): HTMLElement {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text) node.textContent = text;
  return node;
}

function renderMeter(): void {
  if (!session) return;
  const meter = budgetMeter(session.vm);
  const bar = $("meter-bar") as HTMLProgressElement & HTMLElement;
  (bar as unknown as HTMLProgressElement).max = meter.budget;
  (bar as unknown as HTMLProgressElement).value = meter.total;
  $("meter-text").textContent =
    `Funds Allotted: ${meter.total} / ${meter.budget} (${meter.remaining} left)`;
}

function renderGroup(g: SchemaGroup): HTMLElement {
  const s = session!;
  const entry = s.vm.entries.get(g.id)!;
  const card = el("fieldset", "group");
  card.id = `group-${g.id}`;
  const title =
    g.kind === "contradictory"
      ? `${g.name} (choose at most ${approvalCap(g)})`
      : g.name;
  card.append(el("legend", "", title));

  const sliderRow = el("div", "funds-row");
  const slider = document.createElement("input");
  slider.type = "range";
  slider.min = "0";
  slider.max = String(s.vm.budget);
  slider.step = "1";
  slider.value = String(entry.funds);
  const readout = el("span", "funds-readout", `funds: ${entry.funds}`);
  slider.oninput = () => {
    const report = setFunds(s.vm, g.id, Number(slider.value));
    notice(report.notice, report.clamped ? "error" : "info");
    refreshGroup(g);
    renderMeter();
  };
  sliderRow.append(slider, readout);
  card.append(sliderRow);

  const list = el("div", "projects");
  for (const p of g.projects) {
    const row = el("label", "project");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = entry.approvals.has(p.id);
    box.disabled = entry.funds === 0;
    box.onchange = () => {
      const report = toggleApproval(s.vm, g.id, p.id);
      notice(report.notice, report.applied ? "info" : "error");
      refreshGroup(g);
    };
    row.append(box, el("span", "", ` ${p.name} (cost ${p.cost})`));
    list.append(row);
  }
  card.append(list);

  if (complementVisible(s.vm, g.id)) {
    const ask = el("div", "complement");
    ask.append(el("p", "", COMPLEMENT_QUESTION));
    for (const value of [true, false]) {
      const row = el("label", "");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = `complement-${g.id}`;
      radio.checked = entry.complement === value;
      radio.onchange = () => {
        const report = setComplement(s.vm, g.id, value);
        notice(report.notice, report.applied ? "info" : "error");
      };
      row.append(radio, el("span", "", value ? " yes" : " no"));
      ask.append(row);
    }
    card.append(ask);
  }
  return card;
}

function refreshGroup(g: SchemaGroup): void {
  const old = document.getElementById(`group-${g.id}`);
  if (old) old.replaceWith(renderGroup(g));
}

function renderBallot(): void {
  const s = session!;
  const root = $("app");
  root.innerHTML = "";

  const meterBox = el("div", "meter");
  const bar = document.createElement("progress");
  bar.id = "meter-bar";
  meterBox.append(bar, el("div", "", ""));
  const meterText = el("div", "meter-text");
  meterText.id = "meter-text";
  meterBox.append(meterText);
  root.append(meterBox);

  for (const g of s.vm.groups) root.append(renderGroup(g));

  const noticeBox = el("div", "notice");
  noticeBox.id = "notice";
  root.append(noticeBox);

  const actions = el("div", "actions");
  const submitBtn = el("button", "", "submit vote") as HTMLButtonElement;
  submitBtn.onclick = () => void doSubmit(submitBtn);
  const resultsBtn = el("button", "", "view results") as HTMLButtonElement;
  resultsBtn.onclick = () => void doResults();
  actions.append(submitBtn, resultsBtn);
  root.append(actions);

  const receipt = el("div", "receipt");
  receipt.id = "receipt";
  root.append(receipt);
  renderMeter();
}

async function doSubmit(button: HTMLButtonElement): Promise<void> {
  const s = session!;
  button.disabled = true;
  const outcome = await s.submit(s.electionId, s.token, s.vm);
  button.disabled = false;
  document.querySelectorAll(".anchored").forEach((n) => n.classList.remove("anchored"));
  const receipt = $("receipt");
  receipt.innerHTML = "";
  switch (outcome.kind) {
    case "receipt": {
      s.voterId = outcome.echo.vote.voter;
      receipt.append(el("p", "ok", `vote recorded (seq ${outcome.seq})`));
      if (outcome.notice) receipt.append(el("p", "info", outcome.notice));
      for (const w of outcome.echo.warnings) receipt.append(el("p", "warn", w));
      const entries = outcome.echo.vote.entries;
      for (const gid of Object.keys(entries)) {
        const e = entries[gid];
        receipt.append(
          el(
            "p",
            "echo",
            `group ${gid}: funds ${e.funds}, approvals {${e.approvals.join(", ")}}` +
              (e.complement ? ", all-or-nothing" : ""),
          ),
        );
      }
      break;
    }
    case "rejected": {
      notice(outcome.message, "error");
      if (outcome.budget) $("meter-text").classList.add("anchored");
      if (outcome.groupId !== null) {
        document.getElementById(`group-${outcome.groupId}`)?.classList.add("anchored");
      }
      break;
    }
    case "closed":
      notice(outcome.message, "error");
      break;
    case "unauthorized":
      notice(outcome.message, "error");
      break;
    case "busy":
      break;
    case "failed":
      notice(outcome.message, "error");
      break;
  }
}

async function doResults(): Promise<void> {
  const s = session!;
  const outcome = await fetchResults(s.client, s.electionId, s.schema, s.voterId);
  const receipt = $("receipt");
  receipt.innerHTML = "";
  if (outcome.kind === "open") {
    receipt.append(el("p", "info", outcome.message));
    return;
  }
  if (outcome.kind === "failed") {
    notice(outcome.message, "error");
    return;
  }
  const view = outcome.view;
  receipt.append(el("h2", "", "Results"));
  const list = el("ul", "funded");
  for (const p of view.funded) list.append(el("li", "", `${p.name} (cost ${p.cost})`));
  receipt.append(list);
  receipt.append(el("p", "", `total spend: ${view.spend} of ${view.budget}`));
  receipt.append(el("p", "", `social welfare: ${view.socialWelfare}`));
  if (view.yourUtility !== null) {
    receipt.append(el("p", "", `your utility: ${view.yourUtility}`));
  }
  for (const bar of view.labelBars) {
    const row = el("div", bar.within ? "bar ok" : "bar bad");
    row.textContent = `label ${bar.labelId}: spend ${bar.spend} in [${bar.min}, ${bar.max}]`;
    receipt.append(row);
  }
  for (const w of view.warnings) receipt.append(el("p", "warn", w));
}

function boot(): void {
  const params = hashParams();
  const form = $("connect") as HTMLFormElement & HTMLElement;
  if (params.election && params.token) {
    form.style.display = "none";
    void connect(params.base ?? "", params.election, params.token);
    return;
  }
  (form as unknown as HTMLFormElement).onsubmit = (ev: Event) => {
    ev.preventDefault();
    const base = (document.getElementById("base") as HTMLInputElement).value;
    const election = (document.getElementById("election") as HTMLInputElement).value;
    const token = (document.getElementById("token") as HTMLInputElement).value;
    form.style.display = "none";
    void connect(base, election, token);
  };
}

boot();
