/** Browser entry point: wires the pure view builders to the DOM.
 *
 * Layout: session loader, plan list with causal-link overlay and execution
 * cursor, injection controls + visible stack, outcome panel, monitor panel.
 */

import { ExplanationApi } from "./api";
import { createPanel, renderMonitorPanel, stepPanel, attachNoReplanReason, MonitorPanel } from "./monitorPanel";
import { buildOutcomeView, renderOutcomeView } from "./outcomeView";
import { buildPlanView, renderPlanView } from "./planView";
import { renderStack, renderStaleBanner, SessionShell } from "./session";
import type { AskResponse, KnowledgeBaseUpdateJson, ViolationJson } from "./types";

const api = new ExplanationApi("");
let shell: SessionShell | null = null;
let panel: MonitorPanel | null = null;
let violations: ViolationJson[] = [];
let cursor = -1;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function redraw(): void {
  if (!shell || !shell.payload) return;
  if (shell.staleNotice) {
    el("banner").innerHTML = renderStaleBanner();
    const btn = el("banner").querySelector(".reload-btn");
    btn?.addEventListener("click", () => void reload());
    return;
  }
  el("banner").innerHTML = "";
  const payload = shell.payload;
  // after an injection the dialogue is about the replanned continuation;
  // the causal overlay belongs to the original plan only
  const planJson = shell.stack.length ? payload.current_plan : payload.plan;
  const links = shell.stack.length ? [] : payload.links;
  el("plan").innerHTML = renderPlanView(buildPlanView(planJson, links, cursor, violations));
  el("stack").innerHTML = renderStack(shell.stack);
  el("stack").querySelector(".pop-btn")?.addEventListener("click", () => {
    void shell?.popInjection().then(redraw);
  });
  el("version").textContent = `session ${payload.session} @ v${shell.stateVersion}`;
  if (panel) {
    el("monitor").innerHTML = renderMonitorPanel(panel);
    el("monitor").querySelector(".step-btn:not([disabled])")?.addEventListener("click", () => {
      void stepExecution();
    });
  }
}

async function reload(): Promise<void> {
  if (!shell) return;
  await shell.load();
  redraw();
}

async function loadSession(): Promise<void> {
  const id = (el("session-id") as HTMLInputElement).value.trim();
  if (!id) return;
  shell = new SessionShell(api, id);
  try {
    await shell.load();
  } catch {
    el("banner").innerHTML = `<div class="banner error">session not found &mdash; check the id and retry</div>`;
    return;
  }
  violations = [];
  cursor = -1;
  redraw();
}

async function askContrastive(): Promise<void> {
  if (!shell) return;
  const after = Number((el("inject-after") as HTMLInputElement).value);
  const action = (el("inject-action") as HTMLInputElement).value.trim();
  const allowRevisit = (el("allow-revisit") as HTMLInputElement).checked;
  const response = await shell.inject(after, action, !allowRevisit);
  if (response) {
    el("outcome").innerHTML = renderOutcomeView(buildOutcomeView(response.outcome));
  }
  redraw();
}

async function askWhy(step: number): Promise<void> {
  if (!shell) return;
  const answer = (await shell.ask({ kind: "q1", step })) as AskResponse | null;
  if (answer) {
    el("outcome").innerHTML = `<div class="why"><p>${answer.text}</p></div>`;
  }
  redraw();
}

async function attachStream(): Promise<void> {
  const raw = (el("updates-input") as HTMLTextAreaElement).value.trim();
  if (!raw) return;
  const stream = raw
    .split("\n")
    .filter((line) => line.trim())
    .map((line) => JSON.parse(line) as KnowledgeBaseUpdateJson);
  panel = createPanel(stream);
  violations = [];
  redraw();
}

async function stepExecution(): Promise<void> {
  if (!shell || !panel || panel.exhausted) return;
  const next = panel.pending[0];
  const response = await shell.sendUpdates([next]);
  if (!response) {
    redraw();
    return;
  }
  const result = response.results[0];
  panel = stepPanel(panel, result);
  cursor = Math.max(cursor, next.at);
  if (result.violation) {
    violations = [...violations, result.violation];
  } else {
    const q6 = (await shell.ask({ kind: "q6", seq: next.seq })) as AskResponse | null;
    if (q6) {
      panel = attachNoReplanReason(panel, next.seq, q6.text);
    }
  }
  redraw();
}

export function boot(): void {
  el("load-btn").addEventListener("click", () => void loadSession());
  el("inject-btn").addEventListener("click", () => void askContrastive());
  el("attach-btn").addEventListener("click", () => void attachStream());
  el("plan").addEventListener("dblclick", (event) => {
    const li = (event.target as HTMLElement).closest(".step");
    if (li) void askWhy(Number((li as HTMLElement).dataset.index));
  });
}

if (typeof document !== "undefined" && document.getElementById("load-btn")) {
  boot();
}
