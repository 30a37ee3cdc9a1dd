/** Injection-outcome view: variant badge, cost bars, route listings.
 *
 * The displayed C_A/C_B/cost strings are the API payload values verbatim;
 * bar widths are the only derived numbers (pure geometry).
 */

import { barWidths } from "./fraction";
import type { OutcomeJson } from "./types";

export interface CostBar {
  label: string;
  value: string; // exact text from the payload
  width: number; // 0..100
}

export interface OutcomeView {
  variant: OutcomeJson["variant"];
  badge: string;
  injected: string;
  text: string;
  bars: CostBar[];
  routes: { label: string; actions: string[] }[];
  diagnosis: { missing: string[]; violated: string[] } | null;
}

const BADGES: Record<OutcomeJson["variant"], string> = {
  undo: "undo: the planner walked straight back",
  reconvergence: "reconvergence: rejoined the original plan",
  divergence: "divergence: a different way to the goal",
  failure: "failure: the suggestion leads to a dead end",
  inapplicable: "not applicable here",
};

export function buildOutcomeView(outcome: OutcomeJson): OutcomeView {
  const view: OutcomeView = {
    variant: outcome.variant,
    badge: BADGES[outcome.variant],
    injected: outcome.injected,
    text: outcome.text,
    bars: [],
    routes: [],
    diagnosis: null,
  };
  if (outcome.variant === "reconvergence" && outcome.C_A !== undefined && outcome.C_B !== undefined) {
    const widths = barWidths(outcome.C_A, outcome.C_B);
    view.bars = [
      { label: "C_A (planner's route)", value: outcome.C_A, width: widths.a },
      { label: "C_B (your route)", value: outcome.C_B, width: widths.b },
    ];
    view.routes = [
      { label: "alpha", actions: outcome.alpha ?? [] },
      { label: "beta", actions: outcome.beta ?? [] },
    ];
  } else if (outcome.variant === "divergence" && outcome.original_cost !== undefined && outcome.alternative_cost !== undefined) {
    const widths = barWidths(outcome.original_cost, outcome.alternative_cost);
    view.bars = [
      { label: "original completion", value: outcome.original_cost, width: widths.a },
      { label: "alternative", value: outcome.alternative_cost, width: widths.b },
    ];
    view.routes = [{ label: "alternative plan", actions: outcome.alternative_plan ?? [] }];
  } else if (outcome.variant === "inapplicable") {
    view.diagnosis = { missing: outcome.missing ?? [], violated: outcome.violated ?? [] };
  }
  return view;
}

const escapeHtml = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function renderOutcomeView(view: OutcomeView): string {
  const parts = [
    `<div class="outcome ${view.variant}">`,
    `<span class="badge ${view.variant}">${escapeHtml(view.badge)}</span>`,
    `<p class="injected">injected: ${escapeHtml(view.injected)}</p>`,
  ];
  for (const bar of view.bars) {
    parts.push(
      `<div class="cost-bar"><span class="label">${escapeHtml(bar.label)}</span>` +
        `<span class="bar" style="width:${bar.width}%"></span>` +
        `<span class="value">${escapeHtml(bar.value)}</span></div>`,
    );
  }
  for (const route of view.routes) {
    const actions = route.actions.map((a) => `<li>${escapeHtml(a)}</li>`).join("");
    parts.push(`<div class="route"><span>${escapeHtml(route.label)}</span><ul>${actions}</ul></div>`);
  }
  if (view.diagnosis) {
    const missing = view.diagnosis.missing.map((m) => `<li>missing ${escapeHtml(m)}</li>`).join("");
    const violated = view.diagnosis.violated.map((v) => `<li>requires not ${escapeHtml(v)}</li>`).join("");
    parts.push(`<ul class="diagnosis">${missing}${violated}</ul>`);
  }
  parts.push(`<p class="text">${escapeHtml(view.text)}</p>`, "</div>");
  return parts.join("\n");
}
