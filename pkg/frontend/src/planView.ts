/** Plan view-model: ordered steps, causal-link overlay, execution status.
 *
 * Pure data in, pure data out; the DOM shell renders the result. Costs are
 * copied verbatim from the payload (the console never does arithmetic on
 * them).
 */

import type { CausalLinkJson, PlanJson, ViolationJson } from "./types";

export type StepStatus = "executed" | "pending" | "affected";

export interface StepView {
  index: number;
  action: string;
  cost: string;
  status: StepStatus;
  outgoing: CausalLinkJson[];
}

export interface PlanView {
  steps: StepView[];
  totalCost: string;
  links: CausalLinkJson[];
  cursor: number; // index of the step currently executing; -1 before start
}

export function buildPlanView(
  plan: PlanJson,
  links: CausalLinkJson[],
  cursor = -1,
  violations: ViolationJson[] = [],
): PlanView {
  const affected = new Set<number>();
  for (const violation of violations) {
    for (const step of violation.affected_steps) {
      affected.add(step.index);
    }
  }
  const steps = plan.steps.map((step) => ({
    index: step.index,
    action: step.action,
    cost: step.cost,
    status: (affected.has(step.index)
      ? "affected"
      : step.index <= cursor
        ? "executed"
        : "pending") as StepStatus,
    outgoing: links.filter((l) => l.producer === step.index),
  }));
  return { steps, totalCost: plan.total_cost, links, cursor };
}

const escapeHtml = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function renderPlanView(view: PlanView): string {
  if (view.steps.length === 0) {
    return `<div class="plan empty-plan">empty plan (the goal already holds)` +
      `<span class="total">total ${escapeHtml(view.totalCost)}</span></div>`;
  }
  const rows = view.steps
    .map((step) => {
      const arcs = step.outgoing
        .map((l) => `<span class="arc" data-prop="${escapeHtml(l.prop)}">&rarr; ${l.consumer}</span>`)
        .join(" ");
      return (
        `<li class="step ${step.status}" data-index="${step.index}">` +
        `<span class="idx">${step.index}</span>` +
        `<span class="action">${escapeHtml(step.action)}</span>` +
        `<span class="cost">${escapeHtml(step.cost)}</span>` +
        `<span class="links">${arcs}</span>` +
        `</li>`
      );
    })
    .join("\n");
  return `<ol class="plan" start="0">\n${rows}\n</ol>\n<div class="total">total ${escapeHtml(view.totalCost)}</div>`;
}
