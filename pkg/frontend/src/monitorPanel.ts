/** Execution-monitor panel: step through updates, surface violations,
 * and show "why no replanning" justifications for benign updates.
 */

import type { KnowledgeBaseUpdateJson, UpdateResult, ViolationJson } from "./types";

export interface MonitorEntry {
  update: KnowledgeBaseUpdateJson;
  violation: ViolationJson | null;
  noReplanReason?: string; // filled in by a q6 ask when requested
}

export interface MonitorPanel {
  pending: KnowledgeBaseUpdateJson[];
  applied: MonitorEntry[];
  exhausted: boolean;
  affectedSteps: number[];
  earliest: number | null;
}

export function createPanel(stream: KnowledgeBaseUpdateJson[]): MonitorPanel {
  return { pending: [...stream], applied: [], exhausted: stream.length === 0, affectedSteps: [], earliest: null };
}

/** Consume one update's server-side result; returns the new panel state. */
export function stepPanel(panel: MonitorPanel, result: UpdateResult): MonitorPanel {
  const [next, ...rest] = panel.pending;
  if (!next || next.seq !== result.seq) {
    throw new Error(`update stream out of sync: expected seq ${next?.seq}, got ${result.seq}`);
  }
  const entry: MonitorEntry = { update: next, violation: result.violation };
  const affected = new Set(panel.affectedSteps);
  if (result.violation) {
    for (const step of result.violation.affected_steps) {
      affected.add(step.index);
    }
  }
  const sorted = [...affected].sort((a, b) => a - b);
  return {
    pending: rest,
    applied: [...panel.applied, entry],
    exhausted: rest.length === 0,
    affectedSteps: sorted,
    earliest: sorted.length ? sorted[0] : null,
  };
}

export function attachNoReplanReason(panel: MonitorPanel, seq: number, reason: string): MonitorPanel {
  return {
    ...panel,
    applied: panel.applied.map((e) => (e.update.seq === seq ? { ...e, noReplanReason: reason } : e)),
  };
}

const escapeHtml = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function renderMonitorPanel(panel: MonitorPanel): string {
  const rows = panel.applied
    .map((entry) => {
      const u = entry.update;
      const what = u.op === "remove_object" ? `object ${u.object}` : u.literal ?? "";
      if (entry.violation) {
        const steps = entry.violation.affected_steps
          .map((s) => `<span class="affected-step" data-index="${s.index}">${s.index}: ${escapeHtml(s.action)}</span>`)
          .join(" ");
        return (
          `<li class="update violation" data-seq="${u.seq}">` +
          `${u.seq}: ${u.op} ${escapeHtml(what)} &mdash; ` +
          `<strong>violation</strong> (earliest affected step ${entry.violation.earliest_affected}) ${steps}</li>`
        );
      }
      const reason = entry.noReplanReason ? ` <em class="no-replan">${escapeHtml(entry.noReplanReason)}</em>` : "";
      return `<li class="update ok" data-seq="${u.seq}">${u.seq}: ${u.op} ${escapeHtml(what)} &mdash; ok${reason}</li>`;
    })
    .join("\n");
  const controls = panel.exhausted
    ? `<button class="step-btn" disabled>stream exhausted</button>`
    : `<button class="step-btn">apply next update (${panel.pending.length} left)</button>`;
  return `<ul class="monitor">\n${rows}\n</ul>\n${controls}`;
}
