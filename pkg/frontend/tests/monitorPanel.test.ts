import { describe, expect, it } from "vitest";

import { attachNoReplanReason, createPanel, renderMonitorPanel, stepPanel } from "../src/monitorPanel";
import { auvViolationResponse } from "./fixtures";
import type { KnowledgeBaseUpdateJson, UpdateResult } from "../src/types";

const stream: KnowledgeBaseUpdateJson[] = [
  { seq: 1, op: "add", literal: "(at auv wp2)", at: 2 },
  { seq: 4, op: "remove", literal: "(connected wp32 wp36)", at: 7 },
];

const benign: UpdateResult = { seq: 1, violation: null };
const violent: UpdateResult = auvViolationResponse.results[0];

describe("monitor panel", () => {
  it("steps through the stream in order", () => {
    let panel = createPanel(stream);
    expect(panel.pending).toHaveLength(2);
    panel = stepPanel(panel, benign);
    expect(panel.applied).toHaveLength(1);
    expect(panel.applied[0].violation).toBeNull();
    panel = stepPanel(panel, violent);
    expect(panel.exhausted).toBe(true);
  });

  it("highlights the earliest affected future step from the payload", () => {
    let panel = createPanel(stream);
    panel = stepPanel(panel, benign);
    panel = stepPanel(panel, violent);
    expect(panel.affectedSteps).toEqual([10]);
    expect(panel.earliest).toBe(10);
    const html = renderMonitorPanel(panel);
    expect(html).toContain('data-index="10"');
    expect(html).toContain("(do_hover auv wp32 wp36)");
    expect(html).toContain("earliest affected step 10");
  });

  it("rejects out-of-order results", () => {
    const panel = createPanel(stream);
    expect(() => stepPanel(panel, violent)).toThrow(/out of sync/);
  });

  it("disables controls when the stream is exhausted", () => {
    let panel = createPanel([stream[0]]);
    panel = stepPanel(panel, benign);
    expect(renderMonitorPanel(panel)).toContain("disabled");
  });

  it("attaches no-replan justifications to benign updates", () => {
    let panel = createPanel([stream[0]]);
    panel = stepPanel(panel, benign);
    panel = attachNoReplanReason(panel, 1, "the observation matches the predicted state at this point");
    expect(renderMonitorPanel(panel)).toContain("matches the predicted state");
  });
});
