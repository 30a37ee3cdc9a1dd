import { describe, expect, it } from "vitest";

import { buildPlanView, renderPlanView } from "../src/planView";
import { auvViolationResponse, roverSession } from "./fixtures";

describe("plan view", () => {
  it("renders steps in plan order with payload costs verbatim", () => {
    const view = buildPlanView(roverSession.plan, roverSession.links);
    expect(view.steps.map((s) => s.index)).toEqual([0, 1, 2, 3, 4, 5, 6, 7]);
    expect(view.steps[4].cost).toBe("8");
    expect(view.totalCost).toBe("70");
    const html = renderPlanView(view);
    expect(html).toContain("(sample_rock r0 r0store w0)");
    expect(html).toContain("total 70");
  });

  it("overlays exactly the causal links from the API", () => {
    const view = buildPlanView(roverSession.plan, roverSession.links);
    expect(view.steps[4].outgoing).toHaveLength(2);
    expect(view.steps[5].outgoing.map((l) => l.consumer)).toEqual(["goal"]);
    const html = renderPlanView(view);
    expect(html).toContain('data-prop="(have_rock_analysis r0store w0)"');
  });

  it("splits executed and pending around the cursor", () => {
    const view = buildPlanView(roverSession.plan, [], 3);
    expect(view.steps.filter((s) => s.status === "executed").map((s) => s.index)).toEqual([0, 1, 2, 3]);
    expect(view.steps[4].status).toBe("pending");
  });

  it("marks violation-affected steps", () => {
    const plan = {
      steps: Array.from({ length: 12 }, (_, i) => ({ index: i, action: `(step ${i})`, cost: "1" })),
      total_cost: "12",
      length: 12,
    };
    const view = buildPlanView(plan, [], 7, [auvViolationResponse.results[0].violation!]);
    expect(view.steps[10].status).toBe("affected");
    expect(renderPlanView(view)).toContain('class="step affected" data-index="10"');
  });

  it("shows a placeholder for the empty plan", () => {
    const view = buildPlanView({ steps: [], total_cost: "0", length: 0 }, []);
    expect(renderPlanView(view)).toContain("empty plan");
  });
});
