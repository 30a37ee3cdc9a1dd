/** Recorded service payloads for the fixture walkthroughs.
 *
 * Values mirror what the service returns for the bundled mini-rover and
 * auv-toy fixtures (exact rational strings); tests assert the console
 * renders them verbatim.
 */

import type { OutcomeJson, SessionPayload, UpdatesResponse } from "../src/types";

export const roverSession: SessionPayload = {
  schema_version: 1,
  session: "rover123",
  state_version: 1,
  digest: "abc",
  plan: {
    steps: [
      { index: 0, action: "(sample_soil r1 r1store w2)", cost: "10" },
      { index: 1, action: "(navigate r1 w2 w0)", cost: "5" },
      { index: 2, action: "(calibrate r1 cam1 obj0 w0)", cost: "5" },
      { index: 3, action: "(take_image r1 w0 obj0 cam1)", cost: "7" },
      { index: 4, action: "(sample_rock r0 r0store w0)", cost: "8" },
      { index: 5, action: "(comm_rock_data r0 general r0store w0 w0)", cost: "10" },
      { index: 6, action: "(comm_soil_data r1 general r1store w2 w0)", cost: "10" },
      { index: 7, action: "(comm_image_data r1 general obj0 w0)", cost: "15" },
    ],
    total_cost: "70",
    length: 8,
  },
  links: [
    { producer: 4, prop: "(have_rock_analysis r0store w0)", consumer: 5 },
    { producer: 4, prop: "(rock_analysed w0)", consumer: 5 },
    { producer: 5, prop: "(communicated_rock_data w0)", consumer: "goal" },
  ],
  injections: [],
  current_plan: {
    steps: [],
    total_cost: "0",
    length: 0,
  },
};

export const reconvergenceOutcome: OutcomeJson = {
  variant: "reconvergence",
  injected: "(navigate r0 w0 w1)",
  after: 5,
  k: 3,
  original_suffix_start: 7,
  C_A: "20",
  C_B: "30",
  alpha: ["(comm_soil_data r1 general r1store w2 w0)"],
  beta: [
    "(comm_soil_data r1 general r1store w2 w0)",
    "(navigate r0 w1 w0)",
    "(comm_rock_data r0 general r0store w0 w0)",
  ],
  text: "after injecting (navigate r0 w0 w1) the plan rejoins the original trajectory after 3 step(s)",
};

export const inapplicableOutcome: OutcomeJson = {
  variant: "inapplicable",
  injected: "(comm_rock_data r0 general r0store w0 w0)",
  after: 0,
  missing: ["(have_rock_analysis r0store w0)", "(rock_analysed w0)"],
  violated: [],
  text: "(comm_rock_data r0 general r0store w0 w0) cannot be applied at step 0",
};

export const auvViolationResponse: UpdatesResponse = {
  schema_version: 1,
  session: "auv1",
  state_version: 2,
  results: [
    {
      seq: 4,
      violation: {
        violated_facts: ["(connected wp32 wp36)"],
        affected_steps: [{ index: 10, action: "(do_hover auv wp32 wp36)" }],
        earliest_affected: 10,
        update_seq: 4,
        object_level: false,
      },
    },
  ],
  filter: {
    facts: ["(connected wp32 wp36)"],
    objects: ["wp32", "wp36"],
  },
};
