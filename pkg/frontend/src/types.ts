/** Payload types mirroring the service's JSON schemas (schema_version 1). */

export interface PlanStep {
  index: number;
  action: string;
  cost: string; // exact rational as text; never recomputed client-side
}

export interface PlanJson {
  steps: PlanStep[];
  total_cost: string;
  length: number;
}

export interface CausalLinkJson {
  producer: number;
  prop: string;
  consumer: number | "goal";
}

export interface SessionPayload {
  schema_version: number;
  session: string;
  state_version: number;
  digest: string;
  plan: PlanJson;
  links: CausalLinkJson[];
  injections: InjectionRecord[];
  current_plan: PlanJson;
}

export interface InjectionRecord {
  after: number;
  action: string;
  forbid_revisit: boolean;
}

export type OutcomeVariant = "undo" | "reconvergence" | "divergence" | "failure" | "inapplicable";

export interface OutcomeJson {
  variant: OutcomeVariant;
  injected: string;
  after: number;
  text: string;
  // reconvergence
  k?: number;
  original_suffix_start?: number;
  C_A?: string;
  C_B?: string;
  alpha?: string[];
  beta?: string[];
  // divergence
  alternative_plan?: string[];
  original_cost?: string;
  alternative_cost?: string;
  // failure
  explored_states?: number;
  // inapplicable (the "why can't you do that" diagnosis)
  missing?: string[];
  violated?: string[];
}

export interface InjectResponse {
  schema_version: number;
  session: string;
  state_version: number;
  outcome: OutcomeJson;
  current_plan?: PlanJson;
}

export interface ViolationJson {
  violated_facts: string[];
  affected_steps: { index: number; action: string }[];
  earliest_affected: number;
  update_seq: number;
  object_level: boolean;
}

export interface UpdateResult {
  seq: number;
  violation: ViolationJson | null;
}

export interface UpdatesResponse {
  schema_version: number;
  session: string;
  state_version: number;
  results: UpdateResult[];
  filter: { facts: string[]; objects: string[] };
}

export interface AskResponse {
  schema_version: number;
  session: string;
  question: Record<string, unknown>;
  state_version: number;
  evidence: Record<string, unknown>;
  text: string;
}

export interface KnowledgeBaseUpdateJson {
  seq: number;
  op: "add" | "remove" | "remove_object";
  literal?: string;
  object?: string;
  at: number;
}
