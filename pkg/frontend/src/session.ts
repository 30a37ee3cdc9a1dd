/** Client-side session shell: tracks the state version the UI renders,
 * keeps the injection stack visible, and forces a reload when the server
 * says the session moved (409).
 */

import { ExplanationApi, StaleSessionError } from "./api";
import type { InjectResponse, OutcomeJson, SessionPayload } from "./types";

export interface InjectionEntry {
  after: number;
  action: string;
  outcome: OutcomeJson;
}

export class SessionShell {
  payload: SessionPayload | null = null;
  stack: InjectionEntry[] = [];
  staleNotice = false;

  constructor(
    private api: ExplanationApi,
    public sessionId: string,
  ) {}

  get stateVersion(): number {
    return this.payload?.state_version ?? 0;
  }

  async load(): Promise<SessionPayload> {
    this.payload = await this.api.loadSession(this.sessionId);
    this.staleNotice = false;
    return this.payload;
  }

  /** Run an API call; on a stale-session rejection, flag for reload. */
  private async guarded<T>(call: () => Promise<T>): Promise<T | null> {
    try {
      return await call();
    } catch (err) {
      if (err instanceof StaleSessionError) {
        this.staleNotice = true;
        return null;
      }
      throw err;
    }
  }

  async ask(question: Record<string, unknown>) {
    return this.guarded(() => this.api.ask(this.sessionId, question, this.stateVersion));
  }

  async inject(after: number, action: string, forbidRevisit = true): Promise<InjectResponse | null> {
    const response = await this.guarded(() => this.api.inject(this.sessionId, after, action, forbidRevisit));
    if (response && this.payload) {
      // an inapplicable injection answers "why can't you do that" and does
      // not advance the session, so it never enters the stack
      if (response.outcome.variant !== "inapplicable") {
        this.stack.push({ after, action, outcome: response.outcome });
        this.payload.state_version = response.state_version;
        if (response.current_plan) {
          this.payload.current_plan = response.current_plan;
        }
      }
    }
    return response;
  }

  async popInjection(): Promise<void> {
    const response = await this.guarded(() => this.api.popInjection(this.sessionId));
    if (response) {
      this.stack.pop();
      if (this.payload) {
        this.payload.state_version = response.state_version;
        if (response.current_plan) {
          this.payload.current_plan = response.current_plan;
        }
      }
    }
  }

  async sendUpdates(updates: Parameters<ExplanationApi["sendUpdates"]>[1]) {
    const response = await this.guarded(() => this.api.sendUpdates(this.sessionId, updates));
    if (response && this.payload) {
      this.payload.state_version = response.state_version;
    }
    return response;
  }
}

export function renderStack(stack: InjectionEntry[]): string {
  if (!stack.length) {
    return `<div class="stack empty">no injections yet</div>`;
  }
  const rows = stack
    .map(
      (e, i) =>
        `<li class="stack-entry" data-depth="${i}">after ${e.after}: ${e.action} ` +
        `<span class="badge ${e.outcome.variant}">${e.outcome.variant}</span></li>`,
    )
    .join("\n");
  return `<ol class="stack">\n${rows}\n</ol>\n<button class="pop-btn">pop top injection</button>`;
}

export function renderStaleBanner(): string {
  return `<div class="banner stale">this view is out of date: the session changed elsewhere &mdash; <button class="reload-btn">reload</button></div>`;
}
