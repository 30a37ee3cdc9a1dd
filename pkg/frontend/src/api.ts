/** Typed client for the explanation service's HTTP JSON API.
 *
 * The console talks to the service through this module only; no file access,
 * no local planning. A 409 from any call means the session moved under us and
 * surfaces as StaleSessionError so the shell can force a reload.
 */

import type {
  AskResponse,
  InjectResponse,
  KnowledgeBaseUpdateJson,
  SessionPayload,
  UpdatesResponse,
} from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class StaleSessionError extends Error {
  constructor(public detail: unknown) {
    super("session advanced; reload required");
  }
}

export class ApiError extends Error {
  constructor(public status: number, public detail: unknown) {
    super(`service error ${status}`);
  }
}

async function expectJson<T>(response: Response): Promise<T> {
  if (response.status === 409) {
    throw new StaleSessionError(await response.json().catch(() => null));
  }
  if (!response.ok) {
    throw new ApiError(response.status, await response.json().catch(() => null));
  }
  return (await response.json()) as T;
}

export class ExplanationApi {
  constructor(
    private base: string = "",
    private fetcher: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetcher(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => expectJson<T>(r));
  }

  createSession(domain: string, problem: string, plan?: string): Promise<SessionPayload> {
    return this.post("/sessions", { domain, problem, ...(plan ? { plan } : {}) });
  }

  loadSession(id: string): Promise<SessionPayload> {
    return this.fetcher(`${this.base}/sessions/${id}/plan`).then((r) => expectJson<SessionPayload>(r));
  }

  ask(id: string, question: Record<string, unknown>, stateVersion: number): Promise<AskResponse> {
    return this.post(`/sessions/${id}/ask`, { question, state_version: stateVersion });
  }

  inject(id: string, after: number, action: string, forbidRevisit: boolean): Promise<InjectResponse> {
    return this.post(`/sessions/${id}/inject`, {
      after,
      action,
      forbid_revisit: forbidRevisit,
    });
  }

  popInjection(id: string): Promise<InjectResponse> {
    return this.fetcher(`${this.base}/sessions/${id}/inject/top`, { method: "DELETE" }).then((r) =>
      expectJson<InjectResponse>(r),
    );
  }

  sendUpdates(id: string, updates: KnowledgeBaseUpdateJson[]): Promise<UpdatesResponse> {
    return this.post(`/sessions/${id}/updates`, { updates });
  }

  report(id: string): Promise<unknown> {
    return this.fetcher(`${this.base}/sessions/${id}/report`).then((r) => expectJson<unknown>(r));
  }
}
