import { describe, expect, it } from "vitest";

import { ExplanationApi } from "../src/api";
import { renderStack, renderStaleBanner, SessionShell } from "../src/session";
import { inapplicableOutcome, reconvergenceOutcome, roverSession } from "./fixtures";

type Route = { status: number; body: unknown };

function routedFetch(routes: Record<string, Route[]>) {
  return (url: string, init?: RequestInit) => {
    const key = `${init?.method ?? "GET"} ${url}`;
    const queue = routes[key];
    if (!queue || !queue.length) {
      return Promise.resolve(new Response("{}", { status: 500 }));
    }
    const next = queue.shift()!;
    return Promise.resolve(new Response(JSON.stringify(next.body), { status: next.status }));
  };
}

function shellWith(routes: Record<string, Route[]>): SessionShell {
  return new SessionShell(new ExplanationApi("", routedFetch(routes)), "rover123");
}

describe("session shell", () => {
  it("tracks the state version it renders", async () => {
    const shell = shellWith({
      "GET /sessions/rover123/plan": [{ status: 200, body: roverSession }],
    });
    await shell.load();
    expect(shell.stateVersion).toBe(1);
  });

  it("pushes accepted injections and bumps the version", async () => {
    const shell = shellWith({
      "GET /sessions/rover123/plan": [{ status: 200, body: roverSession }],
      "POST /sessions/rover123/inject": [
        { status: 200, body: { state_version: 2, outcome: reconvergenceOutcome } },
      ],
    });
    await shell.load();
    const response = await shell.inject(5, "(navigate r0 w0 w1)");
    expect(response?.outcome.variant).toBe("reconvergence");
    expect(shell.stack).toHaveLength(1);
    expect(shell.stateVersion).toBe(2);
    expect(renderStack(shell.stack)).toContain("reconvergence");
  });

  it("keeps inapplicable injections off the stack", async () => {
    const shell = shellWith({
      "GET /sessions/rover123/plan": [{ status: 200, body: roverSession }],
      "POST /sessions/rover123/inject": [
        { status: 200, body: { state_version: 1, outcome: inapplicableOutcome } },
      ],
    });
    await shell.load();
    const response = await shell.inject(0, "(comm_rock_data r0 general r0store w0 w0)");
    expect(response?.outcome.variant).toBe("inapplicable");
    expect(shell.stack).toHaveLength(0);
    expect(shell.stateVersion).toBe(1);
  });

  it("pops the stack and restores the previous version", async () => {
    const shell = shellWith({
      "GET /sessions/rover123/plan": [{ status: 200, body: roverSession }],
      "POST /sessions/rover123/inject": [
        { status: 200, body: { state_version: 2, outcome: reconvergenceOutcome } },
      ],
      "DELETE /sessions/rover123/inject/top": [
        { status: 200, body: { state_version: 3, depth: 0 } },
      ],
    });
    await shell.load();
    await shell.inject(5, "(navigate r0 w0 w1)");
    await shell.popInjection();
    expect(shell.stack).toHaveLength(0);
    expect(shell.stateVersion).toBe(3);
  });

  it("flags a stale session on 409 and renders the reload banner", async () => {
    const shell = shellWith({
      "GET /sessions/rover123/plan": [{ status: 200, body: roverSession }],
      "POST /sessions/rover123/ask": [{ status: 409, body: { detail: "stale" } }],
    });
    await shell.load();
    const answer = await shell.ask({ kind: "q1", step: 4 });
    expect(answer).toBeNull();
    expect(shell.staleNotice).toBe(true);
    expect(renderStaleBanner()).toContain("reload");
  });
});
