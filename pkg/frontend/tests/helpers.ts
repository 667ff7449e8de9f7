/** Shared test scaffolding: recorded-response loading and a fake fetch that
 * only answers routes the test registered, so any unexpected request fails
 * loudly instead of being silently absorbed. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, name), "utf8")) as T;
}

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURE_DIR, name), "utf8");
}

export interface RecordedCall {
  method: string;
  url: string;
  headers: Record<string, string>;
  body: unknown;
}

type Reply = { status: number; body: unknown };
type Handler = Reply | (() => Promise<Reply>);

function asResponse(reply: Reply): Response {
  // Only the surface the client uses; avoids environment Response quirks.
  return {
    ok: reply.status >= 200 && reply.status < 300,
    status: reply.status,
    text: async () =>
      typeof reply.body === "string" ? reply.body : JSON.stringify(reply.body),
  } as unknown as Response;
}

export class FakeService {
  readonly calls: RecordedCall[] = [];
  private readonly routes = new Map<string, Handler>();

  on(method: string, url: string, body: unknown, status = 200): this {
    this.routes.set(`${method} ${url}`, { status, body });
    return this;
  }

  /** Register a route whose reply the test releases by hand. */
  defer(method: string, url: string): (reply: Reply) => void {
    let release!: (reply: Reply) => void;
    const gate = new Promise<Reply>((resolve) => {
      release = resolve;
    });
    this.routes.set(`${method} ${url}`, () => gate);
    return release;
  }

  requests(method: string, urlPrefix = ""): RecordedCall[] {
    return this.calls.filter(
      (c) => c.method === method && c.url.startsWith(urlPrefix),
    );
  }

  readonly fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    this.calls.push({
      method,
      url,
      headers: (init?.headers as Record<string, string>) ?? {},
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    });
    const handler = this.routes.get(`${method} ${url}`);
    if (!handler) throw new Error(`unrouted request: ${method} ${url}`);
    const reply = typeof handler === "function" ? await handler() : handler;
    return asResponse(reply);
  };
}

/** Poll until the probe returns truthy; microtask-queue friendly. */
export async function until(
  probe: () => boolean,
  what = "condition",
  timeoutMs = 5000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!probe()) {
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await new Promise((resolve) => setTimeout(resolve, 5));
  }
}

export function optionValues(select: HTMLSelectElement): string[] {
  return Array.from(select.options).map((o) => o.value);
}

export function optionTexts(select: HTMLSelectElement): string[] {
  return Array.from(select.options).map((o) =>
    (o.textContent ?? "").replace(/\s+/g, " ").trim(),
  );
}
