/** Typed client for the report service; every request body is validated
 * server-side, so this layer only shapes requests and surfaces errors. */

import type {
  ActionDoc,
  AppRef,
  Candidate,
  ConfirmationShot,
  DraftSummary,
  FieldError,
  HeaderValues,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly errors: FieldError[];

  constructor(status: number, detail: string, errors: FieldError[] = []) {
    super(detail);
    this.status = status;
    this.errors = errors;
  }

  /** The message to surface next to a specific form field, if any. */
  forField(field: string): string | null {
    const hit = this.errors.find((e) => e.field === field);
    return hit ? hit.message : null;
  }
}

export type StepPayload = {
  action: ActionDoc;
  component:
    | { kind: "resolved"; token: string; shot_address: string }
    | {
        kind: "manual";
        component_type: string;
        text: string | null;
        relative_location: string;
      };
  notes?: string;
};

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function freshKey(): string {
  // Idempotency keys only need to be unique per draft mutation attempt.
  return `ui-${Date.now().toString(36)}-${Math.random().toString(36).slice(2, 10)}`;
}

export class ApiClient {
  readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn?: FetchLike) {
    this.base = base.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  shotUrl(address: string): string {
    return `${this.base}/api/shots/${address}.svg`;
  }

  reportPageUrl(reportId: string): string {
    return `${this.base}/api/reports/${reportId}?format=web-page`;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    idempotent = false,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (idempotent) headers["Idempotency-Key"] = freshKey();
    const response = await this.fetchFn(`${this.base}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const doc = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(
        response.status,
        typeof doc.detail === "string" ? doc.detail : `HTTP ${response.status}`,
        Array.isArray(doc.errors) ? doc.errors : [],
      );
    }
    return doc as T;
  }

  async listApps(): Promise<AppRef[]> {
    const doc = await this.request<{ apps: AppRef[] }>("GET", "/api/apps");
    return doc.apps;
  }

  createDraft(app: AppRef, header: HeaderValues): Promise<DraftSummary> {
    return this.request("POST", "/api/reports", { ...app, ...header });
  }

  getDraft(draftId: string): Promise<DraftSummary> {
    return this.request("GET", `/api/reports/${draftId}`);
  }

  async suggestActions(draftId: string): Promise<string[]> {
    const doc = await this.request<{ actions: string[] }>(
      "GET",
      `/api/reports/${draftId}/suggest?kind=actions`,
    );
    return doc.actions;
  }

  async suggestComponents(draftId: string, action: string): Promise<Candidate[]> {
    const doc = await this.request<{ components: Candidate[] }>(
      "GET",
      `/api/reports/${draftId}/suggest?kind=components&action=${encodeURIComponent(action)}`,
    );
    return doc.components;
  }

  async suggestShots(
    draftId: string,
    action: string,
    token: string,
  ): Promise<ConfirmationShot[]> {
    const doc = await this.request<{ shots: ConfirmationShot[] }>(
      "GET",
      `/api/reports/${draftId}/suggest?kind=shots` +
        `&action=${encodeURIComponent(action)}&component=${encodeURIComponent(token)}`,
    );
    return doc.shots;
  }

  async vocabulary(draftId: string): Promise<string[]> {
    const doc = await this.request<{ types: string[] }>(
      "GET",
      `/api/reports/${draftId}/suggest?kind=vocabulary`,
    );
    return doc.types;
  }

  addStep(draftId: string, step: StepPayload): Promise<DraftSummary> {
    return this.request("POST", `/api/reports/${draftId}/steps`, step, true);
  }

  deleteStep(draftId: string, stepNum: number): Promise<DraftSummary> {
    return this.request(
      "DELETE",
      `/api/reports/${draftId}/steps/${stepNum}`,
      undefined,
      true,
    );
  }

  async finalize(draftId: string): Promise<string> {
    const doc = await this.request<{ report_id: string }>(
      "POST",
      `/api/reports/${draftId}/finalize`,
      undefined,
      true,
    );
    return doc.report_id;
  }

  reportWebPage(reportId: string): Promise<string> {
    return this.fetchFn(this.reportPageUrl(reportId)).then((response) => {
      if (!response.ok) throw new ApiError(response.status, `HTTP ${response.status}`);
      return response.text();
    });
  }
}
