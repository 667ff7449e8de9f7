/** App shell: header form, then the step wizard, then the report view. */

import { ApiClient, ApiError } from "./api.js";
import { renderReport } from "./report.js";
import { AppRef, DraftSummary, HeaderValues } from "./types.js";
import { ReportWizard } from "./wizard.js";

const HEADER_FIELDS: Array<{
  id: keyof HeaderValues;
  label: string;
  required: boolean;
}> = [
  { id: "reporter_name", label: "Your name", required: true },
  { id: "device", label: "Device", required: true },
  { id: "orientation", label: "Orientation", required: true },
  { id: "title", label: "Title", required: true },
  { id: "description", label: "What went wrong?", required: false },
];

export function renderHeaderForm(
  root: HTMLElement,
  apps: AppRef[],
  onSubmit: (app: AppRef, header: HeaderValues) => void,
): void {
  const fields = HEADER_FIELDS.map(({ id, label, required }) => {
    const control =
      id === "orientation"
        ? `<select id="f-${id}" name="${id}">
            <option value="portrait" selected>portrait</option>
            <option value="landscape">landscape</option>
          </select>`
        : id === "description"
          ? `<textarea id="f-${id}" name="${id}" rows="3"></textarea>`
          : `<input id="f-${id}" name="${id}" type="text">`;
    return `<p>
      <label for="f-${id}">${label}${required ? "" : " (optional)"}</label>
      ${control}
      <span class="field-error" data-field="${id}" role="alert" hidden></span>
    </p>`;
  }).join("");

  const appOptions = apps
    .map(
      (app, i) =>
        `<option value="${i}">${app.app_id} ${app.app_version}</option>`,
    )
    .join("");

  root.innerHTML = `
    <section id="header-screen" aria-label="New report">
      <h2>New bug report</h2>
      <form id="header-form" novalidate>
        <p>
          <label for="f-app">App</label>
          <select id="f-app" name="app">${appOptions}</select>
        </p>
        ${fields}
        <button id="create-draft" type="submit">Start reporting</button>
      </form>
    </section>
  `;

  const form = root.querySelector<HTMLFormElement>("#header-form")!;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const value = (id: string) =>
      root.querySelector<HTMLInputElement | HTMLSelectElement | HTMLTextAreaElement>(
        `#f-${id}`,
      )!.value;
    const header: HeaderValues = {
      reporter_name: value("reporter_name").trim(),
      device: value("device").trim(),
      orientation: value("orientation") as HeaderValues["orientation"],
      title: value("title").trim(),
      description: value("description").trim(),
    };
    let valid = true;
    for (const { id, required } of HEADER_FIELDS) {
      const error = root.querySelector<HTMLElement>(
        `.field-error[data-field="${id}"]`,
      )!;
      if (required && header[id] === "") {
        error.textContent = "required";
        error.hidden = false;
        valid = false;
      } else {
        error.hidden = true;
      }
    }
    if (!valid) return; // no request leaves the browser
    const app = apps[Number(value("app"))];
    if (app) onSubmit(app, header);
  });
}

export function showHeaderErrors(root: HTMLElement, error: ApiError): void {
  for (const fieldError of error.errors) {
    const slot = root.querySelector<HTMLElement>(
      `.field-error[data-field="${fieldError.field}"]`,
    );
    if (slot) {
      slot.textContent = fieldError.message;
      slot.hidden = false;
    }
  }
}

export async function boot(root: HTMLElement, api: ApiClient): Promise<void> {
  const onFinalized = (reportId: string) => {
    void renderReport(root, api, reportId);
  };
  const startWizard = async (summary: DraftSummary) => {
    const wizard = new ReportWizard(root, api, summary, onFinalized);
    await wizard.start();
  };

  const apps = await api.listApps();
  if (apps.length === 0) {
    root.innerHTML = `<p role="alert">No analyzed apps in the store yet.
      Run <code>reprokit analyze &lt;bundle&gt;</code> first.</p>`;
    return;
  }
  renderHeaderForm(root, apps, (app, header) => {
    api
      .createDraft(app, header)
      .then(startWizard)
      .catch((error) => {
        if (error instanceof ApiError) showHeaderErrors(root, error);
        else throw error;
      });
  });
}

declare global {
  interface Window {
    REPROKIT_API_BASE?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const base = window.REPROKIT_API_BASE ?? "";
  void boot(document.getElementById("app")!, new ApiClient(base));
}
