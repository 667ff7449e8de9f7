/** The step wizard: server-suggested actions, components and confirmation
 * shots, a manual fallback for anything the analysis never recorded, and
 * the history panel.
 *
 * Two rules hold throughout. Every selectable option comes from the
 * service (the wizard fabricates nothing), and "Add step" stays disabled
 * until a confirmation shot is chosen or the manual form is complete.
 * Mutations update the panel optimistically and roll back on rejection.
 */

import { ApiClient, ApiError, StepPayload } from "./api.js";
import { renderHistory } from "./history.js";
import {
  Candidate,
  ConfirmationShot,
  DraftSummary,
  GRID_CELLS,
  MANUAL_OPTION,
  StepDraft,
} from "./types.js";

function blankStep(): StepDraft {
  return {
    action: null,
    typedText: "",
    candidate: null,
    manual: false,
    manualType: null,
    manualText: "",
    manualLocation: null,
    shotAddress: null,
    notes: "",
  };
}

export class ReportWizard {
  summary: DraftSummary;
  step: StepDraft = blankStep();
  actions: string[] = [];
  candidates: Candidate[] = [];
  shots: ConfirmationShot[] = [];
  vocabulary: string[] = [];

  private readonly root: HTMLElement;
  private readonly api: ApiClient;
  private readonly onFinalized: (reportId: string) => void;

  constructor(
    root: HTMLElement,
    api: ApiClient,
    summary: DraftSummary,
    onFinalized: (reportId: string) => void,
  ) {
    this.root = root;
    this.api = api;
    this.summary = summary;
    this.onFinalized = onFinalized;
  }

  async start(): Promise<void> {
    await this.refreshSuggestions();
    this.render();
  }

  /** The add-step enablement invariant. */
  canAddStep(): boolean {
    if (this.step.action === null) return false;
    if (this.step.action === "type" && this.step.typedText.trim() === "") {
      return false;
    }
    if (this.step.manual) {
      return this.step.manualType !== null && this.step.manualLocation !== null;
    }
    return this.step.candidate !== null && this.step.shotAddress !== null;
  }

  private async refreshSuggestions(): Promise<void> {
    this.actions = await this.api.suggestActions(this.summary.draft_id);
    if (this.step.action === null || !this.actions.includes(this.step.action)) {
      this.step.action = this.actions[0] ?? null;
    }
    this.candidates = this.step.action
      ? await this.api.suggestComponents(this.summary.draft_id, this.step.action)
      : [];
    this.shots = [];
  }

  async chooseAction(kind: string): Promise<void> {
    this.step = { ...blankStep(), action: kind, notes: this.step.notes };
    this.candidates = await this.api.suggestComponents(
      this.summary.draft_id,
      kind,
    );
    this.shots = [];
    this.render();
  }

  async chooseComponent(value: string): Promise<void> {
    this.step.shotAddress = null;
    if (value === MANUAL_OPTION) {
      this.step.manual = true;
      this.step.candidate = null;
      this.shots = [];
      if (this.vocabulary.length === 0) {
        this.vocabulary = await this.api.vocabulary(this.summary.draft_id);
      }
    } else {
      this.step.manual = false;
      this.step.candidate =
        this.candidates.find((c) => c.token === value) ?? null;
      this.shots =
        this.step.candidate && this.step.action
          ? await this.api.suggestShots(
              this.summary.draft_id,
              this.step.action,
              this.step.candidate.token,
            )
          : [];
    }
    this.render();
  }

  chooseShot(address: string): void {
    this.step.shotAddress = address;
    this.render();
  }

  private stepPayload(): StepPayload {
    const action: StepPayload["action"] = { kind: this.step.action! };
    if (this.step.action === "type") action.typed_text = this.step.typedText;
    const component: StepPayload["component"] = this.step.manual
      ? {
          kind: "manual",
          component_type: this.step.manualType!,
          text: this.step.manualText.trim() || null,
          relative_location: this.step.manualLocation!,
        }
      : {
          kind: "resolved",
          token: this.step.candidate!.token,
          shot_address: this.step.shotAddress!,
        };
    const payload: StepPayload = { action, component };
    if (this.step.notes.trim()) payload.notes = this.step.notes.trim();
    return payload;
  }

  async addStep(): Promise<void> {
    if (!this.canAddStep()) return;
    const payload = this.stepPayload();
    const before = this.summary;
    // Optimistic: show the step immediately, withdraw it if rejected.
    this.summary = {
      ...before,
      steps: [
        ...before.steps,
        {
          step_num: before.steps.length + 1,
          action: payload.action,
          component:
            payload.component.kind === "manual"
              ? payload.component
              : {
                  kind: "resolved",
                  activity: this.step.candidate!.component.activity,
                  resource_id: this.step.candidate!.component.resource_id,
                  object_index: this.step.candidate!.component.object_index,
                  shot_address: this.step.shotAddress!,
                },
          activity: this.step.manual
            ? null
            : this.step.candidate!.component.activity,
          notes: payload.notes ?? "",
        },
      ],
    };
    this.render();
    try {
      this.summary = await this.api.addStep(before.draft_id, payload);
    } catch (error) {
      this.summary = before;
      this.render(); // roll back first; the banner lives in the new DOM
      this.showError(error);
      return;
    }
    this.step = blankStep();
    await this.refreshSuggestions();
    this.render();
  }

  async deleteStep(stepNum: number): Promise<void> {
    const before = this.summary;
    this.summary = {
      ...before,
      steps: before.steps
        .filter((s) => s.step_num !== stepNum)
        .map((s, i) => ({ ...s, step_num: i + 1 })),
    };
    this.render();
    try {
      this.summary = await this.api.deleteStep(before.draft_id, stepNum);
    } catch (error) {
      this.summary = before;
      this.render();
      this.showError(error);
      return;
    }
    this.step = blankStep();
    await this.refreshSuggestions();
    this.render();
  }

  async finalize(): Promise<void> {
    try {
      const reportId = await this.api.finalize(this.summary.draft_id);
      this.onFinalized(reportId);
    } catch (error) {
      this.showError(error);
    }
  }

  private showError(error: unknown): void {
    const banner = this.root.querySelector<HTMLElement>("#error-banner");
    if (!banner) return;
    banner.hidden = false;
    banner.textContent =
      error instanceof ApiError
        ? error.errors.map((e) => `${e.field}: ${e.message}`).join("; ") ||
          error.message
        : String(error);
  }

  render(): void {
    this.root.innerHTML = `
      <section id="wizard" aria-label="Report steps">
        <div id="error-banner" role="alert" hidden></div>
        <h2>Step ${this.summary.steps.length + 1}</h2>
        ${this.beliefNote()}
        <div class="builder">
          <p>
            <label for="action-select">Action</label>
            <select id="action-select">${this.actionOptions()}</select>
          </p>
          <p>
            <label for="component-select">Component</label>
            <select id="component-select">${this.componentOptions()}</select>
          </p>
          ${this.cropPreview()}
          ${this.typedTextField()}
          ${this.step.manual ? this.manualForm() : this.shotGrid()}
          <p>
            <label for="step-notes">Notes (optional)</label>
            <input id="step-notes" type="text" value="${escapeAttr(this.step.notes)}">
          </p>
          <button id="add-step" type="button" ${this.canAddStep() ? "" : "disabled"}>
            Add step
          </button>
        </div>
      </section>
      <aside id="history" aria-label="Steps so far">
        <h2>Steps so far</h2>
        <ol id="step-list"></ol>
        <button id="finalize" type="button"
          ${this.summary.steps.length === 0 ? "disabled" : ""}>
          Finalize report
        </button>
      </aside>
    `;
    this.wire();
  }

  private beliefNote(): string {
    if (this.summary.belief.kind === "all_known") {
      return `<p id="belief-note">A manual step was entered, so the lists
        below offer every recorded component.</p>`;
    }
    return "";
  }

  private actionOptions(): string {
    return this.actions
      .map(
        (kind) =>
          `<option value="${escapeAttr(kind)}"
            ${kind === this.step.action ? "selected" : ""}>${escapeHtml(kind)}</option>`,
      )
      .join("");
  }

  private componentOptions(): string {
    const blank = `<option value="" ${this.step.candidate || this.step.manual ? "" : "selected"} disabled>
      Choose a component…</option>`;
    const options = this.candidates.map(
      (candidate) =>
        `<option value="${escapeAttr(candidate.token)}"
          ${this.step.candidate?.token === candidate.token ? "selected" : ""}>
          ${escapeHtml(candidate.label)}</option>`,
    );
    const manual = `<option value="${MANUAL_OPTION}" ${this.step.manual ? "selected" : ""}>
      Not in this list…</option>`;
    return [blank, ...options, manual].join("");
  }

  private cropPreview(): string {
    if (!this.step.candidate) return "";
    return `<p id="crop-preview">
      <img class="crop-image" alt="${escapeAttr(this.step.candidate.label)}"
        src="${escapeAttr(this.api.shotUrl(this.step.candidate.crop_address))}">
    </p>`;
  }

  private typedTextField(): string {
    if (this.step.action !== "type") return "";
    return `<p>
      <label for="typed-text">Text to type</label>
      <input id="typed-text" type="text" value="${escapeAttr(this.step.typedText)}">
    </p>`;
  }

  private shotGrid(): string {
    if (!this.step.candidate) return "";
    const options = this.shots
      .map(
        (shot) => `
        <label class="shot-option">
          <input type="radio" name="shot" value="${escapeAttr(shot.address)}"
            ${this.step.shotAddress === shot.address ? "checked" : ""}>
          <img alt="Screen showing ${escapeAttr(this.step.candidate!.label)}"
            src="${escapeAttr(this.api.shotUrl(shot.address))}">
        </label>`,
      )
      .join("");
    return `<fieldset id="shot-grid">
      <legend>Which screen are you looking at?</legend>
      ${options}
    </fieldset>`;
  }

  private manualForm(): string {
    const types = this.vocabulary
      .map(
        (t) =>
          `<option value="${escapeAttr(t)}"
            ${this.step.manualType === t ? "selected" : ""}>${escapeHtml(t)}</option>`,
      )
      .join("");
    const cells = GRID_CELLS.map(
      (cell) =>
        `<option value="${escapeAttr(cell)}"
          ${this.step.manualLocation === cell ? "selected" : ""}>${escapeHtml(cell)}</option>`,
    ).join("");
    return `<fieldset id="manual-form">
      <legend>Describe the component</legend>
      <p>
        <label for="manual-type">Component type</label>
        <select id="manual-type">
          <option value="" ${this.step.manualType ? "" : "selected"} disabled>Choose a type…</option>
          ${types}
        </select>
      </p>
      <p>
        <label for="manual-text">Visible text (optional)</label>
        <input id="manual-text" type="text" value="${escapeAttr(this.step.manualText)}">
      </p>
      <p>
        <label for="manual-location">Where on the screen?</label>
        <select id="manual-location">
          <option value="" ${this.step.manualLocation ? "" : "selected"} disabled>Choose a location…</option>
          ${cells}
        </select>
      </p>
    </fieldset>`;
  }

  private wire(): void {
    const get = <T extends HTMLElement>(selector: string) =>
      this.root.querySelector<T>(selector);

    get<HTMLSelectElement>("#action-select")?.addEventListener("change", (e) => {
      void this.chooseAction((e.target as HTMLSelectElement).value);
    });
    get<HTMLSelectElement>("#component-select")?.addEventListener("change", (e) => {
      void this.chooseComponent((e.target as HTMLSelectElement).value);
    });
    get<HTMLInputElement>("#typed-text")?.addEventListener("input", (e) => {
      this.step.typedText = (e.target as HTMLInputElement).value;
      this.syncAddButton();
    });
    get<HTMLInputElement>("#step-notes")?.addEventListener("input", (e) => {
      this.step.notes = (e.target as HTMLInputElement).value;
    });
    this.root
      .querySelectorAll<HTMLInputElement>("#shot-grid input[type=radio]")
      .forEach((radio) =>
        radio.addEventListener("change", () => this.chooseShot(radio.value)),
      );
    get<HTMLSelectElement>("#manual-type")?.addEventListener("change", (e) => {
      this.step.manualType = (e.target as HTMLSelectElement).value || null;
      this.syncAddButton();
    });
    get<HTMLInputElement>("#manual-text")?.addEventListener("input", (e) => {
      this.step.manualText = (e.target as HTMLInputElement).value;
    });
    get<HTMLSelectElement>("#manual-location")?.addEventListener("change", (e) => {
      this.step.manualLocation = (e.target as HTMLSelectElement).value || null;
      this.syncAddButton();
    });
    get<HTMLButtonElement>("#add-step")?.addEventListener("click", () => {
      void this.addStep();
    });
    get<HTMLButtonElement>("#finalize")?.addEventListener("click", () => {
      void this.finalize();
    });

    const list = get<HTMLOListElement>("#step-list");
    if (list) {
      renderHistory(list, this.summary.steps, (n) => void this.deleteStep(n));
    }
  }

  private syncAddButton(): void {
    const button = this.root.querySelector<HTMLButtonElement>("#add-step");
    if (button) button.disabled = !this.canAddStep();
  }
}

function escapeHtml(value: string): string {
  return value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;");
}

function escapeAttr(value: string): string {
  return escapeHtml(value).replaceAll('"', "&quot;");
}
