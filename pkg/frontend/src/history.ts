/** History panel: the steps entered so far, each viewable and deletable. */

import type { StepDoc } from "./types.js";

export function stepLabel(step: StepDoc): string {
  const action =
    step.action.kind === "type"
      ? `type "${step.action.typed_text ?? ""}" into`
      : step.action.kind;
  if (step.component.kind === "resolved") {
    const where = step.activity ? ` on ${step.activity}` : "";
    return `${action} ${step.component.resource_id}${where}`;
  }
  const text = step.component.text ? ` "${step.component.text}"` : "";
  return (
    `${action} ${step.component.component_type}${text} ` +
    `(${step.component.relative_location}, entered manually)`
  );
}

export function renderHistory(
  list: HTMLOListElement,
  steps: StepDoc[],
  onDelete: (stepNum: number) => void,
): void {
  list.textContent = "";
  for (const step of steps) {
    const item = document.createElement("li");
    item.className = "step-entry";
    item.dataset.step = String(step.step_num);

    const label = document.createElement("span");
    label.className = "step-label";
    label.textContent = `${step.step_num}. ${stepLabel(step)}`;
    item.append(label);

    if (step.notes) {
      const notes = document.createElement("span");
      notes.className = "step-notes";
      notes.textContent = step.notes;
      item.append(notes);
    }

    const remove = document.createElement("button");
    remove.type = "button";
    remove.className = "delete-step";
    remove.textContent = "Delete";
    remove.setAttribute("aria-label", `Delete step ${step.step_num}`);
    remove.addEventListener("click", () => onDelete(step.step_num));
    item.append(remove);

    list.append(item);
  }
}
