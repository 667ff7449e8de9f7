/** Payload shapes of the report service API, mirrored field-for-field. */

export interface AppRef {
  app_id: string;
  app_version: string;
}

export interface ActionDoc {
  kind: string;
  typed_text?: string;
  swipe_direction?: string;
}

export interface ResolvedComponentDoc {
  kind: "resolved";
  activity: string;
  resource_id: string;
  object_index: number;
  shot_address: string;
}

export interface ManualComponentDoc {
  kind: "manual";
  component_type: string;
  text: string | null;
  relative_location: string;
}

export interface StepDoc {
  step_num: number;
  action: ActionDoc;
  component: ResolvedComponentDoc | ManualComponentDoc;
  activity: string | null;
  notes: string;
}

export interface BeliefDoc {
  kind: "states" | "all_known";
  states?: string[];
}

export interface DraftSummary {
  draft_id: string;
  app_id: string;
  app_version: string;
  reporter_name: string;
  device: string;
  orientation: string;
  title: string;
  description: string;
  steps: StepDoc[];
  belief: BeliefDoc;
  finalized_report_id: string | null;
}

export interface Candidate {
  label: string;
  component_type: string;
  text: string | null;
  relative_location: string;
  token: string;
  component: { activity: string; resource_id: string; object_index: number };
  crop_address: string;
  states: string[];
}

export interface ConfirmationShot {
  state: string;
  address: string;
}

export interface FieldError {
  field: string;
  message: string;
}

/** Header form values; the five preliminary report fields. */
export interface HeaderValues {
  reporter_name: string;
  device: string;
  orientation: "portrait" | "landscape";
  title: string;
  description: string;
}

/** The step under construction, in wizard order. */
export interface StepDraft {
  action: string | null;
  typedText: string;
  candidate: Candidate | null;
  manual: boolean;
  manualType: string | null;
  manualText: string;
  manualLocation: string | null;
  shotAddress: string | null;
  notes: string;
}

export const GRID_CELLS: readonly string[] = [
  "Top Left", "Top Center", "Top Right",
  "Middle Left", "Middle Center", "Middle Right",
  "Bottom Left", "Bottom Center", "Bottom Right",
];

export const MANUAL_OPTION = "__manual__";
