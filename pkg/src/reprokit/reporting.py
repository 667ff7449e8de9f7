"""Finalized bug reports: assembly, rendering, replayability, replay.

A finalized report carries, per step: the action, the component's type,
text and relative location, the owning activity with its source-unit
references, and the component crop image; plus one confirmed full-screen
shot per resolved step for the closing gallery.  Manual steps keep their
entered description and contribute no images.

A report is replayable when every step is a confirmed suggestion and the
steps chain through recorded transitions starting at the cold-start state.
Such a chain compiles to a script whose execution on a driver either ends
on the expected screen (success) or pinpoints the first step that went
elsewhere (divergence).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from html import escape

from .errors import (
    DraftValidationError,
    NotReplayableError,
    StaleSuggestionError,
    UnknownFormatError,
)
from .model import (
    Action,
    ComponentKey,
    EventFlowGraph,
    GridCell,
    ScreenState,
    StateFingerprint,
    canonical_json_bytes,
)
from .primer import StaticAppModel
from .screenshots import augment, content_address, crop, render_screen
from .suggestion import ManualComponent, ReportDraft, ResolvedComponent

REPORT_FORMAT = "bug-report v1"
RENDER_FORMATS = ("structured", "web-page")


@dataclass(frozen=True)
class ReportStep:
    step_num: int
    kind: str  # "resolved" or "manual"
    action: Action
    component_type: str
    text: str | None
    relative_location: GridCell
    activity_name: str
    source_units: tuple[str, ...]
    component_key: ComponentKey | None
    crop_address: str | None
    confirm_address: str | None
    notes: str

    def to_doc(self) -> dict:
        return {
            "step_num": self.step_num,
            "kind": self.kind,
            "action": self.action.to_doc(),
            "component_type": self.component_type,
            "text": self.text,
            "relative_location": str(self.relative_location),
            "activity": self.activity_name,
            "source_units": list(self.source_units),
            "component": (
                self.component_key.to_doc() if self.component_key else None
            ),
            "crop_address": self.crop_address,
            "confirm_address": self.confirm_address,
            "notes": self.notes,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ReportStep":
        return cls(
            step_num=int(doc["step_num"]),
            kind=doc["kind"],
            action=Action.from_doc(doc["action"]),
            component_type=doc["component_type"],
            text=doc["text"],
            relative_location=GridCell.parse(doc["relative_location"]),
            activity_name=doc["activity"],
            source_units=tuple(doc["source_units"]),
            component_key=(
                ComponentKey.from_doc(doc["component"]) if doc["component"] else None
            ),
            crop_address=doc["crop_address"],
            confirm_address=doc["confirm_address"],
            notes=doc["notes"],
        )


@dataclass(frozen=True)
class BugReport:
    report_id: str
    app_id: str
    app_version: str
    title: str
    reporter_name: str
    device: str
    orientation: str
    description: str
    steps: tuple[ReportStep, ...]
    full_shots: tuple[str, ...]
    created_at: str  # UTC, second precision, e.g. 2026-08-14T09:30:00Z

    def to_doc(self) -> dict:
        return {
            "format": REPORT_FORMAT,
            "report_id": self.report_id,
            "app_id": self.app_id,
            "app_version": self.app_version,
            "header": {
                "title": self.title,
                "reporter_name": self.reporter_name,
                "device": self.device,
                "orientation": self.orientation,
                "description": self.description,
            },
            "steps": [s.to_doc() for s in self.steps],
            "full_shots": list(self.full_shots),
            "created_at": self.created_at,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "BugReport":
        if doc.get("format") != REPORT_FORMAT:
            raise ValueError(f"unsupported report format: {doc.get('format')!r}")
        header = doc["header"]
        return cls(
            report_id=doc["report_id"],
            app_id=doc["app_id"],
            app_version=doc["app_version"],
            title=header["title"],
            reporter_name=header["reporter_name"],
            device=header["device"],
            orientation=header["orientation"],
            description=header["description"],
            steps=tuple(ReportStep.from_doc(s) for s in doc["steps"]),
            full_shots=tuple(doc["full_shots"]),
            created_at=doc["created_at"],
        )


def _resolve_confirmed_state(
    graph: EventFlowGraph, key: ComponentKey, shot_address: str
) -> ScreenState:
    """Find the state whose augmented render produced the confirmed shot."""
    for state in graph.states:
        comp = state.component(key)
        if comp is None:
            continue
        if content_address(augment(render_screen(state), comp)) == shot_address:
            return state
    raise StaleSuggestionError(
        f"confirmed shot {shot_address[:12]} matches no state offering {key}"
    )


def finalize(
    draft: ReportDraft,
    graph: EventFlowGraph,
    static_model: StaticAppModel,
    report_id: str,
    now: datetime | None = None,
) -> BugReport:
    """Snapshot a draft into an immutable report under the given id."""
    errors = []
    if not draft.title.strip():
        errors.append(("title", "must not be empty"))
    if not draft.steps:
        errors.append(("steps", "a report needs at least one step"))
    if errors:
        raise DraftValidationError(errors)

    steps = []
    full_shots = []
    for step in draft.steps:
        if isinstance(step.component, ResolvedComponent):
            key = step.component.component_key
            state = _resolve_confirmed_state(graph, key, step.component.shot_address)
            descriptor = state.component(key)
            static_comp = static_model.component(key)
            steps.append(
                ReportStep(
                    step_num=step.step_num,
                    kind="resolved",
                    action=step.action,
                    component_type=descriptor.component_type,
                    text=descriptor.text,
                    relative_location=descriptor.relative_location,
                    activity_name=state.activity_name,
                    source_units=(
                        static_comp.source_units if static_comp else ()
                    ),
                    component_key=key,
                    crop_address=content_address(
                        crop(render_screen(state), descriptor)
                    ),
                    confirm_address=step.component.shot_address,
                    notes=step.notes,
                )
            )
            full_shots.append(step.component.shot_address)
        else:
            manual: ManualComponent = step.component
            steps.append(
                ReportStep(
                    step_num=step.step_num,
                    kind="manual",
                    action=step.action,
                    component_type=manual.component_type,
                    text=manual.text,
                    relative_location=manual.relative_location,
                    activity_name="",
                    source_units=(),
                    component_key=None,
                    crop_address=None,
                    confirm_address=None,
                    notes=step.notes,
                )
            )

    stamp = (now or datetime.now(timezone.utc)).strftime("%Y-%m-%dT%H:%M:%SZ")
    return BugReport(
        report_id=report_id,
        app_id=draft.app_id,
        app_version=draft.app_version,
        title=draft.title,
        reporter_name=draft.reporter_name,
        device=draft.device,
        orientation=draft.orientation,
        description=draft.description,
        steps=tuple(steps),
        full_shots=tuple(full_shots),
        created_at=stamp,
    )


def render(report: BugReport, format: str) -> bytes:
    if format == "structured":
        return canonical_json_bytes(report.to_doc())
    if format == "web-page":
        return _render_web_page(report)
    raise UnknownFormatError(
        f"unknown render format {format!r}; expected one of {RENDER_FORMATS}"
    )


def parse_structured(data: bytes) -> BugReport:
    return BugReport.from_doc(json.loads(data.decode("utf-8")))


def _shot_src(address: str) -> str:
    # Pages sit next to a sibling shots/ directory, both in the store
    # layout and under the HTTP API (/api/reports/<id> vs /api/shots/<a>).
    return f"../shots/{address}.svg"


def _describe_component(step: ReportStep) -> str:
    if step.text is None:
        return step.component_type
    return f'{step.component_type} "{step.text}"'


_PAGE_STYLE = """
body { font-family: sans-serif; margin: 2rem auto; max-width: 60rem; color: #1c2026; }
section { margin-bottom: 2.5rem; }
dl { display: grid; grid-template-columns: 10rem 1fr; gap: 0.25rem 1rem; }
dt { font-weight: bold; }
li.step { margin-bottom: 1.5rem; }
img { max-width: 14rem; border: 1px solid #c8ccd4; }
figure { display: inline-block; margin: 0 1rem 1rem 0; text-align: center; }
.manual { font-style: italic; }
""".strip()


def _render_web_page(report: BugReport) -> bytes:
    e = escape
    out = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8"/>',
        f"<title>{e(report.report_id)}: {e(report.title)}</title>",
        f"<style>{_PAGE_STYLE}</style>",
        "</head>",
        "<body>",
        '<article class="bug-report">',
        # Section 1: preliminary information.
        '<section id="preliminary">',
        f"<h1>{e(report.title)}</h1>",
        f'<p class="report-id">Report <strong>{e(report.report_id)}</strong>'
        f" &#183; created {e(report.created_at)}</p>",
        "<dl>",
        f"<dt>Application</dt><dd>{e(report.app_id)} {e(report.app_version)}</dd>",
        f"<dt>Reporter</dt><dd>{e(report.reporter_name)}</dd>",
        f"<dt>Device</dt><dd>{e(report.device)}</dd>",
        f"<dt>Orientation</dt><dd>{e(report.orientation)}</dd>",
        f"<dt>Description</dt><dd>{e(report.description)}</dd>",
        "</dl>",
        "</section>",
        # Section 2: the reproduction steps with their five fields.
        '<section id="steps">',
        "<h2>Reproduction Steps</h2>",
        '<ol class="steps">',
    ]
    for step in report.steps:
        out.append('<li class="step">')
        out.append("<dl>")
        out.append(
            f'<dt>Action</dt><dd class="field-action">{e(step.action.describe())}</dd>'
        )
        out.append(
            f'<dt>Component</dt><dd class="field-component">'
            f"{e(_describe_component(step))}</dd>"
        )
        out.append(
            f'<dt>Location</dt><dd class="field-location">'
            f"{e(str(step.relative_location))}</dd>"
        )
        if step.kind == "resolved":
            sources = (
                " (" + ", ".join(e(u) for u in step.source_units) + ")"
                if step.source_units
                else ""
            )
            out.append(
                f'<dt>Activity</dt><dd class="field-activity">'
                f"{e(step.activity_name)}{sources}</dd>"
            )
            out.append(
                f'<dt>Image</dt><dd class="field-image">'
                f'<img src="{e(_shot_src(step.crop_address))}" '
                f'alt="Component image for step {step.step_num}"/></dd>'
            )
        else:
            out.append(
                '<dt>Activity</dt><dd class="field-activity">'
                '<span class="manual">not recorded (manual entry)</span></dd>'
            )
            out.append(
                f'<dt>Image</dt><dd class="field-image">'
                f'<span class="manual">entered manually: '
                f"{e(_describe_component(step))} at "
                f"{e(str(step.relative_location))}</span></dd>"
            )
        out.append("</dl>")
        if step.notes:
            out.append(f'<p class="notes">{e(step.notes)}</p>')
        out.append("</li>")
    out.extend(
        [
            "</ol>",
            "</section>",
            # Section 3: the full-screenshot gallery, one entry per step.
            '<section id="screenshots">',
            "<h2>Full Screenshots</h2>",
        ]
    )
    resolved = [s for s in report.steps if s.kind == "resolved"]
    for step, address in zip(resolved, report.full_shots):
        out.append("<figure>")
        out.append(
            f'<img src="{e(_shot_src(address))}" '
            f'alt="Full screen for step {step.step_num}"/>'
        )
        out.append(f"<figcaption>Step {step.step_num}</figcaption>")
        out.append("</figure>")
    out.extend(["</section>", "</article>", "</body>", "</html>"])
    return ("\n".join(out) + "\n").encode("utf-8")


# -- replay ---------------------------------------------------------------


@dataclass(frozen=True)
class ScriptEntry:
    action: Action
    component_key: ComponentKey
    expected_to: StateFingerprint


@dataclass(frozen=True)
class ReplayScript:
    app_id: str
    app_version: str
    entries: tuple[ScriptEntry, ...]
    expected_final: StateFingerprint


@dataclass(frozen=True)
class ReplayOutcome:
    status: str  # success | divergence | driver_failure
    step_num: int | None = None
    expected: StateFingerprint | None = None
    observed: StateFingerprint | None = None

    @classmethod
    def success(cls) -> "ReplayOutcome":
        return cls("success")

    @classmethod
    def divergence(cls, step_num, expected, observed) -> "ReplayOutcome":
        return cls("divergence", step_num, expected, observed)

    @classmethod
    def driver_failure(cls, step_num) -> "ReplayOutcome":
        return cls("driver_failure", step_num)


def _chain(report: BugReport, graph: EventFlowGraph) -> list[ScriptEntry] | None:
    """Follow recorded transitions step by step; None when the chain breaks."""
    entries = []
    current = graph.main_state
    for step in report.steps:
        if step.kind != "resolved":
            return None
        match = next(
            (
                t
                for t in graph.outgoing.get(current, ())
                if t.component_key == step.component_key
                and t.action.kind == step.action.kind
            ),
            None,
        )
        if match is None:
            return None
        entries.append(ScriptEntry(step.action, step.component_key, match.to_state))
        current = match.to_state
    return entries


def is_replayable(report: BugReport, graph: EventFlowGraph) -> bool:
    """True iff every step is confirmed and chains through recorded
    transitions from the cold-start state."""
    return _chain(report, graph) is not None


def to_script(report: BugReport, graph: EventFlowGraph) -> ReplayScript:
    entries = _chain(report, graph)
    if entries is None:
        raise NotReplayableError(
            f"report {report.report_id} does not chain through recorded "
            f"transitions (manual step or model gap)"
        )
    final = entries[-1].expected_to if entries else graph.main_state
    return ReplayScript(
        app_id=report.app_id,
        app_version=report.app_version,
        entries=tuple(entries),
        expected_final=final,
    )


def replay(script: ReplayScript, driver) -> ReplayOutcome:
    """Execute the script cold; all errors are folded into the outcome."""
    from .errors import DriverError  # local to keep the import graph flat
    from .simulator import APP_EXITED, OUT_EXTERNAL

    def observed_or_none() -> StateFingerprint | None:
        try:
            return driver.current_screen().fingerprint
        except Exception:
            return None

    try:
        driver.launch_app(cold=True)
        observed = driver.current_screen().fingerprint
    except Exception:
        return ReplayOutcome.driver_failure(0)

    for step_num, entry in enumerate(script.entries, start=1):
        try:
            outcome = driver.perform(entry.action, entry.component_key)
        except DriverError:
            # The expected component is not there: the app diverged.
            return ReplayOutcome.divergence(
                step_num, entry.expected_to, observed_or_none()
            )
        except Exception:
            return ReplayOutcome.driver_failure(step_num)
        try:
            if outcome.kind == OUT_EXTERNAL:
                driver.press_back()
            elif outcome.kind == APP_EXITED:
                driver.launch_app(cold=True)
            observed = driver.current_screen().fingerprint
        except DriverError:
            return ReplayOutcome.divergence(step_num, entry.expected_to, None)
        except Exception:
            return ReplayOutcome.driver_failure(step_num)
        if observed != entry.expected_to:
            return ReplayOutcome.divergence(step_num, entry.expected_to, observed)

    if observed != script.expected_final:
        return ReplayOutcome.divergence(
            len(script.entries), script.expected_final, observed
        )
    return ReplayOutcome.success()
