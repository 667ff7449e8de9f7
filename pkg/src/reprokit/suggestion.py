"""Step-wise auto-completion of reproduction steps.

The engine tracks a belief state: the set of event-flow states the reporter
could currently be in, given the steps confirmed so far.  A fresh draft
starts at the cold-start state (the first step always happens on the screen
shown right after launch).  Confirming a step moves the belief through the
graph; a step the model cannot place (the manual "Not in this list" path, or
a confirmed component with no recorded transition successor) widens the
belief, in the worst case to every known screen.

Suggestions are drawn from the candidate states plus every state one
recorded transition away, so a reporter who stayed on the same screen and
one who followed a known transition both find their component.  Lists are
deterministic: states in discovery order, components in document order,
deduplicated by component key.  Same-looking components (equal type and
text) get an "Option N" suffix so every label in a list is unique.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from .errors import (
    DraftValidationError,
    NotFoundError,
    SequencingError,
    StaleSuggestionError,
)
from .model import (
    ACTION_KINDS,
    Action,
    ComponentDescriptor,
    ComponentKey,
    EventFlowGraph,
    GridCell,
    ScreenState,
    StateFingerprint,
)
from .primer import StaticAppModel, component_types
from .screenshots import augment, content_address, crop, render_screen

ORIENTATIONS = ("portrait", "landscape")


@dataclass(frozen=True)
class BeliefState:
    """Candidate fingerprints, or every known screen when all_known is set."""

    all_known: bool
    candidates: frozenset[StateFingerprint]

    @classmethod
    def of(cls, fingerprints) -> "BeliefState":
        return cls(all_known=False, candidates=frozenset(fingerprints))

    def to_doc(self) -> dict:
        if self.all_known:
            return {"kind": "all_known"}
        return {
            "kind": "states",
            "states": sorted(fp.digest for fp in self.candidates),
        }


ALL_KNOWN = BeliefState(all_known=True, candidates=frozenset())


@dataclass(frozen=True)
class ResolvedComponent:
    """A suggestion the reporter confirmed with a specific screenshot."""

    component_key: ComponentKey
    shot_address: str


@dataclass(frozen=True)
class ManualComponent:
    """The fallback description entered when the model has a gap."""

    component_type: str
    text: str | None
    relative_location: GridCell


StepComponent = Union[ResolvedComponent, ManualComponent]


@dataclass(frozen=True)
class ReproStep:
    step_num: int
    action: Action
    component: StepComponent
    activity_name: str = ""
    notes: str = ""

    def to_doc(self) -> dict:
        if isinstance(self.component, ResolvedComponent):
            component_doc = {
                "kind": "resolved",
                **self.component.component_key.to_doc(),
                "shot_address": self.component.shot_address,
            }
        else:
            component_doc = {
                "kind": "manual",
                "component_type": self.component.component_type,
                "text": self.component.text,
                "relative_location": str(self.component.relative_location),
            }
        return {
            "step_num": self.step_num,
            "action": self.action.to_doc(),
            "component": component_doc,
            "activity": self.activity_name,
            "notes": self.notes,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ReproStep":
        comp_doc = doc["component"]
        component: StepComponent
        if comp_doc["kind"] == "resolved":
            component = ResolvedComponent(
                component_key=ComponentKey.from_doc(comp_doc),
                shot_address=comp_doc["shot_address"],
            )
        elif comp_doc["kind"] == "manual":
            component = ManualComponent(
                component_type=comp_doc["component_type"],
                text=comp_doc.get("text"),
                relative_location=GridCell.parse(comp_doc["relative_location"]),
            )
        else:
            raise ValueError(f"unknown step component kind {comp_doc['kind']!r}")
        return cls(
            step_num=int(doc["step_num"]),
            action=Action.from_doc(doc["action"]),
            component=component,
            activity_name=doc.get("activity", ""),
            notes=doc.get("notes", ""),
        )


@dataclass(frozen=True)
class ReportDraft:
    draft_id: str
    app_id: str
    app_version: str
    reporter_name: str
    device: str
    orientation: str
    title: str
    description: str
    steps: tuple[ReproStep, ...]
    belief: BeliefState

    def to_doc(self) -> dict:
        # The belief is never persisted; it folds back out of the steps.
        return {
            "draft_id": self.draft_id,
            "app_id": self.app_id,
            "app_version": self.app_version,
            "reporter_name": self.reporter_name,
            "device": self.device,
            "orientation": self.orientation,
            "title": self.title,
            "description": self.description,
            "steps": [s.to_doc() for s in self.steps],
        }

    @classmethod
    def from_doc(cls, doc: dict, graph: EventFlowGraph) -> "ReportDraft":
        steps = tuple(ReproStep.from_doc(s) for s in doc["steps"])
        return cls(
            draft_id=doc["draft_id"],
            app_id=doc["app_id"],
            app_version=doc["app_version"],
            reporter_name=doc["reporter_name"],
            device=doc["device"],
            orientation=doc["orientation"],
            title=doc["title"],
            description=doc["description"],
            steps=steps,
            belief=compute_belief(graph, steps),
        )


@dataclass(frozen=True)
class CandidateComponent:
    descriptor: ComponentDescriptor
    label: str
    crop_address: str
    states: tuple[StateFingerprint, ...]  # candidate states offering it

    @property
    def component_key(self) -> ComponentKey:
        return self.descriptor.component_key


@dataclass(frozen=True)
class ConfirmationShot:
    """One full-screen augmented render the reporter can confirm."""

    state: StateFingerprint
    address: str
    data: bytes


def new_draft(
    draft_id: str,
    graph: EventFlowGraph,
    reporter_name: str,
    device: str,
    orientation: str,
    title: str,
    description: str = "",
) -> ReportDraft:
    """Validate the header fields and open an empty draft at cold start."""
    errors = []
    if not reporter_name.strip():
        errors.append(("reporter_name", "must not be empty"))
    if not device.strip():
        errors.append(("device", "must not be empty"))
    if orientation not in ORIENTATIONS:
        errors.append(("orientation", f"must be one of {', '.join(ORIENTATIONS)}"))
    if not title.strip():
        errors.append(("title", "must not be empty"))
    if errors:
        raise DraftValidationError(errors)
    return ReportDraft(
        draft_id=draft_id,
        app_id=graph.app_id,
        app_version=graph.app_version,
        reporter_name=reporter_name,
        device=device,
        orientation=orientation,
        title=title,
        description=description,
        steps=(),
        belief=initial_belief(graph),
    )


def initial_belief(graph: EventFlowGraph) -> BeliefState:
    """Cold start: the first step happens on the screen shown after launch."""
    if not graph.states:
        raise ValueError("event-flow graph has no states")
    return BeliefState.of({graph.main_state})


def _pool(graph: EventFlowGraph, belief: BeliefState) -> list[ScreenState]:
    """Candidate states plus one-transition successors, in discovery order."""
    if belief.all_known:
        return list(graph.states)
    reachable = set(belief.candidates)
    for fp in belief.candidates:
        for transition in graph.outgoing.get(fp, ()):
            reachable.add(transition.to_state)
    return [s for s in graph.states if s.fingerprint in reachable]


def suggest_actions(graph: EventFlowGraph, belief: BeliefState) -> list[str]:
    """Action kinds available on the candidate states, in canonical order."""
    if belief.all_known:
        return list(ACTION_KINDS)
    available: set[str] = set()
    for state in graph.states:
        if state.fingerprint in belief.candidates:
            for comp in state.components:
                available.update(comp.supported_actions)
    return [kind for kind in ACTION_KINDS if kind in available]


def _shot_label(descriptor: ComponentDescriptor) -> str:
    location = str(descriptor.relative_location)
    if descriptor.text is None:
        return f"{descriptor.component_type} ({location})"
    return f'{descriptor.component_type} "{descriptor.text}" ({location})'


def suggest_components(
    graph: EventFlowGraph, belief: BeliefState, action_kind: str
) -> list[CandidateComponent]:
    """Components supporting the action, drawn from the candidate pool."""
    if action_kind not in ACTION_KINDS:
        raise ValueError(f"unknown action kind {action_kind!r}")
    picked: dict[ComponentKey, tuple[ComponentDescriptor, ScreenState]] = {}
    offering: dict[ComponentKey, list[StateFingerprint]] = {}
    for state in _pool(graph, belief):
        for comp in state.components:
            if action_kind not in comp.supported_actions:
                continue
            key = comp.component_key
            if key not in picked:
                picked[key] = (comp, state)
                offering[key] = []
            offering[key].append(state.fingerprint)

    # "Option N" suffixes disambiguate same-looking entries across the list.
    group_sizes: dict[tuple[str, str | None], int] = {}
    for comp, _ in picked.values():
        group = (comp.component_type, comp.text)
        group_sizes[group] = group_sizes.get(group, 0) + 1
    group_seen: dict[tuple[str, str | None], int] = {}

    out = []
    for key, (comp, state) in picked.items():
        label = _shot_label(comp)
        group = (comp.component_type, comp.text)
        if group_sizes[group] > 1:
            group_seen[group] = group_seen.get(group, 0) + 1
            label = f"{label}, Option {group_seen[group]}"
        crop_address = content_address(crop(render_screen(state), comp))
        out.append(
            CandidateComponent(
                descriptor=comp,
                label=label,
                crop_address=crop_address,
                states=tuple(offering[key]),
            )
        )
    return out


def candidate_screenshots(
    graph: EventFlowGraph,
    belief: BeliefState,
    action_kind: str,
    component_key: ComponentKey,
) -> list[ConfirmationShot]:
    """One augmented full-screen shot per candidate state showing the component."""
    shots = []
    for state in _pool(graph, belief):
        comp = state.component(component_key)
        if comp is None or action_kind not in comp.supported_actions:
            continue
        data = augment(render_screen(state), comp)
        shots.append(
            ConfirmationShot(
                state=state.fingerprint,
                address=content_address(data),
                data=data,
            )
        )
    if not shots:
        raise StaleSuggestionError(
            f"component {component_key} is not offered in the current state"
        )
    return shots


def _apply_step(
    graph: EventFlowGraph, belief: BeliefState, step: ReproStep, strict: bool
) -> tuple[ReproStep, BeliefState]:
    """One belief update.  strict=False keeps folding over steps whose
    confirmation no longer resolves (after deletions), widening to ALL_KNOWN
    instead of failing."""
    if isinstance(step.component, ManualComponent):
        if not step.component.component_type.strip():
            raise DraftValidationError(
                [("component_type", "manual entry needs a component type")]
            )
        return step, ALL_KNOWN

    key = step.component.component_key
    confirmed: ScreenState | None = None
    for state in _pool(graph, belief):
        comp = state.component(key)
        if comp is None or step.action.kind not in comp.supported_actions:
            continue
        data = augment(render_screen(state), comp)
        if content_address(data) == step.component.shot_address:
            confirmed = state
            break
    if confirmed is None:
        if strict:
            raise StaleSuggestionError(
                f"screenshot {step.component.shot_address[:12]} does not match "
                f"any current candidate state for {key}"
            )
        return step, ALL_KNOWN

    to_states = {
        t.to_state
        for t in graph.outgoing.get(confirmed.fingerprint, ())
        if t.component_key == key and t.action.kind == step.action.kind
    }
    # No recorded transition (e.g. a typed step the click-only rip never
    # fired): assume the screen held rather than losing the position.
    candidates = to_states or {confirmed.fingerprint}
    new_belief = BeliefState.of(candidates) if candidates else ALL_KNOWN
    return replace(step, activity_name=confirmed.activity_name), new_belief


def record_step(
    graph: EventFlowGraph, draft: ReportDraft, step: ReproStep
) -> ReportDraft:
    """Append a step and move the belief through the graph."""
    expected = len(draft.steps) + 1
    if step.step_num != expected:
        raise SequencingError(
            f"expected step {expected}, got step {step.step_num}"
        )
    normalized, belief = _apply_step(graph, draft.belief, step, strict=True)
    return replace(draft, steps=draft.steps + (normalized,), belief=belief)


def compute_belief(
    graph: EventFlowGraph, steps: tuple[ReproStep, ...]
) -> BeliefState:
    """Refold the belief from scratch; total even for stale steps."""
    belief = initial_belief(graph)
    for step in steps:
        _, belief = _apply_step(graph, belief, step, strict=False)
    return belief


def delete_step(
    graph: EventFlowGraph, draft: ReportDraft, step_num: int
) -> ReportDraft:
    """Drop one step, renumber the rest, and refold the belief."""
    if not any(s.step_num == step_num for s in draft.steps):
        raise NotFoundError(f"draft {draft.draft_id} has no step {step_num}")
    survivors = tuple(
        replace(s, step_num=i)
        for i, s in enumerate(
            (s for s in draft.steps if s.step_num != step_num), start=1
        )
    )
    return replace(
        draft, steps=survivors, belief=compute_belief(graph, survivors)
    )


def manual_entry_vocabulary(static_model: StaticAppModel) -> list[str]:
    """The type tokens offered by the manual-entry fallback form."""
    return component_types(static_model)
