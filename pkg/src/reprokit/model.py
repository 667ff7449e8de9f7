"""Core domain types shared by every stage of the pipeline.

Coordinate conventions: screens are integer pixel grids with the origin at
the top-left corner, x growing right and y growing down.  A bounds rectangle
is (left, top, right, bottom) with exclusive right/bottom edges, so a
component occupying the top-left quarter of a 100x100 screen has bounds
(0, 0, 50, 50).

The relative-location grid splits the screen into equal thirds along each
axis.  Horizontal cells are the half-open intervals [0, w/3), [w/3, 2w/3),
[2w/3, w]; vertical cells likewise with h.  A component is classified by the
position of its bounds center, compared exactly: the center x is (l + r)/2,
so "center < w/3" is evaluated as 3*(l + r) < 2*w with no floating point.

State fingerprints are sha256 digests of a canonical JSON serialization of
(activity, window, dims, components).  Presentation-only fields
(screenshot_ref, source_units) are excluded so the digest identifies the
interactive surface, not its artifacts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .errors import InvalidGeometryError

ACTION_KINDS = ("click", "long-click", "type", "swipe")
SWIPE_DIRECTIONS = ("up", "down", "left", "right")

GRID_ROWS = ("Top", "Middle", "Bottom")
GRID_COLUMNS = ("Left", "Center", "Right")

# Portrait tablet profile used when a bundle manifest does not override it.
DEFAULT_SCREEN_DIMS = (1200, 1920)


def canonical_json(value) -> str:
    """Stable text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(value, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def canonical_json_bytes(value) -> bytes:
    return canonical_json(value).encode("utf-8")


@dataclass(frozen=True, order=True)
class GridCell:
    """One of the nine relative-location cells, e.g. "Top Center"."""

    row: str
    column: str

    def __post_init__(self):
        if self.row not in GRID_ROWS:
            raise ValueError(f"unknown grid row: {self.row!r}")
        if self.column not in GRID_COLUMNS:
            raise ValueError(f"unknown grid column: {self.column!r}")

    def __str__(self) -> str:
        return f"{self.row} {self.column}"

    @classmethod
    def parse(cls, text: str) -> "GridCell":
        parts = text.split()
        if len(parts) != 2:
            raise ValueError(f"not a grid cell: {text!r}")
        return cls(parts[0], parts[1])


@dataclass(frozen=True, order=True)
class Bounds:
    """Pixel rectangle (left, top, right, bottom), right/bottom exclusive."""

    left: int
    top: int
    right: int
    bottom: int

    def validate(self) -> "Bounds":
        if self.left >= self.right or self.top >= self.bottom:
            raise InvalidGeometryError(f"degenerate bounds {self.as_tuple()}")
        return self

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.left, self.top, self.right, self.bottom)

    @property
    def width(self) -> int:
        return self.right - self.left

    @property
    def height(self) -> int:
        return self.bottom - self.top

    @classmethod
    def parse(cls, text: str) -> "Bounds":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"bounds need four integers: {text!r}")
        return cls(*(int(p) for p in parts))


def grid_cell(bounds: Bounds, screen_dims: tuple[int, int]) -> GridCell:
    """Classify a rectangle's center into the 3x3 location grid."""
    w, h = screen_dims
    if w <= 0 or h <= 0:
        raise InvalidGeometryError(f"non-positive screen dims {screen_dims}")
    bounds.validate()
    # Doubled center coordinates keep the thirds comparison exact.
    cx2 = bounds.left + bounds.right
    cy2 = bounds.top + bounds.bottom
    if 3 * cx2 < 2 * w:
        column = "Left"
    elif 3 * cx2 < 4 * w:
        column = "Center"
    else:
        column = "Right"
    if 3 * cy2 < 2 * h:
        row = "Top"
    elif 3 * cy2 < 4 * h:
        row = "Middle"
    else:
        row = "Bottom"
    return GridCell(row, column)


@dataclass(frozen=True)
class Action:
    """A user gesture; typed_text/swipe_direction exist only for their kinds."""

    kind: str
    typed_text: str | None = None
    swipe_direction: str | None = None

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise ValueError(f"unknown action kind: {self.kind!r}")
        if self.kind == "type":
            if self.typed_text is None:
                raise ValueError("type action requires typed_text")
        elif self.typed_text is not None:
            raise ValueError(f"{self.kind} action must not carry typed_text")
        if self.kind == "swipe":
            if self.swipe_direction not in SWIPE_DIRECTIONS:
                raise ValueError(
                    f"swipe action requires a direction, got {self.swipe_direction!r}"
                )
        elif self.swipe_direction is not None:
            raise ValueError(f"{self.kind} action must not carry swipe_direction")

    def describe(self) -> str:
        if self.kind == "type":
            return f'type "{self.typed_text}"'
        if self.kind == "swipe":
            return f"swipe {self.swipe_direction}"
        return self.kind

    def to_doc(self) -> dict:
        doc = {"kind": self.kind}
        if self.typed_text is not None:
            doc["typed_text"] = self.typed_text
        if self.swipe_direction is not None:
            doc["swipe_direction"] = self.swipe_direction
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "Action":
        return cls(
            kind=doc["kind"],
            typed_text=doc.get("typed_text"),
            swipe_direction=doc.get("swipe_direction"),
        )


class ComponentKey(NamedTuple):
    """Identity of a component: where it lives plus its same-look ordinal."""

    activity_name: str
    resource_id: str
    object_index: int

    def to_doc(self) -> dict:
        return {
            "activity": self.activity_name,
            "resource_id": self.resource_id,
            "object_index": self.object_index,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ComponentKey":
        return cls(doc["activity"], doc["resource_id"], int(doc["object_index"]))


@dataclass(frozen=True)
class ComponentDescriptor:
    """One GUI component as seen on a specific screen."""

    activity_name: str
    window_id: str
    resource_id: str
    component_type: str
    text: str | None
    bounds: Bounds
    relative_location: GridCell
    object_index: int
    supported_actions: tuple[str, ...]
    source_units: tuple[str, ...] = ()

    def __post_init__(self):
        self.bounds.validate()
        if self.object_index < 1:
            raise ValueError("object_index is 1-based")
        for kind in self.supported_actions:
            if kind not in ACTION_KINDS:
                raise ValueError(f"unknown supported action: {kind!r}")

    @property
    def component_key(self) -> ComponentKey:
        return ComponentKey(self.activity_name, self.resource_id, self.object_index)

    @property
    def label_text(self) -> str:
        """Text drawn on renders and shown in candidate lists."""
        return self.text if self.text is not None else self.resource_id

    def canonical_doc(self) -> dict:
        """Fingerprint payload; excludes source_units on purpose."""
        return {
            "activity": self.activity_name,
            "window": self.window_id,
            "resource_id": self.resource_id,
            "object_index": self.object_index,
            "component_type": self.component_type,
            "text": self.text,
            "bounds": list(self.bounds.as_tuple()),
            "relative_location": str(self.relative_location),
            "supported_actions": sorted(self.supported_actions),
        }

    def to_doc(self) -> dict:
        doc = self.canonical_doc()
        doc["source_units"] = list(self.source_units)
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "ComponentDescriptor":
        return cls(
            activity_name=doc["activity"],
            window_id=doc["window"],
            resource_id=doc["resource_id"],
            component_type=doc["component_type"],
            text=doc["text"],
            bounds=Bounds(*doc["bounds"]),
            relative_location=GridCell.parse(doc["relative_location"]),
            object_index=int(doc["object_index"]),
            supported_actions=tuple(doc["supported_actions"]),
            source_units=tuple(doc.get("source_units", ())),
        )


@dataclass(frozen=True)
class ComponentSpec:
    """A declared component before object indices are assigned."""

    activity_name: str
    window_id: str
    resource_id: str
    component_type: str
    text: str | None
    bounds: Bounds
    supported_actions: tuple[str, ...]
    source_units: tuple[str, ...] = ()


def assign_object_indices(
    specs: Sequence[ComponentSpec], screen_dims: tuple[int, int]
) -> tuple[ComponentDescriptor, ...]:
    """Build descriptors in document order, numbering same-(type, text) twins."""
    counts: dict[tuple[str, str | None], int] = {}
    out = []
    for spec in specs:
        group = (spec.component_type, spec.text)
        counts[group] = counts.get(group, 0) + 1
        out.append(
            ComponentDescriptor(
                activity_name=spec.activity_name,
                window_id=spec.window_id,
                resource_id=spec.resource_id,
                component_type=spec.component_type,
                text=spec.text,
                bounds=spec.bounds,
                relative_location=grid_cell(spec.bounds, screen_dims),
                object_index=counts[group],
                supported_actions=spec.supported_actions,
                source_units=spec.source_units,
            )
        )
    return tuple(out)


@dataclass(frozen=True, order=True)
class StateFingerprint:
    """sha256 hex digest identifying one screen state."""

    digest: str

    def __str__(self) -> str:
        return self.digest


def _canonical_state_doc(
    activity_name: str,
    window_id: str,
    screen_dims: tuple[int, int],
    components: Sequence[ComponentDescriptor],
) -> dict:
    ordered = sorted(
        components,
        key=lambda c: (c.activity_name, c.window_id, c.resource_id, c.object_index),
    )
    return {
        "activity": activity_name,
        "window": window_id,
        "screen_dims": list(screen_dims),
        "components": [c.canonical_doc() for c in ordered],
    }


def compute_fingerprint(
    activity_name: str,
    window_id: str,
    screen_dims: tuple[int, int],
    components: Sequence[ComponentDescriptor],
) -> StateFingerprint:
    doc = _canonical_state_doc(activity_name, window_id, screen_dims, components)
    digest = hashlib.sha256(canonical_json_bytes(doc)).hexdigest()
    return StateFingerprint(digest)


@dataclass(frozen=True)
class ScreenState:
    """A fingerprinted snapshot of everything on screen."""

    activity_name: str
    window_id: str
    screen_dims: tuple[int, int]
    components: tuple[ComponentDescriptor, ...]
    screenshot_ref: str | None = None
    fingerprint: StateFingerprint = field(init=False)

    def __post_init__(self):
        fp = compute_fingerprint(
            self.activity_name, self.window_id, self.screen_dims, self.components
        )
        object.__setattr__(self, "fingerprint", fp)

    def with_screenshot(self, address: str) -> "ScreenState":
        return replace(self, screenshot_ref=address)

    def component(self, key: ComponentKey) -> ComponentDescriptor | None:
        for comp in self.components:
            if comp.component_key == key:
                return comp
        return None

    def to_doc(self) -> dict:
        return {
            "activity": self.activity_name,
            "window": self.window_id,
            "screen_dims": list(self.screen_dims),
            "fingerprint": self.fingerprint.digest,
            "screenshot": self.screenshot_ref,
            "components": [c.to_doc() for c in self.components],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ScreenState":
        state = cls(
            activity_name=doc["activity"],
            window_id=doc["window"],
            screen_dims=tuple(doc["screen_dims"]),
            components=tuple(
                ComponentDescriptor.from_doc(c) for c in doc["components"]
            ),
            screenshot_ref=doc.get("screenshot"),
        )
        stored = doc.get("fingerprint")
        if stored is not None and stored != state.fingerprint.digest:
            raise ValueError(
                f"state fingerprint mismatch: stored {stored}, "
                f"recomputed {state.fingerprint.digest}"
            )
        return state


def state_fingerprint(state: ScreenState) -> StateFingerprint:
    """Recompute a state's digest from its canonical fields."""
    return compute_fingerprint(
        state.activity_name, state.window_id, state.screen_dims, state.components
    )


@dataclass(frozen=True)
class Transition:
    """One fired action and the state change it produced."""

    from_state: StateFingerprint
    action: Action
    component_key: ComponentKey
    to_state: StateFingerprint
    before_shot: str
    after_shot: str
    external: bool = False

    def to_doc(self) -> dict:
        return {
            "from": self.from_state.digest,
            "action": self.action.to_doc(),
            "component": self.component_key.to_doc(),
            "to": self.to_state.digest,
            "before_shot": self.before_shot,
            "after_shot": self.after_shot,
            "external": self.external,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Transition":
        return cls(
            from_state=StateFingerprint(doc["from"]),
            action=Action.from_doc(doc["action"]),
            component_key=ComponentKey.from_doc(doc["component"]),
            to_state=StateFingerprint(doc["to"]),
            before_shot=doc["before_shot"],
            after_shot=doc["after_shot"],
            external=bool(doc["external"]),
        )


GRAPH_FORMAT = "event-flow-graph v1"


@dataclass(frozen=True)
class EventFlowGraph:
    """States and action-labeled transitions recorded by ripping one app."""

    app_id: str
    app_version: str
    main_state: StateFingerprint
    states: tuple[ScreenState, ...]
    transitions: tuple[Transition, ...]
    unexplored: tuple[tuple[StateFingerprint, ComponentKey, str], ...] = ()

    def __post_init__(self):
        known = {s.fingerprint for s in self.states}
        if len(known) != len(self.states):
            raise ValueError("duplicate state fingerprints in graph")
        if self.main_state not in known:
            raise ValueError("main_state missing from states")
        for t in self.transitions:
            if t.from_state not in known or t.to_state not in known:
                raise ValueError("transition endpoint missing from states")

    @cached_property
    def by_fingerprint(self) -> dict[StateFingerprint, ScreenState]:
        return {s.fingerprint: s for s in self.states}

    @cached_property
    def outgoing(self) -> dict[StateFingerprint, tuple[Transition, ...]]:
        table: dict[StateFingerprint, list[Transition]] = {
            s.fingerprint: [] for s in self.states
        }
        for t in self.transitions:
            table[t.from_state].append(t)
        return {fp: tuple(ts) for fp, ts in table.items()}

    def state(self, fp: StateFingerprint) -> ScreenState:
        try:
            return self.by_fingerprint[fp]
        except KeyError:
            raise KeyError(f"unknown state fingerprint {fp.digest}") from None

    def to_doc(self) -> dict:
        return {
            "format": GRAPH_FORMAT,
            "app_id": self.app_id,
            "app_version": self.app_version,
            "main_state": self.main_state.digest,
            "states": [s.to_doc() for s in self.states],
            "transitions": [t.to_doc() for t in self.transitions],
            "unexplored": [
                {"state": fp.digest, "component": key.to_doc(), "action": kind}
                for fp, key, kind in self.unexplored
            ],
        }

    def to_bytes(self) -> bytes:
        return canonical_json_bytes(self.to_doc())

    @classmethod
    def from_doc(cls, doc: dict) -> "EventFlowGraph":
        if doc.get("format") != GRAPH_FORMAT:
            raise ValueError(f"unsupported graph format: {doc.get('format')!r}")
        return cls(
            app_id=doc["app_id"],
            app_version=doc["app_version"],
            main_state=StateFingerprint(doc["main_state"]),
            states=tuple(ScreenState.from_doc(s) for s in doc["states"]),
            transitions=tuple(Transition.from_doc(t) for t in doc["transitions"]),
            unexplored=tuple(
                (
                    StateFingerprint(u["state"]),
                    ComponentKey.from_doc(u["component"]),
                    u["action"],
                )
                for u in doc["unexplored"]
            ),
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "EventFlowGraph":
        return cls.from_doc(json.loads(data.decode("utf-8")))
