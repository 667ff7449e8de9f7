"""Behavior models and the simulated device they drive.

The behavior model is a line-based text file shipped in the bundle:

    behavior-model v1
    initial <state-id>
    state <state-id> activity=<activity> windows=<w0[,w1,...]>
    override <state-id> <resource-id> text <value>
    on <state-id> <resource-id> <action-kind> -> <state-id|EXTERNAL|EXIT_TO_HOME>

Blank lines and lines starting with '#' are ignored; values with spaces are
quoted (shlex rules).  A state's screen is the concatenation of its windows'
components, base window first; the screen's window id is the top of the
stack.  Object indices are re-assigned on the composed screen, so stacking
can renumber same-looking components relative to their static declaration.

The simulated device honors the driver contract the ripper and the replayer
are written against: launch_app, current_screen, perform, press_back,
at_home.  Every call is appended to `call_log` so tests can assert protocol
details (for example, exactly one back-press after an external action).
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, replace

from .bundle import AppBundle
from .errors import DriverError, ModelMalformedError
from .model import (
    ACTION_KINDS,
    Action,
    ComponentKey,
    ScreenState,
    assign_object_indices,
)

EXTERNAL = "EXTERNAL"
EXIT_TO_HOME = "EXIT_TO_HOME"

IN_APP = "in_app"
OUT_EXTERNAL = "external"
APP_EXITED = "app_exited"


@dataclass(frozen=True)
class PerformOutcome:
    """What the device did with an action: in_app, external, or app_exited."""

    kind: str


@dataclass(frozen=True)
class BehaviorState:
    state_id: str
    activity_name: str
    windows: tuple[str, ...]
    overrides: tuple[tuple[str, str], ...] = ()  # (resource_id, new text)


@dataclass(frozen=True)
class BehaviorModel:
    initial: str
    states: tuple[BehaviorState, ...]
    table: dict[tuple[str, str, str], str]  # (state, resource_id, kind) -> target

    def state(self, state_id: str) -> BehaviorState:
        for st in self.states:
            if st.state_id == state_id:
                return st
        raise KeyError(state_id)


def parse_behavior_model(bundle: AppBundle) -> BehaviorModel:
    text = bundle.behavior_text
    if text is None:
        raise ModelMalformedError(f"bundle {bundle.root} has no behavior.model")
    lines = text.splitlines()
    if not lines or lines[0].strip() != "behavior-model v1":
        raise ModelMalformedError(
            "behavior.model must start with the line 'behavior-model v1'"
        )

    initial: str | None = None
    states: list[BehaviorState] = []
    by_id: dict[str, BehaviorState] = {}
    overrides: dict[str, list[tuple[str, str]]] = {}
    table: dict[tuple[str, str, str], str] = {}
    pending_edges: list[tuple[int, str, str, str, str]] = []

    def fail(lineno: int, message: str):
        raise ModelMalformedError(f"behavior.model:{lineno}: {message}")

    for lineno, raw in enumerate(lines[1:], start=2):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            tokens = shlex.split(stripped)
        except ValueError as exc:
            fail(lineno, f"unparseable line: {exc}")
        directive = tokens[0]
        if directive == "initial":
            if len(tokens) != 2:
                fail(lineno, "usage: initial <state-id>")
            if initial is not None:
                fail(lineno, "duplicate initial directive")
            initial = tokens[1]
        elif directive == "state":
            if len(tokens) != 4:
                fail(lineno, "usage: state <id> activity=<name> windows=<w,...>")
            state_id = tokens[1]
            if state_id in by_id:
                fail(lineno, f"state {state_id!r} declared twice")
            fields = {}
            for tok in tokens[2:]:
                if "=" not in tok:
                    fail(lineno, f"expected key=value, got {tok!r}")
                k, v = tok.split("=", 1)
                fields[k] = v
            if set(fields) != {"activity", "windows"}:
                fail(lineno, "state needs exactly activity= and windows=")
            windows = tuple(w for w in fields["windows"].split(",") if w)
            if not windows:
                fail(lineno, "state needs at least one window")
            st = BehaviorState(state_id, fields["activity"], windows)
            by_id[state_id] = st
            states.append(st)
        elif directive == "override":
            if len(tokens) != 5 or tokens[3] != "text":
                fail(lineno, "usage: override <state-id> <resource-id> text <value>")
            overrides.setdefault(tokens[1], []).append((tokens[2], tokens[4]))
        elif directive == "on":
            if len(tokens) != 6 or tokens[4] != "->":
                fail(lineno, "usage: on <state-id> <resource-id> <kind> -> <target>")
            _, state_id, resource_id, kind, _, target = tokens
            if kind not in ACTION_KINDS:
                fail(lineno, f"unknown action kind {kind!r}")
            pending_edges.append((lineno, state_id, resource_id, kind, target))
        else:
            fail(lineno, f"unknown directive {directive!r}")

    if initial is None:
        raise ModelMalformedError("behavior.model declares no initial state")
    if initial not in by_id:
        raise ModelMalformedError(f"initial state {initial!r} is not declared")

    # Resolve overrides and check every state against the bundle's windows.
    resolved_states = []
    for st in states:
        declared: dict[str, str] = {}
        supported: dict[str, tuple[str, ...]] = {}
        for window_id in st.windows:
            decl = bundle.window(st.activity_name, window_id)  # raises BundleError
            for spec in decl.components:
                declared[spec.resource_id] = window_id
                supported[spec.resource_id] = spec.supported_actions
        for resource_id, _ in overrides.get(st.state_id, []):
            if resource_id not in declared:
                raise ModelMalformedError(
                    f"override for {st.state_id!r} names {resource_id!r}, "
                    f"which none of its windows declare"
                )
        resolved_states.append(
            replace(st, overrides=tuple(overrides.get(st.state_id, [])))
        )
        st_edges = [e for e in pending_edges if e[1] == st.state_id]
        for lineno, _, resource_id, kind, target in st_edges:
            if resource_id not in declared:
                raise ModelMalformedError(
                    f"behavior.model:{lineno}: {st.state_id!r} has no "
                    f"component {resource_id!r} on screen"
                )
            if kind not in supported[resource_id]:
                raise ModelMalformedError(
                    f"behavior.model:{lineno}: component {resource_id!r} does "
                    f"not support {kind!r}"
                )

    for lineno, state_id, resource_id, kind, target in pending_edges:
        if state_id not in by_id:
            raise ModelMalformedError(
                f"behavior.model:{lineno}: undeclared state {state_id!r}"
            )
        if target not in (EXTERNAL, EXIT_TO_HOME) and target not in by_id:
            raise ModelMalformedError(
                f"behavior.model:{lineno}: undeclared target state {target!r}"
            )
        key = (state_id, resource_id, kind)
        if key in table:
            raise ModelMalformedError(
                f"behavior.model:{lineno}: duplicate transition for {key}"
            )
        table[key] = target

    unknown = {e[1] for e in pending_edges} - set(by_id)
    if unknown:
        raise ModelMalformedError(f"transitions reference undeclared states {unknown}")

    return BehaviorModel(
        initial=initial, states=tuple(resolved_states), table=table
    )


def compose_screen(bundle: AppBundle, state: BehaviorState) -> ScreenState:
    """Stack the state's windows into one screen, base window first."""
    override_map = dict(state.overrides)
    specs = []
    for window_id in state.windows:
        decl = bundle.window(state.activity_name, window_id)
        for spec in decl.components:
            if spec.resource_id in override_map:
                spec = replace(spec, text=override_map[spec.resource_id])
            specs.append(spec)
    dims = bundle.manifest.screen_dims
    return ScreenState(
        activity_name=state.activity_name,
        window_id=state.windows[-1],
        screen_dims=dims,
        components=assign_object_indices(specs, dims),
    )


class SimulatedDevice:
    """Deterministic in-process device following the driver contract."""

    def __init__(self, bundle: AppBundle, behavior: BehaviorModel):
        self.bundle = bundle
        self.behavior = behavior
        self.call_log: list[str] = []
        self._state_id: str | None = None
        self._external_overlay = False

    @property
    def app_id(self) -> str:
        return self.bundle.manifest.app_id

    def launch_app(self, cold: bool = True) -> None:
        self.call_log.append(f"launch_app cold={cold}")
        self._external_overlay = False
        if cold or self._state_id is None:
            self._state_id = self.behavior.initial

    def at_home(self) -> bool:
        self.call_log.append("at_home")
        return self._state_id is None and not self._external_overlay

    def current_screen(self) -> ScreenState:
        self.call_log.append("current_screen")
        if self._external_overlay:
            raise DriverError("an external app is in the foreground")
        if self._state_id is None:
            raise DriverError("app is not running")
        return compose_screen(self.bundle, self.behavior.state(self._state_id))

    def press_back(self) -> None:
        self.call_log.append("press_back")
        # Returning from an external app restores the interrupted screen;
        # otherwise back is a no-op (in-app back routes live in the table).
        self._external_overlay = False

    def perform(self, action: Action, component_key: ComponentKey) -> PerformOutcome:
        self.call_log.append(
            f"perform {action.kind} {component_key.activity_name}::"
            f"{component_key.resource_id}::{component_key.object_index}"
        )
        if self._external_overlay:
            raise DriverError("an external app is in the foreground")
        if self._state_id is None:
            raise DriverError("app is not running")
        screen = compose_screen(self.bundle, self.behavior.state(self._state_id))
        component = screen.component(component_key)
        if component is None:
            raise DriverError(f"no component {component_key} on the current screen")
        if action.kind not in component.supported_actions:
            raise DriverError(
                f"component {component_key.resource_id!r} does not support "
                f"{action.kind!r}"
            )
        target = self.behavior.table.get(
            (self._state_id, component_key.resource_id, action.kind)
        )
        if target is None:
            return PerformOutcome(IN_APP)  # wired to nothing: screen unchanged
        if target == EXTERNAL:
            self._external_overlay = True
            return PerformOutcome(OUT_EXTERNAL)
        if target == EXIT_TO_HOME:
            self._state_id = None
            return PerformOutcome(APP_EXITED)
        self._state_id = target
        return PerformOutcome(IN_APP)


def simulate(source: AppBundle | str) -> SimulatedDevice:
    """Build a simulated device from a bundle carrying a behavior model."""
    bundle = source if isinstance(source, AppBundle) else AppBundle.open(source)
    return SimulatedDevice(bundle, parse_behavior_model(bundle))
