"""Systematic depth-first app exploration over a device driver.

The ripper launches the app cold, fingerprints the first screen, then walks
depth-first: for every newly discovered state it fires the configured action
kinds on each component in document order, records a transition per firing,
and recurses into unseen destination states.  Revisits are detected by state
fingerprint, globally across paths.

Protocol details mirror how a real device must be handled:

- an action that would leave the app gets an immediate back-press, and the
  resulting screen is recorded as the transition target with external=True;
- an action that exits to the home screen is recorded as a transition to the
  cold-start state, and exploration resumes by relaunching and replaying the
  depth-first path from the root;
- before/after screenshot addresses are taken from the deterministic renders
  of the endpoint states.

Only payload-free action kinds (click, long-click) can be auto-fired; typed
text and swipe directions cannot be synthesized, so those kinds never appear
in a rip configuration even though bundles may declare them.  Budget limits
(max_depth, max_steps) push skipped firings into the graph's unexplored
list instead of failing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DriverError, RipInterrupted
from .model import (
    Action,
    ComponentKey,
    EventFlowGraph,
    ScreenState,
    StateFingerprint,
    Transition,
)
from .primer import StaticAppModel
from .screenshots import content_address, render_screen
from .simulator import APP_EXITED, IN_APP, OUT_EXTERNAL

FIREABLE_KINDS = ("click", "long-click")


@dataclass(frozen=True)
class RipConfig:
    max_depth: int = 20
    max_steps: int = 10_000
    actions_to_fire: tuple[str, ...] = ("click",)

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        for kind in self.actions_to_fire:
            if kind not in FIREABLE_KINDS:
                raise ValueError(
                    f"cannot auto-fire {kind!r}; only {FIREABLE_KINDS} are payload-free"
                )


def rip(driver, static_model: StaticAppModel, config: RipConfig = RipConfig()) -> EventFlowGraph:
    """Explore the app and return its event-flow graph.

    Raises RipInterrupted (carrying the partial graph) if the driver fails or
    stops behaving deterministically mid-exploration.
    """
    states: dict[StateFingerprint, ScreenState] = {}
    order: list[StateFingerprint] = []
    paths: dict[StateFingerprint, tuple] = {}
    transitions: list[Transition] = []
    unexplored: list[tuple[StateFingerprint, ComponentKey, str]] = []
    fired = 0
    current: StateFingerprint | None = None

    def build() -> EventFlowGraph:
        return EventFlowGraph(
            app_id=static_model.app_id,
            app_version=static_model.app_version,
            main_state=order[0],
            states=tuple(states[fp] for fp in order),
            transitions=tuple(transitions),
            unexplored=tuple(unexplored),
        )

    def interrupt(message: str) -> RipInterrupted:
        # No graph exists at all if the very first screen was never captured.
        return RipInterrupted(message, partial_graph=build() if order else None)

    def observe() -> ScreenState:
        raw = driver.current_screen()
        return raw.with_screenshot(content_address(render_screen(raw)))

    def register(state: ScreenState, path: tuple) -> None:
        states[state.fingerprint] = state
        order.append(state.fingerprint)
        paths[state.fingerprint] = path

    def ensure_at(fp: StateFingerprint) -> None:
        """Relaunch cold and replay the recorded path when not already there."""
        nonlocal current
        if current == fp:
            return
        driver.launch_app(cold=True)
        for step in paths[fp]:
            if step == ("back",):
                driver.press_back()
            else:
                _, action, key = step
                driver.perform(action, key)
        observed = driver.current_screen().fingerprint
        if observed != fp:
            raise interrupt(
                f"path replay reached {observed.digest[:12]} instead of "
                f"{fp.digest[:12]}; driver is not deterministic"
            )
        current = fp

    def explore(fp: StateFingerprint, depth: int) -> None:
        nonlocal fired, current
        state = states[fp]
        for comp in state.components:
            for kind in config.actions_to_fire:
                if kind not in comp.supported_actions:
                    continue
                key = comp.component_key
                if depth >= config.max_depth or fired >= config.max_steps:
                    unexplored.append((fp, key, kind))
                    continue
                ensure_at(fp)
                action = Action(kind)
                before = state.screenshot_ref
                outcome = driver.perform(action, key)
                fired += 1
                if outcome.kind == APP_EXITED:
                    # Cold relaunch is where the user lands, so that is the
                    # recorded destination; the next firing replays the path.
                    root_fp = order[0]
                    transitions.append(
                        Transition(fp, action, key, root_fp, before,
                                   states[root_fp].screenshot_ref)
                    )
                    current = None
                    continue
                external = outcome.kind == OUT_EXTERNAL
                if external:
                    driver.press_back()
                elif outcome.kind != IN_APP:
                    raise interrupt(f"unknown perform outcome {outcome.kind!r}")
                screen = observe()
                to_fp = screen.fingerprint
                is_new = to_fp not in states
                if is_new:
                    suffix = (("perform", action, key),)
                    if external:
                        suffix += (("back",),)
                    register(screen, paths[fp] + suffix)
                transitions.append(
                    Transition(fp, action, key, to_fp, before,
                               states[to_fp].screenshot_ref, external=external)
                )
                current = to_fp
                if is_new:
                    explore(to_fp, depth + 1)

    try:
        driver.launch_app(cold=True)
        register(observe(), ())
        current = order[0]
        explore(order[0], 0)
    except RipInterrupted:
        raise
    except DriverError as exc:
        raise interrupt(f"driver failed mid-rip: {exc}") from exc
    return build()


def activity_coverage(
    graph: EventFlowGraph, static_model: StaticAppModel
) -> tuple[int, int]:
    """(distinct activities reached, activities declared)."""
    if not static_model.activities:
        raise ValueError("static model declares no activities")
    visited = {s.activity_name for s in graph.states}
    return len(visited), len(static_model.activities)
