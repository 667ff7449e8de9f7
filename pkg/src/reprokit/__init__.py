"""GUI app analysis and auto-completed, replayable bug reports.

The pipeline has two halves.  Analysis parses a portable app bundle into a
static component universe, then drives a simulated device through a
depth-first exploration to build an event-flow graph with deterministic
screenshots.  Generation walks a reporter through the graph step by step,
suggesting actions, components, and confirmation screenshots, and finalizes
the result into a rendered, stored, replayable bug report.
"""

from .bundle import AppBundle
from .errors import ReproKitError
from .model import (
    Action,
    Bounds,
    ComponentDescriptor,
    ComponentKey,
    EventFlowGraph,
    GridCell,
    ScreenState,
    StateFingerprint,
    Transition,
    grid_cell,
)
from .pipeline import AnalyzeResult, analyze
from .primer import StaticAppModel, component_types, link_sources, parse_bundle
from .reporting import (
    BugReport,
    ReplayOutcome,
    ReplayScript,
    finalize,
    is_replayable,
    render,
    replay,
    to_script,
)
from .ripper import RipConfig, activity_coverage, rip
from .screenshots import augment, content_address, crop, render_screen
from .simulator import BehaviorModel, SimulatedDevice, simulate
from .store import Store
from .suggestion import (
    ALL_KNOWN,
    BeliefState,
    CandidateComponent,
    ManualComponent,
    ReportDraft,
    ReproStep,
    ResolvedComponent,
    candidate_screenshots,
    delete_step,
    initial_belief,
    record_step,
    suggest_actions,
    suggest_components,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_KNOWN",
    "Action",
    "AnalyzeResult",
    "AppBundle",
    "BehaviorModel",
    "BeliefState",
    "Bounds",
    "BugReport",
    "CandidateComponent",
    "ComponentDescriptor",
    "ComponentKey",
    "EventFlowGraph",
    "GridCell",
    "ManualComponent",
    "ReplayOutcome",
    "ReplayScript",
    "ReportDraft",
    "ReproKitError",
    "ReproStep",
    "ResolvedComponent",
    "RipConfig",
    "ScreenState",
    "SimulatedDevice",
    "StateFingerprint",
    "StaticAppModel",
    "Store",
    "Transition",
    "activity_coverage",
    "analyze",
    "augment",
    "candidate_screenshots",
    "component_types",
    "content_address",
    "crop",
    "delete_step",
    "finalize",
    "grid_cell",
    "initial_belief",
    "is_replayable",
    "link_sources",
    "parse_bundle",
    "record_step",
    "render",
    "render_screen",
    "replay",
    "rip",
    "simulate",
    "suggest_actions",
    "suggest_components",
    "to_script",
]
