"""End-to-end analysis: bundle in, persisted products out.

Parses the bundle, links sources, rips the simulated device, and persists
the static model, the event-flow graph, and every screenshot the report
workflow can ever ask for (per-state full renders, per-component crops and
highlight augmentations).  Because rendering is deterministic, the
addresses recorded in the graph are guaranteed to resolve in the store.
The bundle itself is copied in, so replaying a stored report needs nothing
but the store.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .bundle import AppBundle
from .model import EventFlowGraph
from .primer import StaticAppModel, link_sources, parse_bundle
from .ripper import RipConfig, activity_coverage, rip
from .screenshots import augment, crop, render_screen
from .simulator import simulate
from .store import Store


@dataclass(frozen=True)
class AnalyzeResult:
    static_model: StaticAppModel
    graph: EventFlowGraph
    coverage: tuple[int, int]
    warnings: tuple[str, ...]


def analyze(
    bundle_path: str | Path,
    store: Store,
    config: RipConfig = RipConfig(),
) -> AnalyzeResult:
    bundle = AppBundle.open(bundle_path)
    model, warnings = link_sources(parse_bundle(bundle), bundle)
    driver = simulate(bundle)
    graph = rip(driver, model, config)

    store.save_static_model(model)
    store.save_graph(graph)
    app_id, version = model.app_id, model.app_version
    for state in graph.states:
        base = render_screen(state)
        store.put_shot(app_id, version, base)
        for comp in state.components:
            store.put_shot(app_id, version, crop(base, comp))
            store.put_shot(app_id, version, augment(base, comp))
    store.copy_bundle(app_id, version, bundle.root)

    return AnalyzeResult(
        static_model=model,
        graph=graph,
        coverage=activity_coverage(graph, model),
        warnings=warnings,
    )
