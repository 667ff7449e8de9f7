"""Static analysis: the universe of declared GUI components.

Reads an app bundle and produces the StaticAppModel consumed by the ripper
(app identity), the suggestion engine (manual-entry type vocabulary) and the
report finalizer (source-unit references).  Everything here is a pure
function of the bundle bytes; components keep document order within each
file, files merge in lexicographic path order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .bundle import AppBundle
from .model import (
    ComponentDescriptor,
    ComponentKey,
    assign_object_indices,
    canonical_json_bytes,
)

MODEL_FORMAT = "static-app-model v1"


@dataclass(frozen=True)
class StaticAppModel:
    app_id: str
    app_version: str
    main_activity: str
    screen_dims: tuple[int, int]
    activities: tuple[str, ...]
    components: tuple[ComponentDescriptor, ...]

    @property
    def type_vocabulary(self) -> tuple[str, ...]:
        return tuple(sorted({c.component_type for c in self.components}))

    def component(self, key: ComponentKey) -> ComponentDescriptor | None:
        """Exact key match, else the unique (activity, resource_id) holder.

        Object indices are assigned per screen, so a component observed on a
        stacked-window screen can carry a different ordinal than its static
        declaration; the resource id still pins it down within an activity.
        """
        for comp in self.components:
            if comp.component_key == key:
                return comp
        matches = [
            c
            for c in self.components
            if c.activity_name == key.activity_name
            and c.resource_id == key.resource_id
        ]
        if len(matches) == 1:
            return matches[0]
        return None

    def to_doc(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "app_id": self.app_id,
            "app_version": self.app_version,
            "main_activity": self.main_activity,
            "screen_dims": list(self.screen_dims),
            "activities": list(self.activities),
            "components": [c.to_doc() for c in self.components],
        }

    def to_bytes(self) -> bytes:
        return canonical_json_bytes(self.to_doc())

    @classmethod
    def from_doc(cls, doc: dict) -> "StaticAppModel":
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError(f"unsupported model format: {doc.get('format')!r}")
        return cls(
            app_id=doc["app_id"],
            app_version=doc["app_version"],
            main_activity=doc["main_activity"],
            screen_dims=tuple(doc["screen_dims"]),
            activities=tuple(doc["activities"]),
            components=tuple(
                ComponentDescriptor.from_doc(c) for c in doc["components"]
            ),
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "StaticAppModel":
        return cls.from_doc(json.loads(data.decode("utf-8")))


def parse_bundle(source: str | Path | AppBundle) -> StaticAppModel:
    """Extract every declared component, indexed per window file."""
    bundle = source if isinstance(source, AppBundle) else AppBundle.open(source)
    components: list[ComponentDescriptor] = []
    for decl in bundle.windows:
        components.extend(
            assign_object_indices(decl.components, bundle.manifest.screen_dims)
        )
    return StaticAppModel(
        app_id=bundle.manifest.app_id,
        app_version=bundle.manifest.app_version,
        main_activity=bundle.manifest.main_activity,
        screen_dims=bundle.manifest.screen_dims,
        activities=bundle.activities,
        components=tuple(components),
    )


def link_sources(
    model: StaticAppModel, bundle: AppBundle
) -> tuple[StaticAppModel, tuple[str, ...]]:
    """Fill source_units from the bundle's sources index.

    Index entries naming a resource id no layout declares are reported as
    warnings, never as failures.
    """
    known_ids = {c.resource_id for c in model.components}
    warnings = tuple(
        f"sources index references unknown resource id {rid!r}"
        for rid in sorted(bundle.sources_index)
        if rid not in known_ids
    )
    linked = tuple(
        replace(c, source_units=bundle.sources_index.get(c.resource_id, ()))
        for c in model.components
    )
    return replace(model, components=linked), warnings


def component_types(model: StaticAppModel) -> list[str]:
    """Sorted, deduplicated type tokens present in the app."""
    return list(model.type_vocabulary)
