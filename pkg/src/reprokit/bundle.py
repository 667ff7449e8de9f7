"""App-bundle ingestion.

A bundle is a directory:

    manifest.json            app identity, main activity, device profile
    layouts/<Act>.<win>.xml  one file per activity window
    menus/<Act>.<win>.xml    same schema, menu windows attached to an activity
    sources/index.json       resource_id -> list of source-unit paths
    behavior.model           transition table driving the simulated device

Layout and menu files share one schema: the root element is <screen>, each
child element's tag is the component type (open vocabulary), with attributes
id (required), bounds (required, "l,t,r,b"), text (optional) and actions
(optional comma list, default "click"; empty string means no actions).

Activity and window names come from the file name, split at the first dot,
so neither may contain a dot.  A resource id must be unique within its
activity (across all of the activity's windows) so that a component key is
unambiguous even when windows are stacked into one screen.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from .errors import BundleError, DuplicateIdError, LayoutError
from .model import ACTION_KINDS, Bounds, ComponentSpec

MANIFEST_NAME = "manifest.json"
BEHAVIOR_NAME = "behavior.model"


@dataclass(frozen=True)
class Manifest:
    app_id: str
    app_version: str
    main_activity: str
    screen_dims: tuple[int, int]


@dataclass(frozen=True)
class WindowDeclaration:
    """Parsed contents of one layout or menu file."""

    activity_name: str
    window_id: str
    path: str
    kind: str  # "layout" or "menu"
    components: tuple[ComponentSpec, ...]


@dataclass(frozen=True)
class AppBundle:
    root: Path
    manifest: Manifest
    windows: tuple[WindowDeclaration, ...]  # lexicographic by path
    sources_index: dict[str, tuple[str, ...]]
    behavior_text: str | None

    def window(self, activity_name: str, window_id: str) -> WindowDeclaration:
        for decl in self.windows:
            if decl.activity_name == activity_name and decl.window_id == window_id:
                return decl
        raise BundleError(f"no window {window_id!r} declared for {activity_name!r}")

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(sorted({w.activity_name for w in self.windows}))

    @classmethod
    def open(cls, root: str | Path) -> "AppBundle":
        root = Path(root)
        if not root.is_dir():
            raise BundleError(f"bundle directory not found: {root}")
        manifest = _read_manifest(root / MANIFEST_NAME)
        windows = []
        for kind in ("layouts", "menus"):
            subdir = root / kind
            if not subdir.is_dir():
                continue
            for path in sorted(subdir.glob("*.xml")):
                windows.append(_read_window_file(path, kind.rstrip("s"), manifest))
        _check_windows(windows, manifest)
        sources_index = _read_sources_index(root / "sources" / "index.json")
        behavior_path = root / BEHAVIOR_NAME
        behavior_text = (
            behavior_path.read_text(encoding="utf-8")
            if behavior_path.is_file()
            else None
        )
        return cls(
            root=root,
            manifest=manifest,
            windows=tuple(windows),
            sources_index=sources_index,
            behavior_text=behavior_text,
        )


def _read_manifest(path: Path) -> Manifest:
    if not path.is_file():
        raise BundleError(f"missing {MANIFEST_NAME} in {path.parent}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BundleError(f"{path}: invalid JSON: {exc}") from exc
    for field in ("app_id", "app_version", "main_activity"):
        value = doc.get(field)
        if not isinstance(value, str) or not value:
            raise BundleError(f"{path}: manifest field {field!r} missing or empty")
    device = doc.get("device", {})
    width = device.get("width")
    height = device.get("height")
    if not isinstance(width, int) or not isinstance(height, int):
        raise BundleError(f"{path}: manifest device profile needs integer width/height")
    if width <= 0 or height <= 0:
        raise BundleError(f"{path}: device dims must be positive")
    return Manifest(
        app_id=doc["app_id"],
        app_version=doc["app_version"],
        main_activity=doc["main_activity"],
        screen_dims=(width, height),
    )


def _split_window_filename(path: Path) -> tuple[str, str]:
    stem = path.name[: -len(".xml")]
    if "." not in stem:
        raise LayoutError(
            "file name must be <activity>.<window>.xml", str(path)
        )
    activity, window = stem.split(".", 1)
    if not activity or not window or "." in window:
        raise LayoutError(
            "file name must be <activity>.<window>.xml", str(path)
        )
    return activity, window


def _read_window_file(path: Path, kind: str, manifest: Manifest) -> WindowDeclaration:
    activity, window = _split_window_filename(path)
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        line = exc.position[0] if exc.position else None
        raise LayoutError(f"XML syntax error: {exc}", str(path), line) from exc
    root = tree.getroot()
    if root.tag != "screen":
        raise LayoutError(f"root element must be <screen>, got <{root.tag}>", str(path))
    seen_ids: set[str] = set()
    specs = []
    for elem in root:
        resource_id = elem.get("id")
        if not resource_id:
            raise LayoutError(f"<{elem.tag}> missing id attribute", str(path))
        if resource_id in seen_ids:
            raise DuplicateIdError(
                f"{path}: resource id {resource_id!r} declared twice in one window"
            )
        seen_ids.add(resource_id)
        bounds_attr = elem.get("bounds")
        if not bounds_attr:
            raise LayoutError(f"<{elem.tag} id={resource_id!r}> missing bounds", str(path))
        try:
            bounds = Bounds.parse(bounds_attr).validate()
        except Exception as exc:
            raise LayoutError(
                f"bad bounds for id {resource_id!r}: {exc}", str(path)
            ) from exc
        w, h = manifest.screen_dims
        if bounds.left < 0 or bounds.top < 0 or bounds.right > w or bounds.bottom > h:
            raise LayoutError(
                f"bounds of id {resource_id!r} exceed the {w}x{h} screen", str(path)
            )
        actions_attr = elem.get("actions")
        if actions_attr is None:
            actions: tuple[str, ...] = ("click",)
        elif actions_attr.strip() == "":
            actions = ()
        else:
            actions = tuple(a.strip() for a in actions_attr.split(","))
            for a in actions:
                if a not in ACTION_KINDS:
                    raise LayoutError(
                        f"unknown action {a!r} on id {resource_id!r}", str(path)
                    )
        specs.append(
            ComponentSpec(
                activity_name=activity,
                window_id=window,
                resource_id=resource_id,
                component_type=elem.tag,
                text=elem.get("text"),
                bounds=bounds,
                supported_actions=actions,
            )
        )
    return WindowDeclaration(
        activity_name=activity,
        window_id=window,
        path=str(path),
        kind=kind,
        components=tuple(specs),
    )


def _check_windows(windows: list[WindowDeclaration], manifest: Manifest) -> None:
    seen_windows: set[tuple[str, str]] = set()
    ids_per_activity: dict[str, dict[str, str]] = {}
    for decl in windows:
        key = (decl.activity_name, decl.window_id)
        if key in seen_windows:
            raise BundleError(
                f"window {decl.window_id!r} of {decl.activity_name!r} declared twice"
            )
        seen_windows.add(key)
        owned = ids_per_activity.setdefault(decl.activity_name, {})
        for spec in decl.components:
            if spec.resource_id in owned:
                raise DuplicateIdError(
                    f"resource id {spec.resource_id!r} declared in both "
                    f"{owned[spec.resource_id]!r} and {decl.window_id!r} "
                    f"of activity {decl.activity_name!r}"
                )
            owned[spec.resource_id] = decl.window_id
    if not any(
        w.activity_name == manifest.main_activity and w.kind == "layout"
        for w in windows
    ):
        raise BundleError(
            f"main activity {manifest.main_activity!r} has no layout file"
        )


def _read_sources_index(path: Path) -> dict[str, tuple[str, ...]]:
    if not path.is_file():
        return {}
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BundleError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise BundleError(f"{path}: sources index must be an object")
    index = {}
    for resource_id, units in doc.items():
        if not isinstance(units, list) or not all(isinstance(u, str) for u in units):
            raise BundleError(
                f"{path}: entry {resource_id!r} must map to a list of paths"
            )
        index[resource_id] = tuple(units)
    return index
