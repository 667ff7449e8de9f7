"""Plain-directory persistence for analysis products, drafts, and reports.

Layout (a stable contract, see docs/store-layout.md):

    apps/<app_id>/<version>/static.model   static component universe
    apps/<app_id>/<version>/graph.efg      event-flow graph
    apps/<app_id>/<version>/shots/<address>.svg
    apps/<app_id>/<version>/bundle/        copy of the analyzed bundle
    drafts/<draft_id>                      in-progress report (JSON)
    reports/<report_id>                    finalized report (structured format)

Shots are content-addressed and therefore immutable; everything else is
written whole-document with a write-to-temp-then-rename discipline so a torn
write can never leave a half-readable file behind.
"""

from __future__ import annotations

import json
import os
import re
import shutil
import threading
from pathlib import Path

from .errors import NotFoundError
from .model import EventFlowGraph, canonical_json_bytes
from .primer import StaticAppModel
from .screenshots import content_address

_ID_TOKEN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


def _check_token(value: str, what: str) -> str:
    if not _ID_TOKEN.match(value):
        raise ValueError(f"unsafe {what} for a path segment: {value!r}")
    return value


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp-{os.getpid()}-{threading.get_ident()}")
    tmp.write_bytes(data)
    try:
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


class Store:
    """One store root; safe for many readers and per-document single writers."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._id_lock = threading.Lock()

    # -- app analysis products ------------------------------------------

    def app_dir(self, app_id: str, version: str) -> Path:
        return (
            self.root
            / "apps"
            / _check_token(app_id, "app id")
            / _check_token(version, "version")
        )

    def list_apps(self) -> list[tuple[str, str]]:
        apps_dir = self.root / "apps"
        found = []
        if apps_dir.is_dir():
            for app_path in sorted(apps_dir.iterdir()):
                if not app_path.is_dir():
                    continue
                for version_path in sorted(app_path.iterdir()):
                    if (version_path / "graph.efg").is_file():
                        found.append((app_path.name, version_path.name))
        return found

    def save_static_model(self, model: StaticAppModel) -> Path:
        path = self.app_dir(model.app_id, model.app_version) / "static.model"
        _atomic_write(path, model.to_bytes())
        return path

    def load_static_model(self, app_id: str, version: str) -> StaticAppModel:
        path = self.app_dir(app_id, version) / "static.model"
        if not path.is_file():
            raise NotFoundError(f"no static model for {app_id} {version}")
        return StaticAppModel.from_bytes(path.read_bytes())

    def save_graph(self, graph: EventFlowGraph) -> Path:
        path = self.app_dir(graph.app_id, graph.app_version) / "graph.efg"
        _atomic_write(path, graph.to_bytes())
        return path

    def load_graph(self, app_id: str, version: str) -> EventFlowGraph:
        path = self.app_dir(app_id, version) / "graph.efg"
        if not path.is_file():
            raise NotFoundError(f"no event-flow graph for {app_id} {version}")
        return EventFlowGraph.from_bytes(path.read_bytes())

    def copy_bundle(self, app_id: str, version: str, bundle_root: Path) -> Path:
        """Keep the analyzed bundle next to its products so replay needs
        nothing outside the store."""
        target = self.app_dir(app_id, version) / "bundle"
        if target.exists():
            shutil.rmtree(target)
        shutil.copytree(bundle_root, target)
        return target

    def bundle_path(self, app_id: str, version: str) -> Path:
        path = self.app_dir(app_id, version) / "bundle"
        if not path.is_dir():
            raise NotFoundError(f"no stored bundle for {app_id} {version}")
        return path

    # -- screenshots -----------------------------------------------------

    def put_shot(self, app_id: str, version: str, data: bytes) -> str:
        address = content_address(data)
        path = self.app_dir(app_id, version) / "shots" / f"{address}.svg"
        if not path.is_file():  # idempotent: same bytes, same address
            _atomic_write(path, data)
        return address

    def get_shot(
        self, address: str, app_id: str | None = None, version: str | None = None
    ) -> bytes:
        _check_token(address, "shot address")
        if app_id is not None and version is not None:
            candidates = [self.app_dir(app_id, version) / "shots" / f"{address}.svg"]
        else:
            candidates = sorted(self.root.glob(f"apps/*/*/shots/{address}.svg"))
        for path in candidates:
            if path.is_file():
                return path.read_bytes()
        raise NotFoundError(f"no screenshot {address}")

    # -- drafts ----------------------------------------------------------

    def save_draft(self, doc: dict) -> None:
        draft_id = _check_token(doc["draft_id"], "draft id")
        _atomic_write(self.root / "drafts" / draft_id, canonical_json_bytes(doc))

    def load_draft(self, draft_id: str) -> dict:
        path = self.root / "drafts" / _check_token(draft_id, "draft id")
        if not path.is_file():
            raise NotFoundError(f"no draft {draft_id}")
        return json.loads(path.read_bytes().decode("utf-8"))

    def list_drafts(self) -> list[str]:
        drafts_dir = self.root / "drafts"
        if not drafts_dir.is_dir():
            return []
        return sorted(p.name for p in drafts_dir.iterdir() if p.is_file())

    # -- reports ---------------------------------------------------------

    def next_report_id(self, app_id: str) -> str:
        """Monotonic per store, prefixed by the app id."""
        _check_token(app_id, "app id")
        with self._id_lock:
            highest = 0
            prefix = f"{app_id}-"
            reports_dir = self.root / "reports"
            if reports_dir.is_dir():
                for path in reports_dir.iterdir():
                    if path.name.startswith(prefix):
                        suffix = path.name[len(prefix):]
                        if suffix.isdigit():
                            highest = max(highest, int(suffix))
            return f"{app_id}-{highest + 1}"

    def save_report_bytes(self, report_id: str, data: bytes) -> None:
        _check_token(report_id, "report id")
        _atomic_write(self.root / "reports" / report_id, data)

    def load_report_bytes(self, report_id: str) -> bytes:
        path = self.root / "reports" / _check_token(report_id, "report id")
        if not path.is_file():
            raise NotFoundError(f"no report {report_id}")
        return path.read_bytes()

    def list_reports(self) -> list[str]:
        reports_dir = self.root / "reports"
        if not reports_dir.is_dir():
            return []
        return sorted(p.name for p in reports_dir.iterdir() if p.is_file())
