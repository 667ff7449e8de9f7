"""HTTP API for the report-generation workflow.

All durable state lives in the store, so killing and restarting the process
mid-draft loses nothing.  Drafts are the unit of mutation: the service
serializes writes per draft and persists an idempotency map alongside each
draft, so a retried mutation with the same Idempotency-Key header returns
the recorded response instead of acting twice.

Component references travel in query strings and step payloads as tokens
"<activity>::<resource_id>::<object_index>"; '::' cannot appear in either
name so the encoding is unambiguous.

Error mapping: unknown ids are 404, finalizing twice is 409, and every
validation failure (bad header fields, stale suggestions, out-of-order
steps, unknown render formats) is 422 with machine-readable field errors.
"""

from __future__ import annotations

import secrets
import threading
from datetime import datetime, timezone
from pathlib import Path

from fastapi import Body, FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, JSONResponse

from . import reporting, suggestion
from .errors import (
    DraftValidationError,
    NotFoundError,
    ReproKitError,
    SequencingError,
    StaleSuggestionError,
    UnknownFormatError,
)
from .model import Action, ComponentKey, EventFlowGraph, GridCell
from .primer import StaticAppModel
from .store import Store
from .suggestion import (
    ManualComponent,
    ReportDraft,
    ReproStep,
    ResolvedComponent,
)

TOKEN_SEPARATOR = "::"


def component_token(key: ComponentKey) -> str:
    return TOKEN_SEPARATOR.join(
        (key.activity_name, key.resource_id, str(key.object_index))
    )


def parse_component_token(token: str) -> ComponentKey:
    parts = token.split(TOKEN_SEPARATOR)
    if len(parts) != 3 or not parts[2].isdigit():
        raise DraftValidationError(
            [("component", f"malformed component token {token!r}")]
        )
    return ComponentKey(parts[0], parts[1], int(parts[2]))


class ServiceContext:
    """Store access plus per-draft write serialization and read caches."""

    def __init__(self, store: Store):
        self.store = store
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._graphs: dict[tuple[str, str], EventFlowGraph] = {}
        self._models: dict[tuple[str, str], StaticAppModel] = {}

    def draft_lock(self, draft_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(draft_id, threading.Lock())

    def graph(self, app_id: str, version: str) -> EventFlowGraph:
        key = (app_id, version)
        if key not in self._graphs:
            self._graphs[key] = self.store.load_graph(app_id, version)
        return self._graphs[key]

    def model(self, app_id: str, version: str) -> StaticAppModel:
        key = (app_id, version)
        if key not in self._models:
            self._models[key] = self.store.load_static_model(app_id, version)
        return self._models[key]


def _require(payload: dict, field: str) -> str:
    value = payload.get(field)
    if not isinstance(value, str):
        raise DraftValidationError([(field, "required string field")])
    return value


def _parse_action(doc) -> Action:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise DraftValidationError([("action", "action object with kind required")])
    try:
        return Action.from_doc(doc)
    except (ValueError, KeyError) as exc:
        raise DraftValidationError([("action", str(exc))]) from exc


def _parse_step_payload(payload: dict, step_num: int) -> ReproStep:
    action = _parse_action(payload.get("action"))
    comp_doc = payload.get("component")
    if not isinstance(comp_doc, dict) or "kind" not in comp_doc:
        raise DraftValidationError(
            [("component", "component object with kind required")]
        )
    if comp_doc["kind"] == "resolved":
        if "token" in comp_doc:
            key = parse_component_token(_require(comp_doc, "token"))
        else:
            try:
                key = ComponentKey.from_doc(comp_doc)
            except (KeyError, ValueError) as exc:
                raise DraftValidationError(
                    [("component", f"bad component reference: {exc}")]
                ) from exc
        component = ResolvedComponent(
            component_key=key,
            shot_address=_require(comp_doc, "shot_address"),
        )
    elif comp_doc["kind"] == "manual":
        try:
            location = GridCell.parse(_require(comp_doc, "relative_location"))
        except ValueError as exc:
            raise DraftValidationError(
                [("relative_location", str(exc))]
            ) from exc
        component = ManualComponent(
            component_type=_require(comp_doc, "component_type"),
            text=comp_doc.get("text"),
            relative_location=location,
        )
    else:
        raise DraftValidationError(
            [("component", f"unknown component kind {comp_doc['kind']!r}")]
        )
    explicit = payload.get("step_num")
    if explicit is not None:
        if not isinstance(explicit, int):
            raise DraftValidationError([("step_num", "must be an integer")])
        step_num = explicit
    notes = payload.get("notes", "")
    if not isinstance(notes, str):
        raise DraftValidationError([("notes", "must be a string")])
    return ReproStep(step_num=step_num, action=action, component=component, notes=notes)


def _draft_summary(draft: ReportDraft, doc: dict) -> dict:
    summary = draft.to_doc()
    summary["belief"] = draft.belief.to_doc()
    summary["finalized_report_id"] = doc.get("finalized_report_id")
    return summary


def _candidate_doc(candidate: suggestion.CandidateComponent) -> dict:
    return {
        "label": candidate.label,
        "component_type": candidate.descriptor.component_type,
        "text": candidate.descriptor.text,
        "relative_location": str(candidate.descriptor.relative_location),
        "token": component_token(candidate.component_key),
        "component": candidate.component_key.to_doc(),
        "crop_address": candidate.crop_address,
        "states": [fp.digest for fp in candidate.states],
    }


def create_app(
    store: Store | str | Path, ui_dir: str | Path | None = None
) -> FastAPI:
    if not isinstance(store, Store):
        store = Store(store)
    ctx = ServiceContext(store)
    app = FastAPI(title="reprokit report service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(DraftValidationError)
    async def _invalid(request: Request, exc: DraftValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "detail": str(exc),
                "errors": [{"field": f, "message": m} for f, m in exc.field_errors],
            },
        )

    @app.exception_handler(StaleSuggestionError)
    async def _stale(request: Request, exc: StaleSuggestionError):
        return JSONResponse(
            status_code=422,
            content={
                "detail": str(exc),
                "errors": [{"field": "component", "message": str(exc)}],
            },
        )

    @app.exception_handler(SequencingError)
    async def _sequencing(request: Request, exc: SequencingError):
        return JSONResponse(
            status_code=422,
            content={
                "detail": str(exc),
                "errors": [{"field": "step_num", "message": str(exc)}],
            },
        )

    @app.exception_handler(UnknownFormatError)
    async def _unknown_format(request: Request, exc: UnknownFormatError):
        return JSONResponse(
            status_code=422,
            content={
                "detail": str(exc),
                "errors": [{"field": "format", "message": str(exc)}],
            },
        )

    @app.exception_handler(ReproKitError)
    async def _other(request: Request, exc: ReproKitError):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    def load_draft_pair(draft_id: str) -> tuple[dict, ReportDraft, EventFlowGraph]:
        doc = ctx.store.load_draft(draft_id)
        graph = ctx.graph(doc["app_id"], doc["app_version"])
        return doc, ReportDraft.from_doc(doc, graph), graph

    def replayed_response(doc: dict, token: str | None):
        if token and token in doc.get("idempotency", {}):
            stored = doc["idempotency"][token]
            return JSONResponse(status_code=stored["status"], content=stored["body"])
        return None

    def record_response(doc: dict, token: str | None, status: int, body: dict):
        if token:
            doc.setdefault("idempotency", {})[token] = {
                "status": status,
                "body": body,
            }

    @app.get("/api/apps")
    def list_apps():
        return {
            "apps": [
                {"app_id": app_id, "app_version": version}
                for app_id, version in ctx.store.list_apps()
            ]
        }

    @app.post("/api/reports", status_code=201)
    def create_draft(payload: dict = Body(...)):
        app_id = _require(payload, "app_id")
        version = _require(payload, "app_version")
        graph = ctx.graph(app_id, version)  # 404 for unknown apps
        draft = suggestion.new_draft(
            draft_id=f"d{secrets.token_hex(6)}",
            graph=graph,
            reporter_name=_require(payload, "reporter_name"),
            device=_require(payload, "device"),
            orientation=_require(payload, "orientation"),
            title=_require(payload, "title"),
            description=payload.get("description", ""),
        )
        doc = draft.to_doc()
        doc["created_at"] = datetime.now(timezone.utc).strftime(
            "%Y-%m-%dT%H:%M:%SZ"
        )
        doc["finalized_report_id"] = None
        doc["idempotency"] = {}
        ctx.store.save_draft(doc)
        summary = _draft_summary(draft, doc)
        summary["draft_id"] = draft.draft_id
        return summary

    @app.get("/api/reports/{draft_id}/suggest")
    def suggest(
        draft_id: str,
        kind: str,
        action: str | None = None,
        component: str | None = None,
    ):
        doc, draft, graph = load_draft_pair(draft_id)
        if kind == "actions":
            return {"actions": suggestion.suggest_actions(graph, draft.belief)}
        if kind == "components":
            if not action:
                raise DraftValidationError(
                    [("action", "required for kind=components")]
                )
            candidates = suggestion.suggest_components(graph, draft.belief, action)
            return {"components": [_candidate_doc(c) for c in candidates]}
        if kind == "shots":
            if not action or not component:
                raise DraftValidationError(
                    [("action", "action and component required for kind=shots")]
                )
            key = parse_component_token(component)
            shots = suggestion.candidate_screenshots(
                graph, draft.belief, action, key
            )
            return {
                "shots": [
                    {"state": s.state.digest, "address": s.address} for s in shots
                ]
            }
        if kind == "vocabulary":
            model = ctx.model(doc["app_id"], doc["app_version"])
            return {"types": suggestion.manual_entry_vocabulary(model)}
        raise DraftValidationError(
            [("kind", "must be actions, components, shots, or vocabulary")]
        )

    @app.post("/api/reports/{draft_id}/steps")
    def add_step(draft_id: str, request: Request, payload: dict = Body(...)):
        token = request.headers.get("Idempotency-Key")
        with ctx.draft_lock(draft_id):
            doc, draft, graph = load_draft_pair(draft_id)
            replayed = replayed_response(doc, token)
            if replayed is not None:
                return replayed
            if doc.get("finalized_report_id"):
                return JSONResponse(
                    status_code=409,
                    content={"detail": f"draft {draft_id} is already finalized"},
                )
            step = _parse_step_payload(payload, step_num=len(draft.steps) + 1)
            draft = suggestion.record_step(graph, draft, step)
            new_doc = draft.to_doc()
            new_doc["created_at"] = doc.get("created_at")
            new_doc["finalized_report_id"] = None
            new_doc["idempotency"] = doc.get("idempotency", {})
            body = _draft_summary(draft, new_doc)
            record_response(new_doc, token, 200, body)
            ctx.store.save_draft(new_doc)
            return body

    @app.delete("/api/reports/{draft_id}/steps/{step_num}")
    def remove_step(draft_id: str, step_num: int, request: Request):
        token = request.headers.get("Idempotency-Key")
        with ctx.draft_lock(draft_id):
            doc, draft, graph = load_draft_pair(draft_id)
            replayed = replayed_response(doc, token)
            if replayed is not None:
                return replayed
            if doc.get("finalized_report_id"):
                return JSONResponse(
                    status_code=409,
                    content={"detail": f"draft {draft_id} is already finalized"},
                )
            draft = suggestion.delete_step(graph, draft, step_num)
            new_doc = draft.to_doc()
            new_doc["created_at"] = doc.get("created_at")
            new_doc["finalized_report_id"] = None
            new_doc["idempotency"] = doc.get("idempotency", {})
            body = _draft_summary(draft, new_doc)
            record_response(new_doc, token, 200, body)
            ctx.store.save_draft(new_doc)
            return body

    @app.post("/api/reports/{draft_id}/finalize")
    def finalize_draft(draft_id: str, request: Request):
        token = request.headers.get("Idempotency-Key")
        with ctx.draft_lock(draft_id):
            doc, draft, graph = load_draft_pair(draft_id)
            replayed = replayed_response(doc, token)
            if replayed is not None:
                return replayed
            if doc.get("finalized_report_id"):
                return JSONResponse(
                    status_code=409,
                    content={
                        "detail": f"draft {draft_id} is already finalized as "
                        f"{doc['finalized_report_id']}"
                    },
                )
            model = ctx.model(doc["app_id"], doc["app_version"])
            report_id = ctx.store.next_report_id(doc["app_id"])
            report = reporting.finalize(draft, graph, model, report_id)
            ctx.store.save_report_bytes(
                report_id, reporting.render(report, "structured")
            )
            doc["finalized_report_id"] = report_id
            body = {"report_id": report_id}
            record_response(doc, token, 200, body)
            ctx.store.save_draft(doc)
            return body

    @app.get("/api/reports/{report_id}")
    def get_report(report_id: str, format: str = "structured"):
        try:
            data = ctx.store.load_report_bytes(report_id)
        except NotFoundError:
            # Fall back to a draft summary so the UI can resume a draft.
            doc, draft, _ = load_draft_pair(report_id)
            return _draft_summary(draft, doc)
        report = reporting.parse_structured(data)
        rendered = reporting.render(report, format)
        if format == "web-page":
            return HTMLResponse(content=rendered.decode("utf-8"))
        return Response(content=rendered, media_type="application/json")

    @app.get("/api/shots/{address}")
    def get_shot(address: str):
        if address.endswith(".svg"):
            address = address[: -len(".svg")]
        data = ctx.store.get_shot(address)
        return Response(content=data, media_type="image/svg+xml")

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # Mounted last so /api routes keep precedence.
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
