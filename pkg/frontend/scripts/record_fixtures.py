"""Record live service responses into tests/fixtures/.

The contract tests replay these verbatim, so the UI is checked against
real payloads, not hand-written approximations. Rendering and addressing
are deterministic, so re-recording only changes the random draft id.

Run from the repository root:

    python3 frontend/scripts/record_fixtures.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from reprokit.pipeline import analyze
from reprokit.service import create_app
from reprokit.store import Store

REPO = Path(__file__).resolve().parents[2]
OUT = REPO / "frontend" / "tests" / "fixtures"

HEADER = {
    "app_id": "minidoc",
    "app_version": "1.0",
    "reporter_name": "Riley",
    "device": "tablet-1200x1920",
    "orientation": "portrait",
    "title": "Viewer loses the page",
    "description": "After reopening, the page resets to 1.",
}


def dump(name: str, payload) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / name
    if name.endswith(".json"):
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        path.write_text(payload)
    print(f"recorded {path.relative_to(REPO)}")


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        store = Store(Path(tmp) / "store")
        analyze(REPO / "fixtures" / "minidoc", store)
        client = TestClient(create_app(store))

        dump("apps.json", client.get("/api/apps").json())

        draft = client.post("/api/reports", json=HEADER).json()
        draft_id = draft["draft_id"]
        dump("draft.json", draft)

        suggest = f"/api/reports/{draft_id}/suggest"
        dump("actions.json", client.get(suggest, params={"kind": "actions"}).json())
        components = client.get(
            suggest, params={"kind": "components", "action": "click"}
        ).json()
        dump("components.json", components)
        ok_token = next(
            c["token"]
            for c in components["components"]
            if c["component"]["resource_id"] == "btn_ok"
        )
        shots = client.get(
            suggest,
            params={"kind": "shots", "action": "click", "component": ok_token},
        ).json()
        dump("shots-ok.json", shots)
        dump(
            "vocabulary.json",
            client.get(suggest, params={"kind": "vocabulary"}).json(),
        )

        after = client.post(
            f"/api/reports/{draft_id}/steps",
            json={
                "action": {"kind": "click"},
                "component": {
                    "kind": "resolved",
                    "token": ok_token,
                    "shot_address": shots["shots"][0]["address"],
                },
            },
        ).json()
        dump("after-step1.json", after)
        dump(
            "components-after-step1.json",
            client.get(
                suggest, params={"kind": "components", "action": "click"}
            ).json(),
        )

        report_id = client.post(f"/api/reports/{draft_id}/finalize").json()[
            "report_id"
        ]
        dump("finalize.json", {"report_id": report_id})
        dump(
            "report-page.html",
            client.get(
                f"/api/reports/{report_id}", params={"format": "web-page"}
            ).text,
        )


if __name__ == "__main__":
    main()
