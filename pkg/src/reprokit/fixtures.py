"""Writers for the bundles shipped under fixtures/.

The repo keeps the generated files checked in so they can be read by eye
and used from the command line; tests regenerate them into temp dirs and
assert the checked-in copies are identical.

minidoc — the running example: a document viewer whose Main screen opens
with a confirmation dialog (window w1 stacked on w0).  Clicking OK leaves
the dialog; Open Document goes to the Viewer, whose page field accepts
typed input the click-only ripper never fires, leaving a deliberate model
gap to exercise.

fiveact — a coverage probe: five declared activities of which only the
main one is click-reachable, so analysis reports 1/5 activities.
"""

from __future__ import annotations

from pathlib import Path

MINIDOC_FILES = {
    "manifest.json": """\
{
  "app_id": "minidoc",
  "app_version": "1.0",
  "main_activity": "Main",
  "device": {"width": 1200, "height": 1920}
}
""",
    "layouts/Main.w0.xml": """\
<screen>
  <Button id="btn_open" text="Open Document" bounds="440,142,760,242" actions="click"/>
</screen>
""",
    "layouts/Main.w1.xml": """\
<screen>
  <Button id="btn_ok" text="OK" bounds="500,910,700,1010" actions="click"/>
</screen>
""",
    "layouts/Viewer.w0.xml": """\
<screen>
  <EditText id="edit_page" text="Page" bounds="100,300,700,400" actions="click,type"/>
  <Button id="btn_go" text="Go" bounds="750,300,950,400" actions="click"/>
</screen>
""",
    "sources/index.json": """\
{
  "btn_open": ["src/MainScreen.src"],
  "btn_ok": ["src/MainScreen.src"],
  "edit_page": ["src/ViewerScreen.src"],
  "btn_go": ["src/ViewerScreen.src"]
}
""",
    "behavior.model": """\
behavior-model v1

# Launch shows the Main screen with a confirmation dialog stacked on top.
initial main_dialog

state main_dialog activity=Main windows=w0,w1
state main activity=Main windows=w0
state viewer activity=Viewer windows=w0

on main_dialog btn_ok click -> main
on main_dialog btn_open click -> main_dialog
on main btn_open click -> viewer
on viewer edit_page click -> viewer
on viewer edit_page type -> viewer
on viewer btn_go click -> viewer
""",
}

FIVEACT_FILES = {
    "manifest.json": """\
{
  "app_id": "fiveact",
  "app_version": "1.0",
  "main_activity": "Main",
  "device": {"width": 1200, "height": 1920}
}
""",
    "layouts/Main.w0.xml": """\
<screen>
  <Button id="btn_loop" text="Again" bounds="400,900,800,1020" actions="click"/>
</screen>
""",
    "layouts/Archive.w0.xml": """\
<screen>
  <Button id="btn_a" text="List" bounds="100,200,500,320" actions="click"/>
</screen>
""",
    "layouts/Editor.w0.xml": """\
<screen>
  <EditText id="edt_b" text="Title" bounds="100,200,900,320" actions="click,type"/>
</screen>
""",
    "layouts/Settings.w0.xml": """\
<screen>
  <CheckBox id="chk_c" text="Sync" bounds="100,200,500,320" actions="click"/>
</screen>
""",
    "layouts/Sync.w0.xml": """\
<screen>
  <Button id="btn_d" text="Start" bounds="100,200,500,320" actions="click"/>
</screen>
""",
    "behavior.model": """\
behavior-model v1

# Only the main activity is wired up; the other four are never reached.
initial main

state main activity=Main windows=w0

on main btn_loop click -> main
""",
}


def write_bundle(target: str | Path, files: dict[str, str]) -> Path:
    target = Path(target)
    for relative, content in files.items():
        path = target / relative
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
    return target


def write_minidoc_bundle(target: str | Path) -> Path:
    return write_bundle(target, MINIDOC_FILES)


def write_fiveact_bundle(target: str | Path) -> Path:
    return write_bundle(target, FIVEACT_FILES)
