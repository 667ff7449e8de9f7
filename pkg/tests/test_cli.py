"""Command-line interface: exit codes, output formats, store resolution."""

import signal
import socket
import subprocess
import sys
import time
from dataclasses import replace
from pathlib import Path

import httpx
import pytest
from pagescan import scan_page

from reprokit.cli import main
from reprokit.fixtures import MINIDOC_FILES, write_bundle
from reprokit.model import Action, ComponentKey, GridCell
from reprokit.pipeline import analyze
from reprokit.reporting import finalize, render
from reprokit.store import Store
from reprokit.suggestion import (
    ManualComponent,
    ReproStep,
    ResolvedComponent,
    candidate_screenshots,
    new_draft,
    record_step,
)

OK = ComponentKey("Main", "btn_ok", 1)
OPEN = ComponentKey("Main", "btn_open", 1)


def analyzed_store(root: Path, bundle_root: Path) -> Store:
    store = Store(root)
    analyze(bundle_root, store)
    return store


def save_report(store: Store, keys=(OK, OPEN), manual=False) -> str:
    graph = store.load_graph("minidoc", "1.0")
    model = store.load_static_model("minidoc", "1.0")
    draft = new_draft(
        draft_id="d1",
        graph=graph,
        reporter_name="Riley",
        device="tablet-1200x1920",
        orientation="portrait",
        title="Viewer loses the page",
        description="",
    )
    for num, key in enumerate(keys, start=1):
        shots = candidate_screenshots(graph, draft.belief, "click", key)
        step = ReproStep(
            step_num=num,
            action=Action("click"),
            component=ResolvedComponent(key, shots[0].address),
        )
        draft = record_step(graph, draft, step)
    if manual:
        step = ReproStep(
            step_num=len(draft.steps) + 1,
            action=Action("click"),
            component=ManualComponent("ImageButton", "star", GridCell.parse("Bottom Right")),
        )
        draft = record_step(graph, draft, step)
    report_id = store.next_report_id("minidoc")
    report = finalize(draft, graph, model, report_id)
    store.save_report_bytes(report_id, render(report, "structured"))
    return report_id


# -- analyze ----------------------------------------------------------------------


def test_analyze_prints_activity_coverage(minidoc_root, tmp_path, capsys):
    code = main(["analyze", str(minidoc_root), "--store", str(tmp_path / "s")])
    assert code == 0
    captured = capsys.readouterr()
    assert captured.out == "2/2 activities\n"
    assert captured.err == ""


def test_analyze_reports_partial_coverage(fiveact_root, tmp_path, capsys):
    code = main(["analyze", str(fiveact_root), "--store", str(tmp_path / "s")])
    assert code == 0
    assert capsys.readouterr().out == "1/5 activities\n"


def test_analyze_reruns_are_byte_identical(minidoc_root, tmp_path, capsys):
    store_root = tmp_path / "s"
    main(["analyze", str(minidoc_root), "--store", str(store_root)])
    app_dir = store_root / "apps" / "minidoc" / "1.0"
    first = {
        name: (app_dir / name).read_bytes()
        for name in ("graph.efg", "static.model")
    }
    shots = sorted(p.name for p in (app_dir / "shots").iterdir())
    main(["analyze", str(minidoc_root), "--store", str(store_root)])
    for name, data in first.items():
        assert (app_dir / name).read_bytes() == data
    assert sorted(p.name for p in (app_dir / "shots").iterdir()) == shots
    capsys.readouterr()


def test_analyze_rejects_malformed_bundle(tmp_path, capsys):
    files = dict(MINIDOC_FILES)
    del files["behavior.model"]
    bundle = write_bundle(tmp_path / "broken", files)
    code = main(["analyze", str(bundle), "--store", str(tmp_path / "s")])
    assert code == 1
    assert capsys.readouterr().err.startswith("error: ")


def test_analyze_rejects_missing_directory(tmp_path, capsys):
    code = main(["analyze", str(tmp_path / "nowhere"), "--store", str(tmp_path / "s")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_store_env_var_is_the_flag_fallback(minidoc_root, tmp_path, monkeypatch, capsys):
    env_store = tmp_path / "from-env"
    monkeypatch.setenv("REPROKIT_STORE", str(env_store))
    monkeypatch.chdir(tmp_path)
    assert main(["analyze", str(minidoc_root)]) == 0
    assert (env_store / "apps" / "minidoc" / "1.0" / "graph.efg").is_file()
    assert not (tmp_path / "store").exists()
    # An explicit flag still wins over the environment.
    assert main(["analyze", str(minidoc_root), "--store", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "apps" / "minidoc" / "1.0" / "graph.efg").is_file()
    capsys.readouterr()


# -- report render ----------------------------------------------------------------


def test_render_structured_to_stdout(minidoc_root, tmp_path, capsysbinary):
    store = analyzed_store(tmp_path / "s", minidoc_root)
    report_id = save_report(store)
    code = main(["report", "render", report_id, "--store", str(tmp_path / "s")])
    assert code == 0
    out = capsysbinary.readouterr().out
    assert out == store.load_report_bytes(report_id)


def test_render_web_page_to_file(minidoc_root, tmp_path, capsys):
    store = analyzed_store(tmp_path / "s", minidoc_root)
    report_id = save_report(store)
    out_path = tmp_path / "report.html"
    code = main([
        "report", "render", report_id,
        "--format", "web-page",
        "--out", str(out_path),
        "--store", str(tmp_path / "s"),
    ])
    assert code == 0
    assert capsys.readouterr().out == ""
    scan = scan_page(out_path.read_bytes())
    assert scan.section_ids == ["preliminary", "steps", "screenshots"]
    assert len(scan.steps) == 2


def test_render_unknown_report_fails(minidoc_root, tmp_path, capsys):
    analyzed_store(tmp_path / "s", minidoc_root)
    code = main(["report", "render", "minidoc-9", "--store", str(tmp_path / "s")])
    assert code == 1
    assert "minidoc-9" in capsys.readouterr().err


def test_render_unknown_format_fails(minidoc_root, tmp_path, capsys):
    store = analyzed_store(tmp_path / "s", minidoc_root)
    report_id = save_report(store)
    code = main([
        "report", "render", report_id, "--format", "pdf",
        "--store", str(tmp_path / "s"),
    ])
    assert code == 1
    assert "pdf" in capsys.readouterr().err


# -- report replay ----------------------------------------------------------------


def test_replay_success_exit_zero(minidoc_root, tmp_path, capsys):
    store = analyzed_store(tmp_path / "s", minidoc_root)
    report_id = save_report(store)
    code = main(["report", "replay", report_id, "--store", str(tmp_path / "s")])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("replay success: 2 steps, final state ")


def test_replay_manual_report_exit_four(minidoc_root, tmp_path, capsys):
    store = analyzed_store(tmp_path / "s", minidoc_root)
    report_id = save_report(store, manual=True)
    code = main(["report", "replay", report_id, "--store", str(tmp_path / "s")])
    assert code == 4
    assert capsys.readouterr().err.startswith("not replayable: ")


def test_replay_divergence_exit_three(minidoc_root, tmp_path, capsys):
    store = analyzed_store(tmp_path / "s", minidoc_root)
    report_id = save_report(store)
    files = dict(MINIDOC_FILES)
    files["behavior.model"] = files["behavior.model"].replace(
        "on main btn_open click -> viewer",
        "on main btn_open click -> main_dialog",
    )
    rerouted = write_bundle(tmp_path / "rerouted", files)
    code = main([
        "report", "replay", report_id,
        "--bundle", str(rerouted),
        "--store", str(tmp_path / "s"),
    ])
    assert code == 3
    assert capsys.readouterr().err.startswith("divergence at step 2: ")


def test_replay_uses_the_stored_bundle_copy(minidoc_root, tmp_path, capsys):
    """Without --bundle the copy made by analyze is enough on its own."""
    store = analyzed_store(tmp_path / "s", minidoc_root)
    report_id = save_report(store)
    model_path = store.bundle_path("minidoc", "1.0") / "behavior.model"
    model_path.write_text(
        model_path.read_text().replace(
            "on main btn_open click -> viewer",
            "on main btn_open click -> main_dialog",
        )
    )
    code = main(["report", "replay", report_id, "--store", str(tmp_path / "s")])
    assert code == 3
    capsys.readouterr()


# -- serve ------------------------------------------------------------------------


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def wait_for(url: str, process, timeout=15.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if process.poll() is not None:
            raise AssertionError(f"server exited early: {process.returncode}")
        try:
            return httpx.get(url, timeout=2.0)
        except httpx.TransportError:
            time.sleep(0.1)
    raise AssertionError("server never came up")


def test_serve_runs_until_terminated(minidoc_root, tmp_path):
    store_root = tmp_path / "s"
    analyzed_store(store_root, minidoc_root)
    port = free_port()
    process = subprocess.Popen(
        [sys.executable, "-m", "reprokit", "serve",
         "--store", str(store_root), "--port", str(port)],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    try:
        response = wait_for(f"http://127.0.0.1:{port}/api/apps", process)
        assert response.status_code == 200
        assert response.json() == {
            "apps": [{"app_id": "minidoc", "app_version": "1.0"}]
        }
    finally:
        process.send_signal(signal.SIGTERM)
        process.wait(timeout=10)
    # uvicorn shuts down gracefully, then re-raises the captured signal so
    # supervisors see it; both exit shapes mean a clean stop.
    assert process.returncode in (0, -signal.SIGTERM)
    assert b"Traceback" not in process.stderr.read()


def test_serve_fails_cleanly_on_busy_port(minidoc_root, tmp_path):
    store_root = tmp_path / "s"
    analyzed_store(store_root, minidoc_root)
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        sock.listen(1)
        port = sock.getsockname()[1]
        process = subprocess.Popen(
            [sys.executable, "-m", "reprokit", "serve",
             "--store", str(store_root), "--port", str(port)],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
        )
        _, err = process.communicate(timeout=30)
    assert process.returncode == 1
    assert b"error:" in err


def test_serve_rejects_missing_ui_directory(tmp_path, capsys):
    code = main([
        "serve", "--store", str(tmp_path / "s"), "--ui", str(tmp_path / "no-ui"),
    ])
    assert code == 1
    assert "ui directory not found" in capsys.readouterr().err


# -- usage ------------------------------------------------------------------------


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["bogus-command"])
    assert exc_info.value.code == 2
    with pytest.raises(SystemExit) as exc_info:
        main([])
    assert exc_info.value.code == 2
    capsys.readouterr()
