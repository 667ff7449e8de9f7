"""Command-line entry point.

    reprokit analyze <bundle> [--store DIR] [--max-depth N] [--max-steps N]
    reprokit serve [--store DIR] [--host H] [--port P] [--ui DIR]
    reprokit report render <id> --format F [--out PATH] [--store DIR]
    reprokit report replay <id> [--bundle PATH] [--store DIR]

The store directory comes from --store, else the REPROKIT_STORE environment
variable, else ./store.  Machine-readable output (the coverage line,
rendered reports) goes to stdout; diagnostics go to stderr.

Exit codes: 0 success, 1 error, 2 usage, 3 replay divergence, 4 report not
replayable.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import pipeline, reporting
from .errors import NotReplayableError, ReproKitError
from .ripper import RipConfig
from .simulator import simulate
from .store import Store

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DIVERGENCE = 3
EXIT_NOT_REPLAYABLE = 4

STORE_ENV_VAR = "REPROKIT_STORE"


def _store_root(flag_value: str | None) -> Path:
    if flag_value:
        return Path(flag_value)
    return Path(os.environ.get(STORE_ENV_VAR, "store"))


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def cmd_analyze(args) -> int:
    store = Store(_store_root(args.store))
    try:
        config = RipConfig(max_depth=args.max_depth, max_steps=args.max_steps)
        result = pipeline.analyze(args.bundle, store, config)
    except (ReproKitError, ValueError, OSError) as exc:
        return _fail(str(exc))
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    visited, total = result.coverage
    print(f"{visited}/{total} activities")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    if args.ui and not Path(args.ui).is_dir():
        return _fail(f"ui directory not found: {args.ui}")
    app = create_app(Store(_store_root(args.store)), ui_dir=args.ui)
    config = uvicorn.Config(
        app, host=args.host, port=args.port, log_level="warning"
    )
    server = uvicorn.Server(config)
    try:
        server.run()
    except (OSError, SystemExit) as exc:
        return _fail(f"server stopped: {exc}")
    # started stays false when startup failed (e.g. the port was busy).
    return EXIT_OK if server.started else _fail("server failed to start")


def _load_report(store: Store, report_id: str) -> reporting.BugReport:
    return reporting.parse_structured(store.load_report_bytes(report_id))


def cmd_report_render(args) -> int:
    store = Store(_store_root(args.store))
    try:
        report = _load_report(store, args.id)
        rendered = reporting.render(report, args.format)
    except ReproKitError as exc:
        return _fail(str(exc))
    if args.out:
        Path(args.out).write_bytes(rendered)
    else:
        sys.stdout.buffer.write(rendered)
        sys.stdout.buffer.flush()
    return EXIT_OK


def cmd_report_replay(args) -> int:
    store = Store(_store_root(args.store))
    try:
        report = _load_report(store, args.id)
        graph = store.load_graph(report.app_id, report.app_version)
        bundle_path = (
            Path(args.bundle)
            if args.bundle
            else store.bundle_path(report.app_id, report.app_version)
        )
        script = reporting.to_script(report, graph)
    except NotReplayableError as exc:
        print(f"not replayable: {exc}", file=sys.stderr)
        return EXIT_NOT_REPLAYABLE
    except ReproKitError as exc:
        return _fail(str(exc))

    try:
        driver = simulate(bundle_path)
    except ReproKitError as exc:
        return _fail(str(exc))
    outcome = reporting.replay(script, driver)
    if outcome.status == "success":
        print(f"replay success: {len(script.entries)} steps, "
              f"final state {script.expected_final.digest[:12]}")
        return EXIT_OK
    if outcome.status == "divergence":
        expected = outcome.expected.digest[:12] if outcome.expected else "?"
        observed = outcome.observed.digest[:12] if outcome.observed else "?"
        print(
            f"divergence at step {outcome.step_num}: expected {expected}, "
            f"observed {observed}",
            file=sys.stderr,
        )
        return EXIT_DIVERGENCE
    return _fail(f"driver failure at step {outcome.step_num}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reprokit",
        description="Analyze app bundles and manage replayable bug reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser(
        "analyze", help="run static + dynamic analysis on a bundle"
    )
    p_analyze.add_argument("bundle", help="path to the app bundle directory")
    p_analyze.add_argument("--store", help="store directory")
    p_analyze.add_argument("--max-depth", type=int, default=20)
    p_analyze.add_argument("--max-steps", type=int, default=10_000)
    p_analyze.set_defaults(func=cmd_analyze)

    p_serve = sub.add_parser("serve", help="start the report HTTP service")
    p_serve.add_argument("--store", help="store directory")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument(
        "--ui", help="directory of built web-UI assets to serve at /"
    )
    p_serve.set_defaults(func=cmd_serve)

    p_report = sub.add_parser("report", help="render or replay stored reports")
    report_sub = p_report.add_subparsers(dest="report_command", required=True)

    p_render = report_sub.add_parser("render", help="render a stored report")
    p_render.add_argument("id", help="report id")
    p_render.add_argument(
        "--format", default="structured", help="structured or web-page"
    )
    p_render.add_argument("--out", help="write to this path instead of stdout")
    p_render.add_argument("--store", help="store directory")
    p_render.set_defaults(func=cmd_report_render)

    p_replay = report_sub.add_parser(
        "replay", help="replay a stored report on the simulated device"
    )
    p_replay.add_argument("id", help="report id")
    p_replay.add_argument(
        "--bundle", help="bundle directory (defaults to the stored copy)"
    )
    p_replay.add_argument("--store", help="store directory")
    p_replay.set_defaults(func=cmd_report_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
