"""Behavior-model parsing and the simulated device contract."""

import pytest

from reprokit.bundle import AppBundle
from reprokit.errors import DriverError, ModelMalformedError
from reprokit.fixtures import MINIDOC_FILES, write_bundle
from reprokit.model import Action, ComponentKey
from reprokit.simulator import (
    APP_EXITED,
    IN_APP,
    OUT_EXTERNAL,
    compose_screen,
    parse_behavior_model,
    simulate,
)


def bundle_with_model(tmp_path, model_text, extra=None):
    files = dict(MINIDOC_FILES)
    files["behavior.model"] = model_text
    files.update(extra or {})
    return AppBundle.open(write_bundle(tmp_path / "bundle", files))


OK = ComponentKey("Main", "btn_ok", 1)
OPEN = ComponentKey("Main", "btn_open", 1)
GO = ComponentKey("Viewer", "btn_go", 1)
PAGE = ComponentKey("Viewer", "edit_page", 1)


# -- parsing ------------------------------------------------------------------


def test_parse_minidoc_model(minidoc_bundle):
    model = parse_behavior_model(minidoc_bundle)
    assert model.initial == "main_dialog"
    assert [s.state_id for s in model.states] == ["main_dialog", "main", "viewer"]
    assert model.state("main_dialog").windows == ("w0", "w1")
    assert model.table[("main_dialog", "btn_ok", "click")] == "main"
    assert model.table[("viewer", "edit_page", "type")] == "viewer"


@pytest.mark.parametrize(
    "text,match",
    [
        ("", "must start with the line"),
        ("behavior-model v2\ninitial a\n", "must start with the line"),
        ("behavior-model v1\n", "declares no initial state"),
        ("behavior-model v1\ninitial ghost\n", "not declared"),
        (
            "behavior-model v1\ninitial a\ninitial b\n",
            "behavior.model:3: duplicate initial",
        ),
        (
            "behavior-model v1\ninitial a\nstate a activity=Main\n",
            "behavior.model:3: usage: state",
        ),
        (
            "behavior-model v1\ninitial a\n"
            "state a activity=Main windows=w0\n"
            "state a activity=Main windows=w0\n",
            "declared twice",
        ),
        (
            "behavior-model v1\ninitial a\nstate a activity=Main windows=\n",
            "at least one window",
        ),
        (
            "behavior-model v1\ninitial a\nstate a activity=Main windows=w0\n"
            "override a ghost text x\n",
            "none of its windows declare",
        ),
        (
            "behavior-model v1\ninitial a\nstate a activity=Main windows=w0\n"
            "override a btn_open color red\n",
            "behavior.model:4: usage: override",
        ),
        (
            "behavior-model v1\ninitial a\nstate a activity=Main windows=w0\n"
            "on a ghost click -> a\n",
            "behavior.model:4: 'a' has no component 'ghost'",
        ),
        (
            "behavior-model v1\ninitial a\nstate a activity=Main windows=w0\n"
            "on a btn_open type -> a\n",
            "does not support 'type'",
        ),
        (
            "behavior-model v1\ninitial a\nstate a activity=Main windows=w0\n"
            "on a btn_open grab -> a\n",
            "unknown action kind 'grab'",
        ),
        (
            "behavior-model v1\ninitial a\nstate a activity=Main windows=w0\n"
            "on a btn_open click -> nowhere\n",
            "undeclared target state 'nowhere'",
        ),
        (
            "behavior-model v1\ninitial a\nstate a activity=Main windows=w0\n"
            "on a btn_open click -> a\non a btn_open click -> a\n",
            "duplicate transition",
        ),
        (
            "behavior-model v1\ninitial a\nstate a activity=Main windows=w0\n"
            "teleport a b\n",
            "unknown directive 'teleport'",
        ),
        (
            'behavior-model v1\ninitial a\nstate a activity=Main windows=w0\n'
            'override a btn_open text "unclosed\n',
            "unparseable line",
        ),
    ],
)
def test_malformed_models(tmp_path, text, match):
    bundle = bundle_with_model(tmp_path, text)
    with pytest.raises(ModelMalformedError, match=match):
        parse_behavior_model(bundle)


def test_state_naming_unknown_window_is_a_bundle_error(tmp_path):
    from reprokit.errors import BundleError

    bundle = bundle_with_model(
        tmp_path, "behavior-model v1\ninitial a\nstate a activity=Main windows=w9\n"
    )
    with pytest.raises(BundleError, match="no window 'w9'"):
        parse_behavior_model(bundle)


def test_missing_model_file(tmp_path):
    files = {k: v for k, v in MINIDOC_FILES.items() if k != "behavior.model"}
    bundle = AppBundle.open(write_bundle(tmp_path / "b", files))
    with pytest.raises(ModelMalformedError, match="no behavior.model"):
        parse_behavior_model(bundle)


def test_comments_blanks_and_quoting(tmp_path):
    bundle = bundle_with_model(
        tmp_path,
        "behavior-model v1\n"
        "# a comment\n"
        "\n"
        "initial a\n"
        "state a activity=Main windows=w0\n"
        'override a btn_open text "Two words"\n',
    )
    model = parse_behavior_model(bundle)
    assert model.state("a").overrides == (("btn_open", "Two words"),)


# -- screen composition -------------------------------------------------------


def test_window_stacking_and_top_window_id(minidoc_bundle):
    behavior = parse_behavior_model(minidoc_bundle)
    stacked = compose_screen(minidoc_bundle, behavior.state("main_dialog"))
    assert stacked.window_id == "w1"  # top of the stack
    assert [c.resource_id for c in stacked.components] == ["btn_open", "btn_ok"]
    base = compose_screen(minidoc_bundle, behavior.state("main"))
    assert base.window_id == "w0"
    assert [c.resource_id for c in base.components] == ["btn_open"]
    assert stacked.fingerprint != base.fingerprint


def test_stacking_renumbers_same_look_components(tmp_path):
    files = dict(MINIDOC_FILES)
    files["layouts/Main.w0.xml"] = (
        '<screen><Button id="btn_open" text="OK" bounds="440,142,760,242"/></screen>'
    )
    bundle = AppBundle.open(write_bundle(tmp_path / "b", files))
    behavior = parse_behavior_model(bundle)
    stacked = compose_screen(bundle, behavior.state("main_dialog"))
    # Both buttons now read Button/"OK"; the dialog copy becomes Option 2.
    assert [(c.resource_id, c.object_index) for c in stacked.components] == [
        ("btn_open", 1),
        ("btn_ok", 2),
    ]


def test_override_rewrites_text_per_state(tmp_path):
    bundle = bundle_with_model(
        tmp_path,
        "behavior-model v1\n"
        "initial a\n"
        "state a activity=Main windows=w0\n"
        "state b activity=Main windows=w0\n"
        "override b btn_open text Reopened\n",
    )
    behavior = parse_behavior_model(bundle)
    a = compose_screen(bundle, behavior.state("a"))
    b = compose_screen(bundle, behavior.state("b"))
    assert a.components[0].text == "Open Document"
    assert b.components[0].text == "Reopened"
    assert a.fingerprint != b.fingerprint


# -- the device ---------------------------------------------------------------


def test_cold_launch_and_screen(minidoc_bundle):
    device = simulate(minidoc_bundle)
    with pytest.raises(DriverError, match="not running"):
        device.current_screen()
    device.launch_app(cold=True)
    screen = device.current_screen()
    assert screen.activity_name == "Main"
    assert screen.window_id == "w1"
    assert not device.at_home()


def test_perform_moves_through_the_table(minidoc_bundle):
    device = simulate(minidoc_bundle)
    device.launch_app(cold=True)
    assert device.perform(Action("click"), OK).kind == IN_APP
    assert device.current_screen().window_id == "w0"
    assert device.perform(Action("click"), OPEN).kind == IN_APP
    assert device.current_screen().activity_name == "Viewer"
    # An unwired action holds the screen.
    before = device.current_screen().fingerprint
    assert device.perform(Action("type", typed_text="9"), PAGE).kind == IN_APP
    assert device.current_screen().fingerprint == before


def test_perform_rejects_bad_requests(minidoc_bundle):
    device = simulate(minidoc_bundle)
    device.launch_app(cold=True)
    with pytest.raises(DriverError, match="no component"):
        device.perform(Action("click"), GO)  # GO is on the Viewer screen
    with pytest.raises(DriverError, match="does not support"):
        device.perform(Action("long-click"), OK)
    log_len = len(device.call_log)
    assert device.call_log[log_len - 1].startswith("perform long-click")


def test_warm_relaunch_keeps_state_cold_resets(minidoc_bundle):
    device = simulate(minidoc_bundle)
    device.launch_app(cold=True)
    device.perform(Action("click"), OK)
    device.launch_app(cold=False)
    assert device.current_screen().window_id == "w0"  # still on "main"
    device.launch_app(cold=True)
    assert device.current_screen().window_id == "w1"  # back to the dialog


def test_external_overlay_blocks_until_back(tmp_path):
    bundle = bundle_with_model(
        tmp_path,
        "behavior-model v1\n"
        "initial a\n"
        "state a activity=Main windows=w0\n"
        "on a btn_open click -> EXTERNAL\n",
    )
    device = simulate(bundle)
    device.launch_app(cold=True)
    outcome = device.perform(Action("click"), OPEN)
    assert outcome.kind == OUT_EXTERNAL
    with pytest.raises(DriverError, match="external app"):
        device.current_screen()
    with pytest.raises(DriverError, match="external app"):
        device.perform(Action("click"), OPEN)
    assert not device.at_home()  # another app is up, not the launcher
    device.press_back()
    assert device.current_screen().activity_name == "Main"


def test_exit_to_home(tmp_path):
    bundle = bundle_with_model(
        tmp_path,
        "behavior-model v1\n"
        "initial a\n"
        "state a activity=Main windows=w0\n"
        "on a btn_open click -> EXIT_TO_HOME\n",
    )
    device = simulate(bundle)
    device.launch_app(cold=True)
    outcome = device.perform(Action("click"), OPEN)
    assert outcome.kind == APP_EXITED
    assert device.at_home()
    with pytest.raises(DriverError, match="not running"):
        device.current_screen()


def test_call_log_records_the_protocol(minidoc_bundle):
    device = simulate(minidoc_bundle)
    device.launch_app(cold=True)
    device.current_screen()
    device.perform(Action("click"), OK)
    device.press_back()
    assert device.call_log == [
        "launch_app cold=True",
        "current_screen",
        "perform click Main::btn_ok::1",
        "press_back",
    ]
