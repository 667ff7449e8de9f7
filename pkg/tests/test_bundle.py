"""Bundle ingestion: manifest, window files, cross-file checks."""

import pytest

from reprokit.bundle import AppBundle
from reprokit.errors import BundleError, DuplicateIdError, LayoutError
from reprokit.fixtures import MINIDOC_FILES, write_bundle


def write_variant(tmp_path, overrides=None, drop=None):
    files = dict(MINIDOC_FILES)
    for name in drop or ():
        files.pop(name)
    files.update(overrides or {})
    return write_bundle(tmp_path / "bundle", files)


def test_open_minidoc(minidoc_bundle):
    m = minidoc_bundle.manifest
    assert (m.app_id, m.app_version, m.main_activity) == ("minidoc", "1.0", "Main")
    assert m.screen_dims == (1200, 1920)
    assert minidoc_bundle.activities == ("Main", "Viewer")
    assert [w.path for w in minidoc_bundle.windows] == sorted(
        w.path for w in minidoc_bundle.windows
    )
    dialog = minidoc_bundle.window("Main", "w1")
    assert dialog.kind == "layout"
    assert [c.resource_id for c in dialog.components] == ["btn_ok"]
    assert minidoc_bundle.sources_index["btn_go"] == ("src/ViewerScreen.src",)


def test_unknown_window_lookup(minidoc_bundle):
    with pytest.raises(BundleError, match="no window"):
        minidoc_bundle.window("Main", "w9")


def test_missing_directory_and_manifest(tmp_path):
    with pytest.raises(BundleError, match="not found"):
        AppBundle.open(tmp_path / "nope")
    root = write_variant(tmp_path, drop=["manifest.json"])
    with pytest.raises(BundleError, match="missing manifest.json"):
        AppBundle.open(root)


@pytest.mark.parametrize(
    "manifest,match",
    [
        ("{not json", "invalid JSON"),
        ('{"app_version": "1", "main_activity": "Main"}', "app_id"),
        (
            '{"app_id": "", "app_version": "1", "main_activity": "Main",'
            ' "device": {"width": 1, "height": 1}}',
            "app_id",
        ),
        (
            '{"app_id": "x", "app_version": "1", "main_activity": "Main"}',
            "integer width/height",
        ),
        (
            '{"app_id": "x", "app_version": "1", "main_activity": "Main",'
            ' "device": {"width": 0, "height": 100}}',
            "positive",
        ),
    ],
)
def test_bad_manifests(tmp_path, manifest, match):
    root = write_variant(tmp_path, {"manifest.json": manifest})
    with pytest.raises(BundleError, match=match):
        AppBundle.open(root)


def test_window_filename_must_have_activity_and_window(tmp_path):
    root = write_variant(tmp_path, {"layouts/Lonely.xml": "<screen/>"})
    with pytest.raises(LayoutError, match="<activity>.<window>.xml"):
        AppBundle.open(root)
    root2 = write_variant(tmp_path / "b2", {"layouts/A.w0.extra.xml": "<screen/>"})
    with pytest.raises(LayoutError):
        AppBundle.open(root2)


def test_xml_errors_carry_path_and_line(tmp_path):
    root = write_variant(
        tmp_path, {"layouts/Main.w0.xml": "<screen>\n<Button id='x'\n</screen>"}
    )
    with pytest.raises(LayoutError) as exc_info:
        AppBundle.open(root)
    message = str(exc_info.value)
    assert "Main.w0.xml" in message
    assert exc_info.value.line is not None
    assert f":{exc_info.value.line}:" in message


def test_root_element_must_be_screen(tmp_path):
    root = write_variant(tmp_path, {"layouts/Main.w0.xml": "<window/>"})
    with pytest.raises(LayoutError, match="must be <screen>"):
        AppBundle.open(root)


@pytest.mark.parametrize(
    "body,match",
    [
        ('<Button text="x" bounds="0,0,10,10"/>', "missing id"),
        ('<Button id="b"/>', "missing bounds"),
        ('<Button id="b" bounds="0,0,10"/>', "bad bounds"),
        ('<Button id="b" bounds="10,0,10,10"/>', "bad bounds"),
        ('<Button id="b" bounds="0,0,2000,10"/>', "exceed the 1200x1920 screen"),
        ('<Button id="b" bounds="-5,0,10,10"/>', "exceed the 1200x1920 screen"),
        ('<Button id="b" bounds="0,0,10,10" actions="click,grab"/>', "unknown action"),
    ],
)
def test_component_attribute_validation(tmp_path, body, match):
    root = write_variant(
        tmp_path, {"layouts/Main.w0.xml": f"<screen>{body}</screen>"}
    )
    with pytest.raises(LayoutError, match=match):
        AppBundle.open(root)


def test_actions_attribute_parsing(tmp_path):
    root = write_variant(
        tmp_path,
        {
            "layouts/Main.w0.xml": (
                "<screen>"
                '<Button id="btn_open" bounds="0,0,10,10"/>'
                '<Label id="lbl" bounds="0,20,10,30" actions=""/>'
                '<Row id="row" bounds="0,40,10,50" actions="click, long-click"/>'
                "</screen>"
            )
        },
    )
    decl = AppBundle.open(root).window("Main", "w0")
    by_id = {c.resource_id: c.supported_actions for c in decl.components}
    assert by_id["btn_open"] == ("click",)  # the default
    assert by_id["lbl"] == ()  # explicit empty: inert
    assert by_id["row"] == ("click", "long-click")


def test_duplicate_id_within_window(tmp_path):
    root = write_variant(
        tmp_path,
        {
            "layouts/Main.w0.xml": (
                '<screen><Button id="b" bounds="0,0,10,10"/>'
                '<Button id="b" bounds="0,20,10,30"/></screen>'
            )
        },
    )
    with pytest.raises(DuplicateIdError, match="declared twice"):
        AppBundle.open(root)


def test_duplicate_id_across_windows_of_one_activity(tmp_path):
    root = write_variant(
        tmp_path,
        {"layouts/Main.w1.xml": '<screen><Button id="btn_open" bounds="0,0,9,9"/></screen>'},
    )
    with pytest.raises(DuplicateIdError, match="btn_open"):
        AppBundle.open(root)


def test_same_id_in_different_activities_is_fine(tmp_path):
    root = write_variant(
        tmp_path,
        {"layouts/Viewer.w0.xml": '<screen><Button id="btn_open" bounds="0,0,9,9"/></screen>'},
    )
    bundle = AppBundle.open(root)
    assert bundle.window("Viewer", "w0").components[0].resource_id == "btn_open"


def test_main_activity_needs_a_layout(tmp_path):
    root = write_variant(
        tmp_path,
        {
            "manifest.json": MINIDOC_FILES["manifest.json"].replace(
                '"Main"', '"Missing"'
            )
        },
    )
    with pytest.raises(BundleError, match="has no layout"):
        AppBundle.open(root)


def test_menus_share_the_window_schema(tmp_path):
    root = write_variant(
        tmp_path,
        {"menus/Main.overflow.xml": '<screen><MenuItem id="mi_about" text="About" bounds="900,0,1200,80"/></screen>'},
    )
    bundle = AppBundle.open(root)
    decl = bundle.window("Main", "overflow")
    assert decl.kind == "menu"
    assert decl.components[0].component_type == "MenuItem"


def test_sources_index_is_optional_but_validated(tmp_path):
    root = write_variant(tmp_path, drop=["sources/index.json"])
    assert AppBundle.open(root).sources_index == {}
    root2 = write_variant(
        tmp_path / "b2", {"sources/index.json": '{"btn_ok": "not-a-list"}'}
    )
    with pytest.raises(BundleError, match="list of paths"):
        AppBundle.open(root2)
    root3 = write_variant(tmp_path / "b3", {"sources/index.json": "[1]"})
    with pytest.raises(BundleError, match="must be an object"):
        AppBundle.open(root3)
