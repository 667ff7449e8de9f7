"""Deterministic SVG rendering, highlight augmentation, cropping."""

import xml.etree.ElementTree as ET
from dataclasses import replace

import pytest

from reprokit.errors import InvalidGeometryError
from reprokit.model import Bounds, ComponentSpec, ScreenState, assign_object_indices
from reprokit.screenshots import (
    HIGHLIGHT_COLOR,
    HIGHLIGHT_STROKE_WIDTH,
    augment,
    content_address,
    crop,
    render_screen,
)

SVG_NS = "{http://www.w3.org/2000/svg}"


def make_state(specs=None, dims=(1200, 1920)):
    if specs is None:
        specs = [
            ("btn_a", "Button", "Save <&> Quit", (100, 200, 500, 330)),
            ("lbl_b", "TextView", None, (100, 400, 900, 470)),
        ]
    return ScreenState(
        activity_name="Act",
        window_id="w0",
        screen_dims=dims,
        components=assign_object_indices(
            [
                ComponentSpec(
                    activity_name="Act",
                    window_id="w0",
                    resource_id=rid,
                    component_type=ctype,
                    text=text,
                    bounds=Bounds(*bounds),
                    supported_actions=("click",),
                )
                for rid, ctype, text, bounds in specs
            ],
            dims,
        ),
    )


def svg_root(data: bytes) -> ET.Element:
    return ET.fromstring(data)


def test_render_is_deterministic_and_addressable():
    state = make_state()
    first, second = render_screen(state), render_screen(state)
    assert first == second
    address = content_address(first)
    assert len(address) == 64 and address == address.lower()


def test_render_shape_and_content():
    state = make_state()
    data = render_screen(state)
    assert data.startswith(b'<?xml version="1.0" encoding="UTF-8"?>\n<svg ')
    assert data.endswith(b"</svg>\n")
    root = svg_root(data)
    assert root.get("width") == "1200"
    assert root.get("viewBox") == "0 0 1200 1920"
    groups = root.findall(f"{SVG_NS}g")
    assert [g.get("data-id") for g in groups] == ["btn_a", "lbl_b"]
    rect = groups[0].find(f"{SVG_NS}rect")
    assert (rect.get("x"), rect.get("y")) == ("100", "200")
    assert (rect.get("width"), rect.get("height")) == ("400", "130")
    label = groups[0].find(f"{SVG_NS}text")
    assert label.text == "Save <&> Quit"  # markup-escaped in the bytes
    assert groups[1].find(f"{SVG_NS}text").text == "lbl_b"  # id fallback
    caption = root.find(f"{SVG_NS}text")
    assert caption.text == "Act / w0"


def test_render_empty_screen_still_has_frame_and_caption():
    data = render_screen(make_state(specs=[]))
    root = svg_root(data)
    assert root.findall(f"{SVG_NS}g") == []
    assert root.find(f"{SVG_NS}rect").get("class") == "screen"


def test_render_distinguishes_states():
    a = render_screen(make_state())
    b = render_screen(
        make_state(specs=[("btn_a", "Button", "Other", (100, 200, 500, 330))])
    )
    assert content_address(a) != content_address(b)


# -- augment ------------------------------------------------------------------


def test_augment_appends_exactly_one_highlight():
    state = make_state()
    base = render_screen(state)
    comp = state.components[0]
    marked = augment(base, comp)
    # Every base byte is preserved; one element is inserted before </svg>.
    assert marked[: len(base) - len(b"</svg>\n")] == base[: -len(b"</svg>\n")]
    assert marked.endswith(b"</svg>\n")
    base_rects = svg_root(base).iter(f"{SVG_NS}rect")
    marked_root = svg_root(marked)
    highlights = [
        r
        for r in marked_root.iter(f"{SVG_NS}rect")
        if r.get("class") == "highlight"
    ]
    assert len(highlights) == 1
    hl = highlights[0]
    assert hl.get("x") == "100" and hl.get("y") == "200"
    assert hl.get("width") == "400" and hl.get("height") == "130"
    assert hl.get("fill") == "none"
    assert hl.get("stroke") == HIGHLIGHT_COLOR
    assert hl.get("stroke-width") == str(HIGHLIGHT_STROKE_WIDTH)
    assert len(list(marked_root.iter(f"{SVG_NS}rect"))) == len(list(base_rects)) + 1


def test_augment_differs_per_component_and_from_base():
    state = make_state()
    base = render_screen(state)
    first = augment(base, state.components[0])
    second = augment(base, state.components[1])
    assert len({content_address(base), content_address(first), content_address(second)}) == 3


def test_augment_rejects_foreign_bytes_and_bad_bounds():
    state = make_state()
    base = render_screen(state)
    with pytest.raises(InvalidGeometryError, match="not a screenshot"):
        augment(b"<html></html>", state.components[0])
    outside = replace(
        state.components[0], bounds=Bounds(1100, 1800, 1300, 1930)
    )
    with pytest.raises(InvalidGeometryError, match="exceed"):
        augment(base, outside)


# -- crop ---------------------------------------------------------------------


def test_crop_rewrites_only_the_viewport():
    state = make_state()
    base = render_screen(state)
    comp = state.components[0]
    cropped = crop(base, comp)
    root = svg_root(cropped)
    assert root.get("width") == "400"
    assert root.get("height") == "130"
    assert root.get("viewBox") == "100 200 400 130"
    # The drawing itself is untouched: same elements inside.
    assert [el.tag for el in root] == [el.tag for el in svg_root(base)]
    tail = base[base.index(b">", base.index(b"<svg")) + 1 :]
    assert cropped.endswith(tail)


def test_crop_is_idempotent_and_stable():
    state = make_state()
    base = render_screen(state)
    comp = state.components[0]
    once = crop(base, comp)
    assert crop(once, comp) == once
    assert content_address(once) == content_address(crop(base, comp))


def test_crop_to_a_sub_rectangle_of_a_crop_must_fit():
    state = make_state()
    base = render_screen(state)
    small, big = state.components[0], state.components[1]
    cropped = crop(base, small)  # viewport is now 100,200 400x130
    with pytest.raises(InvalidGeometryError, match="exceed"):
        crop(cropped, big)


def test_crop_rejects_foreign_bytes():
    state = make_state()
    with pytest.raises(InvalidGeometryError, match="not a screenshot"):
        crop(b"plain text", state.components[0])


def test_augment_then_crop_compose():
    state = make_state()
    comp = state.components[0]
    data = crop(augment(render_screen(state), comp), comp)
    root = svg_root(data)
    assert root.get("viewBox") == "100 200 400 130"
    assert any(r.get("class") == "highlight" for r in root.iter(f"{SVG_NS}rect"))
