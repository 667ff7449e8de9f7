"""Deterministic screen rendering, highlight augmentation, and cropping.

A screenshot document is SVG 1.1 bytes (UTF-8); its content address is the
lowercase sha256 hex digest of exactly those bytes.  SVG is used instead of
a raster format because byte determinism is a contract here: the same
ScreenState must produce the same bytes on every platform, and the report
web pages can embed the documents without a raster pipeline.

Outputs of render_screen and crop share one fixed document shape (single
<svg> root line, one element per line), which augment and crop rely on:
augment inserts exactly one stroke-only highlight rectangle before the
closing tag, leaving every base byte untouched, and crop rewrites only the
root tag's width/height/viewBox.  Only documents produced by this module
are valid inputs to augment and crop.
"""

from __future__ import annotations

import hashlib
import xml.etree.ElementTree as ET
from xml.sax.saxutils import escape, quoteattr

from .errors import InvalidGeometryError
from .model import Bounds, ComponentDescriptor, ScreenState

HIGHLIGHT_STROKE_WIDTH = 6
HIGHLIGHT_COLOR = "#d4202c"

_SVG_OPEN = (
    '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
    'width="{w}" height="{h}" viewBox="{vx} {vy} {vw} {vh}">'
)


def content_address(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def render_screen(state: ScreenState) -> bytes:
    """Draw the screen border, a caption, and one labeled box per component."""
    w, h = state.screen_dims
    if w <= 0 or h <= 0:
        raise InvalidGeometryError(f"non-positive screen dims {state.screen_dims}")
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        _SVG_OPEN.format(w=w, h=h, vx=0, vy=0, vw=w, vh=h),
        f'<rect class="screen" x="0" y="0" width="{w}" height="{h}" '
        f'fill="#fcfcf8" stroke="#20242c" stroke-width="2"/>',
        f'<text class="caption" x="12" y="30" font-family="sans-serif" '
        f'font-size="20" fill="#20242c">'
        f"{escape(state.activity_name)} / {escape(state.window_id)}</text>",
    ]
    for comp in state.components:
        b = comp.bounds.validate()
        lines.append(
            f'<g class="component" data-id={quoteattr(comp.resource_id)} '
            f"data-type={quoteattr(comp.component_type)} "
            f"data-window={quoteattr(comp.window_id)} "
            f"data-index={quoteattr(str(comp.object_index))}>"
        )
        lines.append(
            f'<rect x="{b.left}" y="{b.top}" width="{b.width}" '
            f'height="{b.height}" fill="#e8eef7" stroke="#3a4a63" '
            f'stroke-width="2"/>'
        )
        cx = (b.left + b.right) // 2
        cy = (b.top + b.bottom) // 2 + 8
        lines.append(
            f'<text x="{cx}" y="{cy}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="24" fill="#10141c">'
            f"{escape(comp.label_text)}</text>"
        )
        lines.append("</g>")
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _viewport(shot: bytes) -> tuple[int, int, int, int]:
    try:
        root = ET.fromstring(shot)
        viewbox = root.get("viewBox")
        parts = [int(p) for p in viewbox.split()]
        if len(parts) != 4:
            raise ValueError(viewbox)
        return tuple(parts)
    except Exception as exc:
        raise InvalidGeometryError(f"not a screenshot document: {exc}") from exc


def _check_in_frame(bounds: Bounds, shot: bytes) -> None:
    bounds.validate()
    vx, vy, vw, vh = _viewport(shot)
    if (
        bounds.left < vx
        or bounds.top < vy
        or bounds.right > vx + vw
        or bounds.bottom > vy + vh
    ):
        raise InvalidGeometryError(
            f"bounds {bounds.as_tuple()} exceed the {vw}x{vh} viewport at "
            f"({vx}, {vy})"
        )


def augment(shot: bytes, component: ComponentDescriptor) -> bytes:
    """Add the single highlight rectangle marking the component's bounds."""
    b = component.bounds
    _check_in_frame(b, shot)
    marker = b"</svg>"
    if not shot.rstrip().endswith(marker):
        raise InvalidGeometryError("not a screenshot document: no closing tag")
    highlight = (
        f'<rect class="highlight" x="{b.left}" y="{b.top}" '
        f'width="{b.width}" height="{b.height}" fill="none" '
        f'stroke="{HIGHLIGHT_COLOR}" stroke-width="{HIGHLIGHT_STROKE_WIDTH}"/>'
    ).encode("utf-8")
    head, tail = shot.rsplit(marker, 1)
    return head + highlight + b"\n" + marker + tail


def crop(shot: bytes, component: ComponentDescriptor) -> bytes:
    """Restrict the document viewport to the component's bounds."""
    b = component.bounds
    _check_in_frame(b, shot)
    open_at = shot.index(b"<svg")
    open_end = shot.index(b">", open_at)
    new_open = _SVG_OPEN.format(
        w=b.width, h=b.height, vx=b.left, vy=b.top, vw=b.width, vh=b.height
    ).encode("utf-8")
    return shot[:open_at] + new_open + shot[open_end + 1 :]
