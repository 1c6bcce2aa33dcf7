"""Deterministic SVG 1.1 emission from a scene tree.

Output is byte-stable: attributes in alphabetical order, numbers at a fixed
precision with trailing zeros trimmed and -0 normalized, one element per
line. Golden-file tests pin the exact bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional
from xml.sax.saxutils import escape, quoteattr

from .errors import NonFiniteError
from .geometry import bbox_of_points
from .layout import Group, Leaf, SceneNode, iter_leaves
from .geometry import sample_primitive

VIEWBOX_MARGIN = 0.05

# Leaf attr name -> SVG attribute name where they differ.
_SVG_ATTR_NAMES = {
    "strokeWidth": "stroke-width",
    "fontSize": "font-size",
    "textAnchor": "text-anchor",
}


@dataclass(frozen=True)
class SvgConfig:
    width: float = 400.0
    height: float = 400.0
    view_box: Optional[tuple[float, float, float, float]] = None
    decimals: int = 4
    background: Optional[str] = None
    annotate: bool = False  # emit data-container-id for UI hit-testing

    def __post_init__(self):
        if not (0 <= self.decimals <= 8):
            raise NonFiniteError(f"decimals {self.decimals} outside [0, 8]")
        if self.width <= 0 or self.height <= 0:
            raise NonFiniteError("canvas width/height must be positive")


def format_number(x: float, decimals: int) -> str:
    """Fixed precision, round-half-even, trailing zeros trimmed, -0 -> 0."""
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise NonFiniteError(f"not a number: {x!r}")
    if not math.isfinite(x):
        raise NonFiniteError(f"cannot format {x!r}")
    s = f"{x:.{decimals}f}"
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    if s in ("-0", ""):
        s = "0"
    return s


def render_svg(scene: SceneNode, cfg: SvgConfig = SvgConfig()) -> bytes:
    fmt = lambda v: format_number(float(v), cfg.decimals)
    vb = cfg.view_box or _default_view_box(scene, cfg)
    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    svg_attrs = {
        "height": fmt(cfg.height),
        "viewBox": " ".join(fmt(v) for v in vb),
        "width": fmt(cfg.width),
        "xmlns": "http://www.w3.org/2000/svg",
    }
    lines.append("<svg " + _attr_string(svg_attrs) + ">")
    if cfg.background:
        bg = {"fill": cfg.background, "height": fmt(vb[3]), "width": fmt(vb[2]),
              "x": fmt(vb[0]), "y": fmt(vb[1])}
        lines.append("<rect " + _attr_string(bg) + "/>")
    _emit(scene, cfg, fmt, lines)
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _default_view_box(scene: SceneNode, cfg: SvgConfig):
    points = []
    for leaf, matrix in iter_leaves(scene):
        points.extend(matrix.apply(p) for p in sample_primitive(leaf.primitive))
    if not points:
        return (0.0, 0.0, cfg.width, cfg.height)
    box = bbox_of_points(points)
    margin = VIEWBOX_MARGIN * max(box.width, box.height, 1.0)
    return (box.min_x - margin, box.min_y - margin,
            box.width + 2 * margin, box.height + 2 * margin)


def _attr_string(attrs: dict) -> str:
    return " ".join(f"{name}={quoteattr(str(attrs[name]))}" for name in sorted(attrs))


def _emit(node: SceneNode, cfg: SvgConfig, fmt, lines: list) -> None:
    if isinstance(node, Group):
        attrs = {}
        if not node.matrix.is_identity():
            attrs["transform"] = _matrix_attr(node.matrix, fmt)
        if cfg.annotate and node.container_id:
            attrs["data-container-id"] = node.container_id
        head = "<g" + (" " + _attr_string(attrs) if attrs else "")
        if not node.children:
            lines.append(head + "/>")
            return
        lines.append(head + ">")
        for child in node.children:
            _emit(child, cfg, fmt, lines)
        lines.append("</g>")
        return
    lines.append(_leaf_markup(node, cfg, fmt))


def _matrix_attr(m, fmt) -> str:
    return "matrix(" + ",".join(fmt(v) for v in m.as_tuple()) + ")"


def _leaf_markup(leaf: Leaf, cfg: SvgConfig, fmt) -> str:
    kind = leaf.primitive.kind
    attrs = {}
    text_content = None
    for name, value in leaf.primitive.attrs.items():
        if kind == "text" and name == "content":
            text_content = str(value)
            continue
        if name == "points":
            attrs["points"] = " ".join(f"{fmt(p[0])},{fmt(p[1])}" for p in value)
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            attrs[_SVG_ATTR_NAMES.get(name, name)] = fmt(value)
        else:
            attrs[_SVG_ATTR_NAMES.get(name, name)] = str(value)
    if not leaf.matrix.is_identity():
        attrs["transform"] = _matrix_attr(leaf.matrix, fmt)
    if cfg.annotate and leaf.container_id:
        attrs["data-container-id"] = leaf.container_id
    if kind == "text":
        return (f"<text {_attr_string(attrs)}>" + escape(text_content or "") + "</text>")
    return f"<{kind} {_attr_string(attrs)}/>"
