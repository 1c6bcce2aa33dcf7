"""SVG subset reader: flattens supported elements into world-space primitives.

Supported: svg, g, rect, circle, polygon, line, path, text, image with
transform attributes of the matrix/translate/scale/rotate forms. Anything
else raises UnsupportedElement naming the tag.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Optional

from .errors import EmptyInputError, MalformedInputError, UnsupportedElementError
from .geometry import AffineMatrix, IDENTITY, compose, rotation_deg, scaling, translation
from .model import COLOR_PATTERN, Primitive

SUPPORTED_TAGS = ("svg", "g", "rect", "circle", "polygon", "line", "path", "text", "image")

# Subset of CSS basic color names; the engine's color model is hex + none.
CSS_BASIC_COLORS = {
    "black": "#000000", "silver": "#c0c0c0", "gray": "#808080", "white": "#ffffff",
    "maroon": "#800000", "red": "#ff0000", "purple": "#800080", "fuchsia": "#ff00ff",
    "green": "#008000", "lime": "#00ff00", "olive": "#808000", "yellow": "#ffff00",
    "navy": "#000080", "blue": "#0000ff", "teal": "#008080", "aqua": "#00ffff",
}

_TRANSFORM_RE = re.compile(r"(matrix|translate|scale|rotate|skewX|skewY)\s*\(([^)]*)\)")
_NUMBER_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")

_STYLE_ATTRS = {"fill": "fill", "stroke": "stroke",
                "stroke-width": "strokeWidth", "opacity": "opacity"}


@dataclass(frozen=True)
class FlatElement:
    primitive: Primitive
    world_matrix: AffineMatrix
    source_id: Optional[str] = None


def parse_transform(text: str) -> AffineMatrix:
    m = IDENTITY
    consumed = 0
    for match in _TRANSFORM_RE.finditer(text or ""):
        consumed += 1
        name = match.group(1)
        args = [float(v) for v in _NUMBER_RE.findall(match.group(2))]
        if name == "matrix" and len(args) == 6:
            part = AffineMatrix(*args)
        elif name == "translate" and 1 <= len(args) <= 2:
            part = translation(args[0], args[1] if len(args) > 1 else 0.0)
        elif name == "scale" and 1 <= len(args) <= 2:
            part = scaling(args[0], args[1] if len(args) > 1 else args[0])
        elif name == "rotate" and len(args) in (1, 3):
            center = (args[1], args[2]) if len(args) == 3 else (0.0, 0.0)
            part = rotation_deg(args[0], center)
        else:
            raise UnsupportedElementError(f"transform {name}({match.group(2)})")
        m = compose(m, part)
    stripped = _TRANSFORM_RE.sub("", text or "").strip(" ,\t\n")
    if stripped:
        raise UnsupportedElementError(f"unparseable transform fragment {stripped!r}")
    return m


def normalize_color(value: str) -> str:
    v = value.strip()
    if v == "none" or COLOR_PATTERN.match(v):
        return v
    low = v.lower()
    if low in CSS_BASIC_COLORS:
        return CSS_BASIC_COLORS[low]
    if re.match(r"^#[0-9a-fA-F]{3}$", v):
        return "#" + "".join(ch * 2 for ch in v[1:])
    raise UnsupportedElementError(f"color {value!r} (hex, 'none' or a basic name)")


def _local_tag(el) -> str:
    return el.tag.rsplit("}", 1)[-1]


def parse_svg(raw: bytes | str) -> list[FlatElement]:
    """Flat elements from an SVG document, document order."""
    text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    if not text.strip():
        raise EmptyInputError("empty SVG input")
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedInputError(f"not well-formed XML: {exc}") from exc
    if _local_tag(root) != "svg":
        raise UnsupportedElementError(f"root element <{_local_tag(root)}>")
    out: list[FlatElement] = []
    _walk(root, IDENTITY, {}, out)
    if not out:
        raise EmptyInputError("SVG contains no drawable elements")
    return out


def _walk(el, matrix: AffineMatrix, style: dict, out: list) -> None:
    tag = _local_tag(el)
    if tag in ("defs", "metadata", "title", "desc"):
        return
    if tag not in SUPPORTED_TAGS:
        raise UnsupportedElementError(f"<{tag}>")
    matrix = compose(matrix, parse_transform(el.get("transform", "")))
    style = dict(style)
    for svg_name, attr in _STYLE_ATTRS.items():
        if el.get(svg_name) is not None:
            style[attr] = el.get(svg_name)
    if tag in ("svg", "g"):
        for child in el:
            _walk(child, matrix, style, out)
        return
    out.append(FlatElement(_element_primitive(tag, el, style), matrix, el.get("id")))


def _element_primitive(tag: str, el, style: dict) -> Primitive:
    get = el.get

    def num(name, default=None):
        v = get(name, default)
        if v is None:
            raise MalformedInputError(f"<{tag}> missing attribute {name!r}")
        return float(v)

    attrs: dict = {}
    if tag == "rect":
        attrs = {"x": num("x", "0"), "y": num("y", "0"),
                 "width": num("width"), "height": num("height")}
    elif tag == "circle":
        attrs = {"cx": num("cx", "0"), "cy": num("cy", "0"), "r": num("r")}
    elif tag == "polygon":
        nums = [float(v) for v in _NUMBER_RE.findall(get("points", ""))]
        if len(nums) < 6 or len(nums) % 2:
            raise MalformedInputError("<polygon> needs at least 3 x,y pairs")
        attrs = {"points": tuple((nums[i], nums[i + 1]) for i in range(0, len(nums), 2))}
    elif tag == "line":
        attrs = {"x1": num("x1", "0"), "y1": num("y1", "0"),
                 "x2": num("x2", "0"), "y2": num("y2", "0")}
    elif tag == "path":
        d = get("d")
        if not d:
            raise MalformedInputError("<path> missing 'd'")
        attrs = {"d": d}
    elif tag == "text":
        attrs = {"x": num("x", "0"), "y": num("y", "0"),
                 "content": "".join(el.itertext()),
                 "fontSize": float(get("font-size", "16"))}
        if get("text-anchor"):
            attrs["textAnchor"] = get("text-anchor")
    elif tag == "image":
        href = get("href") or get("{http://www.w3.org/1999/xlink}href")
        if not href:
            raise MalformedInputError("<image> missing href")
        attrs = {"x": num("x", "0"), "y": num("y", "0"),
                 "width": num("width"), "height": num("height"), "href": href}
    for name in ("fill", "stroke"):
        if name in style:
            attrs[name] = normalize_color(style[name])
    if "strokeWidth" in style:
        attrs["strokeWidth"] = float(style["strokeWidth"])
    if "opacity" in style:
        attrs["opacity"] = float(style["opacity"])
    return Primitive(tag, attrs)
