"""Canonical JSON serialization for glyph documents.

Canonical form: sorted object keys, no insignificant whitespace, numbers
rendered with up to 6 fractional digits (trailing zeros trimmed, -0
normalized), ASCII-escaped strings. Structurally equal documents therefore
always produce identical bytes, which makes byte equality a usable oracle.
"""

from __future__ import annotations

import json
import math
from dataclasses import replace
from importlib import resources

import jsonschema

from .errors import MalformedInputError, NonFiniteError, SchemaViolationError
from .model import (Arrangement, BasicBody, CompositorBody, Container,
                    CoordinateSystem, DataBinding, Expression, GlyphDocument,
                    LinearScale, Primitive, RepeaterBody, SpatialRelation,
                    Transform, ValueList)

CANONICAL_FRACTION_DIGITS = 6

_schema_cache = None


def load_schema() -> dict:
    global _schema_cache
    if _schema_cache is None:
        text = resources.files("glyphdsl").joinpath("gdsl.schema.json").read_text("utf-8")
        _schema_cache = json.loads(text)
    return _schema_cache


def canonical_number(x) -> str:
    if isinstance(x, bool):
        raise NonFiniteError("booleans are not numbers")
    if isinstance(x, int):
        return str(x)
    if not math.isfinite(x):
        raise NonFiniteError(f"cannot serialize {x!r}")
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    s = f"{x:.{CANONICAL_FRACTION_DIGITS}f}".rstrip("0").rstrip(".")
    if s in ("-0", "", "-"):
        return "0"
    return s


def canonical_dumps(obj) -> str:
    out: list[str] = []
    _write(obj, out)
    return "".join(out)


def _write(obj, out: list) -> None:
    if obj is None:
        out.append("null")
    elif obj is True or obj is False:
        out.append("true" if obj else "false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, (int, float)):
        out.append(canonical_number(obj))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key), ensure_ascii=True))
            out.append(":")
            _write(obj[key], out)
        out.append("}")
    else:
        raise NonFiniteError(f"cannot serialize value of type {type(obj).__name__}")


# --- document <-> plain data ------------------------------------------------

def transform_to_data(t: Transform) -> dict:
    return {
        "translate": list(t.translate),
        "rotate": {"center": list(t.rotate_center), "angleDeg": t.rotate_deg},
        "scale": {"sx": t.scale[0], "sy": t.scale[1]},
    }


def transform_from_data(d: dict) -> Transform:
    return Transform(
        translate=tuple(d.get("translate", (0.0, 0.0))),
        rotate_center=tuple(d.get("rotate", {}).get("center", (0.0, 0.0))),
        rotate_deg=d.get("rotate", {}).get("angleDeg", 0.0),
        scale=(d.get("scale", {}).get("sx", 1.0), d.get("scale", {}).get("sy", 1.0)),
    )


def binding_to_data(b: DataBinding) -> dict:
    if isinstance(b.source, ValueList):
        source = {"type": "values", "values": list(b.source.values)}
    else:
        source = {"type": "expression", "text": b.source.text}
    data = {"attributePath": b.attribute_path, "source": source}
    if b.scale is not None:
        data["scale"] = {"domain": list(b.scale.domain), "range": list(b.scale.range)}
    return data


def binding_from_data(d: dict) -> DataBinding:
    src = d["source"]
    if src["type"] == "values":
        source = ValueList(tuple(src["values"]))
    else:
        source = Expression(src["text"])
    scale = None
    if "scale" in d:
        scale = LinearScale(tuple(d["scale"]["domain"]), tuple(d["scale"]["range"]))
    return DataBinding(d["attributePath"], source, scale)


def arrangement_to_data(arr: Arrangement) -> dict:
    data: dict = {"mode": arr.mode}
    if arr.step is not None:
        data["step"] = list(arr.step)
    if arr.radius is not None:
        data["radius"] = arr.radius
    if arr.start_angle_deg is not None:
        data["startAngleDeg"] = arr.start_angle_deg
    if arr.delta_angle_deg is not None:
        data["deltaAngleDeg"] = arr.delta_angle_deg
    if arr.axis is not None:
        data["axis"] = arr.axis
    if arr.gap is not None:
        data["gap"] = arr.gap
    return data


def arrangement_from_data(d: dict) -> Arrangement:
    return Arrangement(
        mode=d["mode"],
        step=tuple(d["step"]) if "step" in d else None,
        radius=d.get("radius"),
        start_angle_deg=d.get("startAngleDeg"),
        delta_angle_deg=d.get("deltaAngleDeg"),
        axis=d.get("axis"),
        gap=d.get("gap"),
    )


def container_to_data(c: Container) -> dict:
    data: dict = {
        "id": c.id,
        "kind": c.kind,
        "coord": {"kind": c.coord.kind, "origin": list(c.coord.origin)},
        "transform": transform_to_data(c.transform),
        "bindings": [binding_to_data(b) for b in c.bindings],
    }
    if isinstance(c.body, BasicBody):
        attrs = dict(c.body.primitive.attrs)
        if "points" in attrs:
            attrs["points"] = [list(pt) for pt in attrs["points"]]
        data["primitive"] = {"kind": c.body.primitive.kind, "attrs": attrs}
    elif isinstance(c.body, RepeaterBody):
        data["child"] = c.body.child
        data["count"] = c.body.count
        data["arrangement"] = arrangement_to_data(c.body.arrangement)
    else:
        data["children"] = list(c.body.children)
        data["relations"] = [
            {"source": r.source, "target": r.target, "relType": r.rel_type,
             "distance": list(r.distance)}
            for r in c.body.relations
        ]
    return data


def container_from_data(d: dict) -> Container:
    kind = d["kind"]
    if kind == "basic":
        attrs = dict(d["primitive"]["attrs"])
        if "points" in attrs:
            attrs["points"] = tuple(tuple(pt) for pt in attrs["points"])
        body: object = BasicBody(Primitive(d["primitive"]["kind"], attrs))
    elif kind == "repeater":
        body = RepeaterBody(d["child"], d["count"], arrangement_from_data(d["arrangement"]))
    else:
        body = CompositorBody(
            tuple(d["children"]),
            tuple(SpatialRelation(r["source"], r["target"], r["relType"],
                                  tuple(r.get("distance", (0.0, 0.0))))
                  for r in d.get("relations", ())),
        )
    coord = CoordinateSystem(d["coord"]["kind"], tuple(d["coord"]["origin"]))
    return Container(
        id=d["id"],
        body=body,
        coord=coord,
        transform=transform_from_data(d["transform"]),
        bindings=tuple(binding_from_data(b) for b in d.get("bindings", ())),
    )


def doc_to_data(doc: GlyphDocument) -> dict:
    return {
        "root": doc.root,
        "containers": {cid: container_to_data(c) for cid, c in doc.containers.items()},
        "rngSeed": doc.rng_seed,
        "version": doc.version,
    }


def doc_from_data(d: dict) -> GlyphDocument:
    return GlyphDocument(
        root=d.get("root"),
        containers={cid: container_from_data(c) for cid, c in d.get("containers", {}).items()},
        rng_seed=d.get("rngSeed", 0),
        version=d.get("version", 0),
    )


def serialize(doc: GlyphDocument) -> bytes:
    return canonical_dumps(doc_to_data(doc)).encode("utf-8")


def deserialize(raw: bytes | str) -> GlyphDocument:
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInputError("not valid UTF-8", exc.start) from exc
    else:
        text = raw
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(exc.msg, exc.pos) from exc
    try:
        jsonschema.validate(data, load_schema())
    except jsonschema.ValidationError as exc:
        field = "/".join(str(p) for p in exc.absolute_path) or "(document)"
        raise SchemaViolationError(field, exc.message) from None
    return doc_from_data(data)


def structurally_equal(a: GlyphDocument, b: GlyphDocument) -> bool:
    return serialize(a) == serialize(b)


def canonical_quantize(doc: GlyphDocument) -> GlyphDocument:
    """Round-trip through canonical bytes, quantizing every number."""
    return replace(doc_from_data(json.loads(serialize(doc))), version=doc.version)
