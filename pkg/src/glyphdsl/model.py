"""The glyph document model: containers, transforms, bindings, validation.

Documents are plain immutable values; every edit produces a new document.
Attribute paths (dot notation such as ``primitive.fill`` or
``instance.scale.sy``) are the single addressing scheme shared by parameter
modification, data binding and the NL command layer.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .errors import PathKindMismatchError, TypeMismatchError, UnknownPathError

Vec = tuple[float, float]

ID_PATTERN = re.compile(r"^[A-Za-z0-9_ -]+$")
COLOR_PATTERN = re.compile(r"^#[0-9a-fA-F]{6}(?:[0-9a-fA-F]{2})?$")

PRIMITIVE_KINDS = ("rect", "circle", "polygon", "line", "path", "text", "image")

REQUIRED_ATTRS = {
    "rect": ("x", "y", "width", "height"),
    "circle": ("cx", "cy", "r"),
    "polygon": ("points",),
    "line": ("x1", "y1", "x2", "y2"),
    "path": ("d",),
    "text": ("x", "y", "content", "fontSize"),
    "image": ("x", "y", "width", "height", "href"),
}
STYLE_ATTRS = ("fill", "stroke", "strokeWidth", "opacity")
EXTRA_OPTIONAL_ATTRS = {"text": ("textAnchor",)}

NUMERIC_ATTRS = frozenset({
    "x", "y", "width", "height", "cx", "cy", "r",
    "x1", "y1", "x2", "y2", "fontSize", "strokeWidth", "opacity",
})
NONNEGATIVE_ATTRS = frozenset({"width", "height", "r", "strokeWidth", "fontSize"})
COLOR_ATTRS = frozenset({"fill", "stroke"})
STRING_ATTRS = frozenset({"d", "content", "href", "textAnchor"})

REL_TYPES = ("top", "bottom", "left", "right", "center")
ARRANGEMENT_MODES = ("uniform", "stacked", "flexible")


@dataclass(frozen=True)
class CoordinateSystem:
    kind: str = "cartesian"  # cartesian | polar
    origin: Vec = (0.0, 0.0)


@dataclass(frozen=True)
class Transform:
    """Scale about the local origin, rotate about ``rotate_center``, translate."""

    translate: Vec = (0.0, 0.0)
    rotate_center: Vec = (0.0, 0.0)
    rotate_deg: float = 0.0
    scale: Vec = (1.0, 1.0)

    def is_identity(self) -> bool:
        return (self.translate == (0.0, 0.0) and self.rotate_deg == 0.0
                and self.scale == (1.0, 1.0))


@dataclass(frozen=True)
class Primitive:
    kind: str
    attrs: dict

    def with_attrs(self, updates: dict) -> "Primitive":
        merged = dict(self.attrs)
        merged.update(updates)
        return Primitive(self.kind, merged)


@dataclass(frozen=True)
class Arrangement:
    mode: str
    step: Optional[Vec] = None            # uniform, cartesian
    radius: Optional[float] = None        # uniform, polar
    start_angle_deg: Optional[float] = None
    delta_angle_deg: Optional[float] = None
    axis: Optional[str] = None            # stacked: "x" | "y"
    gap: Optional[float] = None


@dataclass(frozen=True)
class SpatialRelation:
    source: str
    target: str
    rel_type: str
    distance: Vec = (0.0, 0.0)


@dataclass(frozen=True)
class ValueList:
    values: tuple


@dataclass(frozen=True)
class Expression:
    text: str


@dataclass(frozen=True)
class LinearScale:
    domain: tuple[float, float]
    range: tuple[float, float]


@dataclass(frozen=True)
class DataBinding:
    attribute_path: str
    source: Union[ValueList, Expression]
    scale: Optional[LinearScale] = None


@dataclass(frozen=True)
class BasicBody:
    primitive: Primitive


@dataclass(frozen=True)
class RepeaterBody:
    child: str
    count: int
    arrangement: Arrangement


@dataclass(frozen=True)
class CompositorBody:
    children: tuple[str, ...]
    relations: tuple[SpatialRelation, ...] = ()


Body = Union[BasicBody, RepeaterBody, CompositorBody]


@dataclass(frozen=True)
class Container:
    id: str
    body: Body
    coord: CoordinateSystem = CoordinateSystem()
    transform: Transform = Transform()
    bindings: tuple[DataBinding, ...] = ()

    @property
    def kind(self) -> str:
        if isinstance(self.body, BasicBody):
            return "basic"
        if isinstance(self.body, RepeaterBody):
            return "repeater"
        return "compositor"

    def child_ids(self) -> tuple[str, ...]:
        if isinstance(self.body, RepeaterBody):
            return (self.body.child,)
        if isinstance(self.body, CompositorBody):
            return self.body.children
        return ()


@dataclass(frozen=True)
class GlyphDocument:
    root: Optional[str] = None
    containers: dict = field(default_factory=dict)
    rng_seed: int = 0
    version: int = 0

    def container(self, cid: str) -> Container:
        return self.containers[cid]

    def with_container(self, c: Container) -> "GlyphDocument":
        containers = dict(self.containers)
        containers[c.id] = c
        return replace(self, containers=containers)

    def parent_map(self) -> dict:
        parents: dict[str, str] = {}
        for c in self.containers.values():
            for child in c.child_ids():
                parents.setdefault(child, c.id)
        return parents

    def reachable(self) -> set:
        seen: set[str] = set()
        stack = [self.root] if self.root in self.containers else []
        while stack:
            cid = stack.pop()
            if cid in seen or cid not in self.containers:
                continue
            seen.add(cid)
            stack.extend(self.containers[cid].child_ids())
        return seen


@dataclass(frozen=True)
class Violation:
    container_id: str
    rule: str
    message: str
    severity: str = "error"  # error | warning


def empty_document(rng_seed: int = 0) -> GlyphDocument:
    return GlyphDocument(root=None, containers={}, rng_seed=rng_seed, version=0)


# --- primitive validation ---------------------------------------------------

def check_primitive(p: Primitive) -> list[str]:
    """Problems with a primitive's shape and attribute values, as messages."""
    problems: list[str] = []
    if p.kind not in PRIMITIVE_KINDS:
        return [f"unknown primitive kind {p.kind!r}"]
    allowed = set(REQUIRED_ATTRS[p.kind]) | set(STYLE_ATTRS)
    allowed |= set(EXTRA_OPTIONAL_ATTRS.get(p.kind, ()))
    for name in REQUIRED_ATTRS[p.kind]:
        if name not in p.attrs:
            problems.append(f"missing required attr {name!r}")
    for name, value in p.attrs.items():
        if name not in allowed:
            problems.append(f"attr {name!r} not valid for kind {p.kind!r}")
            continue
        problems.extend(check_attr_value(name, value))
    return problems


def check_attr_value(name: str, value) -> list[str]:
    if name == "points":
        if (not isinstance(value, (list, tuple)) or len(value) < 3
                or not all(_is_vec(pt) for pt in value)):
            return ["points must be a list of at least 3 [x, y] pairs"]
        return []
    if name in NUMERIC_ATTRS:
        if not _is_number(value):
            return [f"attr {name!r} must be a number"]
        if not math.isfinite(float(value)):
            return [f"attr {name!r} must be finite"]
        if name in NONNEGATIVE_ATTRS and value < 0:
            return [f"attr {name!r} must be >= 0"]
        if name == "opacity" and not (0 <= value <= 1):
            return ["opacity must be within [0, 1]"]
        return []
    if name in COLOR_ATTRS:
        if value == "none" or (isinstance(value, str) and COLOR_PATTERN.match(value)):
            return []
        return [f"attr {name!r} must be #RRGGBB, #RRGGBBAA or 'none'"]
    if name in STRING_ATTRS:
        if not isinstance(value, str):
            return [f"attr {name!r} must be a string"]
        if name == "textAnchor" and value not in ("start", "middle", "end"):
            return ["textAnchor must be start, middle or end"]
        return []
    return [f"unknown attr {name!r}"]


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_vec(v) -> bool:
    return (isinstance(v, (list, tuple)) and len(v) == 2
            and all(_is_number(x) and math.isfinite(float(x)) for x in v))


def check_arrangement(arr: Arrangement, coord_kind: str) -> list[str]:
    problems: list[str] = []
    if arr.mode not in ARRANGEMENT_MODES:
        return [f"unknown arrangement mode {arr.mode!r}"]
    present = {name for name in ("step", "radius", "start_angle_deg",
                                 "delta_angle_deg", "axis", "gap")
               if getattr(arr, name) is not None}
    if arr.mode == "uniform":
        if coord_kind == "cartesian":
            if arr.step is None or not _is_vec(arr.step):
                problems.append("uniform cartesian arrangement requires a step vector")
            allowed = {"step"}
        else:
            if arr.radius is None or not _is_number(arr.radius) or arr.radius < 0:
                problems.append("uniform polar arrangement requires radius >= 0")
            if arr.delta_angle_deg is None or not _is_number(arr.delta_angle_deg) \
                    or not math.isfinite(float(arr.delta_angle_deg)):
                problems.append("uniform polar arrangement requires finite deltaAngleDeg")
            allowed = {"radius", "start_angle_deg", "delta_angle_deg"}
    elif arr.mode == "stacked":
        if coord_kind != "cartesian":
            problems.append("stacked arrangement is only supported in cartesian coordinates")
        if arr.axis not in ("x", "y"):
            problems.append("stacked arrangement requires axis 'x' or 'y'")
        if arr.gap is None or not _is_number(arr.gap):
            problems.append("stacked arrangement requires a gap")
        allowed = {"axis", "gap"}
    else:
        allowed = set()
    for name in sorted(present - allowed):
        problems.append(f"arrangement param {name!r} does not belong to "
                        f"{arr.mode} in {coord_kind} coordinates")
    return problems


# --- document validation ----------------------------------------------------

def validate_document(doc: GlyphDocument) -> list[Violation]:
    """All invariant violations in a document; warnings for unattached trees.

    Total: never raises, any structurally well-typed document produces a
    (possibly empty) violation list.
    """
    out: list[Violation] = []
    add = out.append

    for cid, c in doc.containers.items():
        if not isinstance(cid, str) or not ID_PATTERN.match(cid or ""):
            add(Violation(str(cid), "BadId", f"id {cid!r} is empty or has invalid characters"))
        if c.id != cid:
            add(Violation(str(cid), "IdMismatch", f"registry key {cid!r} != container id {c.id!r}"))

    if doc.root is not None and doc.root not in doc.containers:
        add(Violation(str(doc.root), "DanglingReference", f"root {doc.root!r} not in containers"))
    if doc.root is None and doc.containers:
        add(Violation("", "RootMissing", "document has containers but no root"))

    seen_child_parent: dict[str, str] = {}
    for cid, c in doc.containers.items():
        for ref in c.child_ids():
            if ref not in doc.containers:
                add(Violation(cid, "DanglingReference", f"child {ref!r} does not exist"))
        if isinstance(c.body, RepeaterBody):
            if c.body.count < 1:
                add(Violation(cid, "BadCount", f"repeat count {c.body.count} < 1"))
            for msg in check_arrangement(c.body.arrangement, c.coord.kind):
                add(Violation(cid, "BadArrangement", msg))
        if isinstance(c.body, CompositorBody):
            if not c.body.children:
                add(Violation(cid, "EmptyCompositor", "compositor has no children"))
            if len(set(c.body.children)) != len(c.body.children):
                add(Violation(cid, "DuplicateChild", "compositor children contain duplicates"))
            members = set(c.body.children)
            for rel in c.body.relations:
                if rel.source == rel.target:
                    add(Violation(cid, "SelfRelation", f"relation {rel.source!r} -> itself"))
                if rel.source not in members or rel.target not in members:
                    add(Violation(cid, "RelationOutsideChildren",
                                  f"relation {rel.source!r}->{rel.target!r} references a non-child"))
                if rel.rel_type not in REL_TYPES:
                    add(Violation(cid, "BadRelation", f"unknown relation type {rel.rel_type!r}"))
        if isinstance(c.body, BasicBody):
            for msg in check_primitive(c.body.primitive):
                add(Violation(cid, "BadPrimitiveParams", msg))
        sx, sy = c.transform.scale
        if sx == 0 or sy == 0:
            add(Violation(cid, "DegenerateScale", f"scale ({sx}, {sy}) has a zero component"))
        for child in c.child_ids():
            if child in seen_child_parent and seen_child_parent[child] != cid:
                add(Violation(child, "MultipleParents",
                              f"contained by both {seen_child_parent[child]!r} and {cid!r}"))
            seen_child_parent.setdefault(child, cid)

        seen_paths: set[str] = set()
        for b in c.bindings:
            if b.attribute_path in seen_paths:
                add(Violation(cid, "DuplicateBindingPath",
                              f"path {b.attribute_path!r} bound more than once"))
            seen_paths.add(b.attribute_path)
            if b.attribute_path.startswith("instance.") and not isinstance(c.body, RepeaterBody):
                add(Violation(cid, "InstancePathOnNonRepeater",
                              f"{b.attribute_path!r} is only valid on repeaters"))
                continue
            try:
                child = None
                if b.attribute_path.startswith("instance.") and isinstance(c.body, RepeaterBody):
                    child = doc.containers.get(c.body.child)
                resolve_attribute_path(c, b.attribute_path, child=child)
            except (UnknownPathError, PathKindMismatchError) as exc:
                add(Violation(cid, "BadBindingPath", str(exc)))

    out.extend(_cycle_violations(doc))

    if doc.root in doc.containers:
        reachable = doc.reachable()
        for cid in sorted(doc.containers):
            if cid not in reachable:
                add(Violation(cid, "UnattachedContainer",
                              "not reachable from the root", severity="warning"))
    return out


def _cycle_violations(doc: GlyphDocument) -> list[Violation]:
    out = []
    state: dict[str, int] = {}  # 1 = in progress, 2 = done

    def visit(cid: str, trail: tuple) -> None:
        if state.get(cid) == 2 or cid not in doc.containers:
            return
        if state.get(cid) == 1:
            cycle = trail[trail.index(cid):] + (cid,)
            out.append(Violation(cid, "CycleDetected", " -> ".join(cycle)))
            return
        state[cid] = 1
        for child in doc.containers[cid].child_ids():
            visit(child, trail + (cid,))
        state[cid] = 2

    for cid in sorted(doc.containers):
        visit(cid, ())
    return out


def is_valid(doc: GlyphDocument) -> bool:
    return not any(v.severity == "error" for v in validate_document(doc))


# --- attribute paths --------------------------------------------------------

TRANSFORM_PATHS = (
    "translate.x", "translate.y",
    "rotate.angleDeg", "rotate.center.x", "rotate.center.y",
    "scale.sx", "scale.sy", "scale.sx+sy",
)


@dataclass(frozen=True)
class AttributeSlot:
    """Read/write handle for one attribute path on a container."""

    container_id: str
    path: str
    per_instance: bool = False

    def get(self, c: Container):
        return get_path(c, self.path)

    def set(self, c: Container, value) -> Container:
        return set_path(c, self.path, value)


def resolve_attribute_path(c: Container, path: str, *,
                           child: Container | None = None) -> AttributeSlot:
    """Check that ``path`` addresses a real attribute of ``c``.

    ``instance.*`` paths are only valid on repeaters and resolve the rest of
    the path against the repeater's child when it is supplied; transform
    paths on the instance need no child.
    """
    if path.startswith("instance."):
        if not isinstance(c.body, RepeaterBody):
            raise PathKindMismatchError(
                f"{path!r} on {c.kind} container {c.id!r} (instance paths need a repeater)")
        rest = path[len("instance."):]
        if rest in TRANSFORM_PATHS:
            return AttributeSlot(c.id, path, per_instance=True)
        if child is not None:
            resolve_attribute_path(child, rest)
            return AttributeSlot(c.id, path, per_instance=True)
        # child not at hand: accept syntactically plausible static paths
        head = rest.split(".", 1)[0]
        if head in ("primitive", "body", "arrangement", "translate", "rotate", "scale"):
            return AttributeSlot(c.id, path, per_instance=True)
        raise UnknownPathError(f"{path!r} on container {c.id!r}")

    if path in TRANSFORM_PATHS:
        return AttributeSlot(c.id, path)
    parts = path.split(".")
    if parts[0] == "primitive":
        if not isinstance(c.body, BasicBody):
            raise PathKindMismatchError(f"{path!r} on {c.kind} container {c.id!r}")
        if len(parts) != 2:
            raise UnknownPathError(f"{path!r} on container {c.id!r}")
        attr = parts[1]
        kind = c.body.primitive.kind
        allowed = set(REQUIRED_ATTRS[kind]) | set(STYLE_ATTRS) | set(EXTRA_OPTIONAL_ATTRS.get(kind, ()))
        if attr not in allowed:
            raise UnknownPathError(f"primitive kind {kind!r} has no attr {attr!r}")
        return AttributeSlot(c.id, path)
    if path == "body.count":
        if not isinstance(c.body, RepeaterBody):
            raise PathKindMismatchError(f"{path!r} on {c.kind} container {c.id!r}")
        return AttributeSlot(c.id, path)
    if parts[0] == "arrangement":
        if not isinstance(c.body, RepeaterBody):
            raise PathKindMismatchError(f"{path!r} on {c.kind} container {c.id!r}")
        valid = _arrangement_paths(c.body.arrangement.mode, c.coord.kind)
        if path not in valid:
            raise UnknownPathError(
                f"{path!r} not valid for {c.body.arrangement.mode} arrangement "
                f"in {c.coord.kind} coordinates")
        return AttributeSlot(c.id, path)
    raise UnknownPathError(f"{path!r} on container {c.id!r}")


def _arrangement_paths(mode: str, coord_kind: str) -> tuple[str, ...]:
    if mode == "uniform" and coord_kind == "cartesian":
        return ("arrangement.step.x", "arrangement.step.y")
    if mode == "uniform":
        return ("arrangement.radius", "arrangement.startAngleDeg", "arrangement.deltaAngleDeg")
    if mode == "stacked":
        return ("arrangement.axis", "arrangement.gap")
    return ()


def get_path(c: Container, path: str):
    t = c.transform
    simple = {
        "translate.x": t.translate[0], "translate.y": t.translate[1],
        "rotate.angleDeg": t.rotate_deg,
        "rotate.center.x": t.rotate_center[0], "rotate.center.y": t.rotate_center[1],
        "scale.sx": t.scale[0], "scale.sy": t.scale[1], "scale.sx+sy": t.scale[0],
    }
    if path in simple:
        return simple[path]
    parts = path.split(".")
    if parts[0] == "primitive" and isinstance(c.body, BasicBody):
        return c.body.primitive.attrs.get(parts[1])
    if path == "body.count" and isinstance(c.body, RepeaterBody):
        return c.body.count
    if parts[0] == "arrangement" and isinstance(c.body, RepeaterBody):
        arr = c.body.arrangement
        return {
            "arrangement.step.x": arr.step[0] if arr.step else None,
            "arrangement.step.y": arr.step[1] if arr.step else None,
            "arrangement.radius": arr.radius,
            "arrangement.startAngleDeg": arr.start_angle_deg,
            "arrangement.deltaAngleDeg": arr.delta_angle_deg,
            "arrangement.axis": arr.axis,
            "arrangement.gap": arr.gap,
        }.get(path)
    raise UnknownPathError(f"{path!r} on container {c.id!r}")


def set_path(c: Container, path: str, value) -> Container:
    """A copy of ``c`` with one attribute updated; raises on type errors."""
    resolve_attribute_path(c, path)
    t = c.transform
    if path in TRANSFORM_PATHS:
        v = _require_number(path, value)
        if path == "translate.x":
            t = replace(t, translate=(v, t.translate[1]))
        elif path == "translate.y":
            t = replace(t, translate=(t.translate[0], v))
        elif path == "rotate.angleDeg":
            t = replace(t, rotate_deg=v)
        elif path == "rotate.center.x":
            t = replace(t, rotate_center=(v, t.rotate_center[1]))
        elif path == "rotate.center.y":
            t = replace(t, rotate_center=(t.rotate_center[0], v))
        elif path == "scale.sx":
            t = replace(t, scale=(v, t.scale[1]))
        elif path == "scale.sy":
            t = replace(t, scale=(t.scale[0], v))
        else:  # scale.sx+sy: uniform
            t = replace(t, scale=(v, v))
        return replace(c, transform=t)

    parts = path.split(".")
    if parts[0] == "primitive":
        attr = parts[1]
        problems = check_attr_value(attr, value)
        if problems:
            raise TypeMismatchError(f"{path!r}: {problems[0]}")
        body = BasicBody(c.body.primitive.with_attrs({attr: value}))
        return replace(c, body=body)
    if path == "body.count":
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise TypeMismatchError(f"{path!r}: count must be a positive integer")
        return replace(c, body=replace(c.body, count=value))
    if parts[0] == "arrangement":
        arr = c.body.arrangement
        if path == "arrangement.axis":
            if value not in ("x", "y"):
                raise TypeMismatchError("axis must be 'x' or 'y'")
            arr = replace(arr, axis=value)
        else:
            v = _require_number(path, value)
            if path == "arrangement.step.x":
                arr = replace(arr, step=(v, arr.step[1] if arr.step else 0.0))
            elif path == "arrangement.step.y":
                arr = replace(arr, step=(arr.step[0] if arr.step else 0.0, v))
            elif path == "arrangement.radius":
                if v < 0:
                    raise TypeMismatchError("radius must be >= 0")
                arr = replace(arr, radius=v)
            elif path == "arrangement.startAngleDeg":
                arr = replace(arr, start_angle_deg=v)
            elif path == "arrangement.deltaAngleDeg":
                arr = replace(arr, delta_angle_deg=v)
            elif path == "arrangement.gap":
                arr = replace(arr, gap=v)
        return replace(c, body=replace(c.body, arrangement=arr))
    raise UnknownPathError(f"{path!r} on container {c.id!r}")


def _require_number(path: str, value) -> float:
    if not _is_number(value) or not math.isfinite(float(value)):
        raise TypeMismatchError(f"{path!r}: expected a finite number, got {value!r}")
    return float(value)
