"""The five atomic edit operations and linear edit history.

Every operation is transactional: apply() either returns a new valid
document with version+1 or raises, leaving the input untouched (documents
are immutable values, so this holds by construction).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

from . import layout
from .errors import (BadPrimitiveParamsError, DuplicateIdError, EmptyDataError,
                     GlyphError, RelationCycleError,
                     RelationOutsideChildrenError, ReparentConflictError,
                     ReplayDivergenceError, TypeMismatchError,
                     UnknownChildError, UnknownPathError, UnknownTargetError,
                     WouldCreateCycleError)
from .expressions import parse_expression
from .model import (ID_PATTERN, REL_TYPES, REQUIRED_ATTRS, Arrangement,
                    BasicBody, CompositorBody, Container, CoordinateSystem,
                    DataBinding, Expression, GlyphDocument, LinearScale,
                    Primitive, RepeaterBody, SpatialRelation, Transform,
                    ValueList, check_primitive, resolve_attribute_path,
                    set_path)
from .serialize import arrangement_from_data, arrangement_to_data, transform_from_data, transform_to_data

# Positional attrs an operation may omit; shorthand calls list only sizes.
_ATTR_DEFAULTS = {
    "x": 0.0, "y": 0.0, "cx": 0.0, "cy": 0.0,
    "x1": 0.0, "y1": 0.0, "x2": 0.0, "y2": 0.0,
    "fontSize": 16.0,
}


@dataclass(frozen=True)
class CreateBasic:
    id: str
    primitive_kind: str
    params: dict
    coord: CoordinateSystem = CoordinateSystem()
    transform: Transform = Transform()


@dataclass(frozen=True)
class CreateRepeater:
    id: str
    target_id: str
    coord_kind: str
    count: int
    arrangement: Arrangement = Arrangement(mode="uniform")
    origin: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class CreateCompositor:
    id: str
    children: tuple[str, ...]
    relations: tuple[SpatialRelation, ...] = ()


@dataclass(frozen=True)
class ModifyParams:
    target_id: str
    params: dict  # attributePath -> value


@dataclass(frozen=True)
class EncodeData:
    target_id: str
    attribute_path: str
    data: Union[ValueList, Expression]
    scale: Optional[LinearScale] = None


Operation = Union[CreateBasic, CreateRepeater, CreateCompositor, ModifyParams, EncodeData]


@dataclass(frozen=True)
class HistoryEntry:
    op: Operation
    version_before: int
    version_after: int


@dataclass
class EditHistory:
    entries: list = field(default_factory=list)

    def record(self, op: Operation, before: int, after: int) -> None:
        self.entries.append(HistoryEntry(op, before, after))


def apply(doc: GlyphDocument, op: Operation) -> GlyphDocument:
    """Apply one operation, returning a new document with version + 1."""
    if isinstance(op, CreateBasic):
        out = create_basic(doc, op.id, op.primitive_kind, op.params, op.coord, op.transform)
    elif isinstance(op, CreateRepeater):
        out = create_repeater(doc, op.id, op.target_id, op.coord_kind, op.count,
                              op.arrangement, op.origin)
    elif isinstance(op, CreateCompositor):
        out = create_compositor(doc, op.id, op.children, op.relations)
    elif isinstance(op, ModifyParams):
        out = modify_params(doc, op.target_id, op.params)
    elif isinstance(op, EncodeData):
        out = encode_data(doc, op.target_id, op.attribute_path, op.data, op.scale)
    else:
        raise TypeMismatchError(f"unknown operation {op!r}")
    return replace(out, version=doc.version + 1)


def _check_new_id(doc: GlyphDocument, cid: str) -> None:
    if not isinstance(cid, str) or not ID_PATTERN.match(cid or ""):
        raise BadPrimitiveParamsError(f"invalid container id {cid!r}")
    if cid in doc.containers:
        raise DuplicateIdError(f"container {cid!r} already exists")


def create_basic(doc: GlyphDocument, cid: str, kind: str, params: dict,
                 coord: CoordinateSystem = CoordinateSystem(),
                 transform: Transform = Transform()) -> GlyphDocument:
    _check_new_id(doc, cid)
    if kind not in REQUIRED_ATTRS:
        raise BadPrimitiveParamsError(f"unknown primitive kind {kind!r}")
    attrs = dict(params)
    for name in REQUIRED_ATTRS[kind]:
        if name not in attrs and name in _ATTR_DEFAULTS:
            attrs[name] = _ATTR_DEFAULTS[name]
    if kind == "polygon" and "points" in attrs:
        attrs["points"] = tuple(tuple(pt) for pt in attrs["points"])
    primitive = Primitive(kind, attrs)
    problems = check_primitive(primitive)
    if problems:
        raise BadPrimitiveParamsError(f"{cid!r}: " + "; ".join(problems))
    container = Container(id=cid, body=BasicBody(primitive), coord=coord, transform=transform)
    out = doc.with_container(container)
    if doc.root is None:
        out = replace(out, root=cid)
    return out


def _reparent_slot(doc: GlyphDocument, old_child: str, new_child: str) -> GlyphDocument:
    """Replace old_child with new_child in whatever slot holds it."""
    if doc.root == old_child:
        return replace(doc, root=new_child)
    for c in doc.containers.values():
        if isinstance(c.body, RepeaterBody) and c.body.child == old_child:
            return doc.with_container(replace(c, body=replace(c.body, child=new_child)))
        if isinstance(c.body, CompositorBody) and old_child in c.body.children:
            children = tuple(new_child if x == old_child else x for x in c.body.children)
            relations = tuple(
                replace(r,
                        source=new_child if r.source == old_child else r.source,
                        target=new_child if r.target == old_child else r.target)
                for r in c.body.relations)
            return doc.with_container(
                replace(c, body=CompositorBody(children, relations)))
    return doc  # unattached: nothing to do


def create_repeater(doc: GlyphDocument, cid: str, target_id: str, coord_kind: str,
                    count: int, arrangement: Arrangement = Arrangement(mode="uniform"),
                    origin: tuple[float, float] = (0.0, 0.0)) -> GlyphDocument:
    _check_new_id(doc, cid)
    if target_id not in doc.containers:
        raise UnknownTargetError(f"repeat target {target_id!r} does not exist")
    if target_id == cid:
        raise WouldCreateCycleError(f"{cid!r} cannot repeat itself")
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise TypeMismatchError(f"repeat count must be a positive integer, got {count!r}")
    if coord_kind not in ("cartesian", "polar"):
        raise TypeMismatchError(f"unknown coordinate kind {coord_kind!r}")
    arrangement = _fill_arrangement_defaults(doc, target_id, coord_kind, count, arrangement)
    body = RepeaterBody(child=target_id, count=count, arrangement=arrangement)
    container = Container(id=cid, body=body, coord=CoordinateSystem(coord_kind, origin))
    out = _reparent_slot(doc, target_id, cid)
    return out.with_container(container)


def _fill_arrangement_defaults(doc: GlyphDocument, target_id: str, coord_kind: str,
                               count: int, arr: Arrangement) -> Arrangement:
    """Resolve omitted uniform params: polar angle spreads a full turn,
    cartesian step advances by the child's width."""
    if arr.mode == "uniform" and coord_kind == "polar":
        if arr.delta_angle_deg is None:
            arr = replace(arr, delta_angle_deg=360.0 / count)
        if arr.radius is None:
            arr = replace(arr, radius=0.0)
        if arr.start_angle_deg is None:
            arr = replace(arr, start_angle_deg=0.0)
    elif arr.mode == "uniform" and coord_kind == "cartesian" and arr.step is None:
        box = layout.container_bbox(doc, target_id)
        arr = replace(arr, step=(box.width, 0.0))
    elif arr.mode == "stacked" and arr.gap is None:
        arr = replace(arr, gap=0.0)
    return arr


def create_compositor(doc: GlyphDocument, cid: str, children,
                      relations=()) -> GlyphDocument:
    _check_new_id(doc, cid)
    children = tuple(children)
    if not children:
        raise UnknownChildError("compositor needs at least one child")
    if len(set(children)) != len(children):
        raise UnknownChildError("compositor children contain duplicates")
    for child in children:
        if child not in doc.containers:
            raise UnknownChildError(f"child {child!r} does not exist")
        if child == cid:
            raise WouldCreateCycleError(f"{cid!r} cannot contain itself")
    relations = tuple(
        r if isinstance(r, SpatialRelation)
        else SpatialRelation(r["source"], r["target"], r["relType"],
                             tuple(r.get("distance", (0.0, 0.0))))
        for r in relations
    )
    members = set(children)
    for r in relations:
        if r.source not in members or r.target not in members:
            raise RelationOutsideChildrenError(
                f"relation {r.source!r}->{r.target!r} references a non-child")
        if r.source == r.target:
            raise RelationCycleError(f"relation {r.source!r} -> itself")
        if r.rel_type not in REL_TYPES:
            raise TypeMismatchError(f"unknown relation type {r.rel_type!r}")
    _check_relation_graph(relations)

    parents = doc.parent_map()
    attached = [c for c in children if c in parents or c == doc.root]
    if len(attached) > 1:
        raise ReparentConflictError(
            f"children {attached!r} already have parents; detach all but one first")
    container = Container(id=cid, body=CompositorBody(children, relations))
    out = doc
    if attached:
        out = _reparent_slot(out, attached[0], cid)
    return out.with_container(container)


def _check_relation_graph(relations) -> None:
    """Sources depend on targets; that dependency graph must be acyclic."""
    deps: dict[str, set] = {}
    for r in relations:
        deps.setdefault(r.source, set()).add(r.target)
    state: dict[str, int] = {}

    def visit(node: str) -> None:
        if state.get(node) == 2:
            return
        if state.get(node) == 1:
            raise RelationCycleError(f"relation cycle through {node!r}")
        state[node] = 1
        for dep in deps.get(node, ()):
            visit(dep)
        state[node] = 2

    for node in deps:
        visit(node)


# Informal attribute names from shorthand calls -> schema paths.
_PATH_ALIASES = {"repeat count": "body.count", "count": "body.count"}


def _normalize_path(doc: GlyphDocument, c: Container, path: str) -> str:
    try:
        resolve_attribute_path(c, path, child=_child_of(doc, c))
        return path
    except (UnknownPathError, GlyphError):
        pass
    if path in _PATH_ALIASES and isinstance(c.body, RepeaterBody):
        return _PATH_ALIASES[path]
    if "." not in path:
        if isinstance(c.body, BasicBody):
            candidate = f"primitive.{path}"
            try:
                resolve_attribute_path(c, candidate)
                return candidate
            except GlyphError:
                pass
        if isinstance(c.body, RepeaterBody):
            candidate = f"instance.primitive.{path}"
            try:
                resolve_attribute_path(c, candidate, child=_child_of(doc, c))
                return candidate
            except GlyphError:
                pass
    raise UnknownPathError(f"{path!r} on container {c.id!r}")


def _child_of(doc: GlyphDocument, c: Container):
    if isinstance(c.body, RepeaterBody):
        return doc.containers.get(c.body.child)
    return None


def modify_params(doc: GlyphDocument, target_id: str, params: dict) -> GlyphDocument:
    if target_id not in doc.containers:
        raise UnknownTargetError(f"container {target_id!r} does not exist")
    c = doc.containers[target_id]
    resolved = {}
    for path, value in params.items():
        resolved[_normalize_path(doc, c, path)] = value
    # all paths validated before any write: the update is atomic
    for path, value in resolved.items():
        if path.startswith("instance."):
            raise UnknownPathError(
                f"{path!r}: instance paths are set via encode_data, not modify_params")
        c = set_path(c, path, value)
    touched = set(resolved)
    bindings = tuple(b for b in c.bindings if b.attribute_path not in touched)
    return doc.with_container(replace(c, bindings=bindings))


def encode_data(doc: GlyphDocument, target_id: str, attribute_path: str,
                data: Union[ValueList, Expression], scale: Optional[LinearScale] = None
                ) -> GlyphDocument:
    if target_id not in doc.containers:
        raise UnknownTargetError(f"container {target_id!r} does not exist")
    c = doc.containers[target_id]
    path = _normalize_path(doc, c, attribute_path)
    resolve_attribute_path(c, path, child=_child_of(doc, c))
    if isinstance(data, ValueList):
        if not data.values:
            raise EmptyDataError(f"no values for {path!r}")
        data = ValueList(tuple(data.values))
    elif isinstance(data, Expression):
        try:
            parse_expression(data.text)
        except GlyphError as exc:
            raise type(exc)(*exc.args) from None
    else:
        raise TypeMismatchError(f"data must be a value list or expression, got {data!r}")
    binding = DataBinding(path, data, scale)
    bindings = tuple(b for b in c.bindings if b.attribute_path != path) + (binding,)
    return doc.with_container(replace(c, bindings=bindings))


def replay(initial: GlyphDocument, history: EditHistory) -> GlyphDocument:
    """Re-apply a history; raises ReplayDivergence at the first bad entry."""
    doc = initial
    for i, entry in enumerate(history.entries):
        if entry.version_before != doc.version:
            raise ReplayDivergenceError(i, f"expected version {entry.version_before}, "
                                           f"document is at {doc.version}")
        try:
            doc = apply(doc, entry.op)
        except GlyphError as exc:
            raise ReplayDivergenceError(i, str(exc)) from exc
        if doc.version != entry.version_after:
            raise ReplayDivergenceError(i, "version after apply does not match history")
    return doc


# --- operation (de)serialization ---------------------------------------------

def op_to_data(op: Operation) -> dict:
    if isinstance(op, CreateBasic):
        params = dict(op.params)
        if "points" in params:
            params["points"] = [list(p) for p in params["points"]]
        return {"op": "createBasic", "id": op.id, "primitiveKind": op.primitive_kind,
                "params": params,
                "coord": {"kind": op.coord.kind, "origin": list(op.coord.origin)},
                "transform": transform_to_data(op.transform)}
    if isinstance(op, CreateRepeater):
        return {"op": "createRepeater", "id": op.id, "targetId": op.target_id,
                "coordKind": op.coord_kind, "count": op.count,
                "arrangement": arrangement_to_data(op.arrangement),
                "origin": list(op.origin)}
    if isinstance(op, CreateCompositor):
        return {"op": "createCompositor", "id": op.id, "children": list(op.children),
                "relations": [{"source": r.source, "target": r.target,
                               "relType": r.rel_type, "distance": list(r.distance)}
                              for r in op.relations]}
    if isinstance(op, ModifyParams):
        return {"op": "modifyParams", "targetId": op.target_id, "params": dict(op.params)}
    if isinstance(op, EncodeData):
        if isinstance(op.data, ValueList):
            data = {"type": "values", "values": list(op.data.values)}
        else:
            data = {"type": "expression", "text": op.data.text}
        body = {"op": "encodeData", "targetId": op.target_id,
                "attributePath": op.attribute_path, "data": data}
        if op.scale is not None:
            body["scale"] = {"domain": list(op.scale.domain), "range": list(op.scale.range)}
        return body
    raise TypeMismatchError(f"unknown operation {op!r}")


def op_from_data(d: dict) -> Operation:
    kind = d.get("op")
    if kind == "createBasic":
        params = dict(d.get("params", {}))
        if "points" in params:
            params["points"] = tuple(tuple(p) for p in params["points"])
        coord = CoordinateSystem(d.get("coord", {}).get("kind", "cartesian"),
                                 tuple(d.get("coord", {}).get("origin", (0.0, 0.0))))
        transform = transform_from_data(d.get("transform", {}))
        return CreateBasic(d["id"], d["primitiveKind"], params, coord, transform)
    if kind == "createRepeater":
        arr = arrangement_from_data(d["arrangement"]) if "arrangement" in d \
            else Arrangement(mode="uniform")
        return CreateRepeater(d["id"], d["targetId"], d["coordKind"], d["count"], arr,
                              tuple(d.get("origin", (0.0, 0.0))))
    if kind == "createCompositor":
        relations = tuple(SpatialRelation(r["source"], r["target"], r["relType"],
                                          tuple(r.get("distance", (0.0, 0.0))))
                          for r in d.get("relations", ()))
        return CreateCompositor(d["id"], tuple(d["children"]), relations)
    if kind == "modifyParams":
        return ModifyParams(d["targetId"], dict(d["params"]))
    if kind == "encodeData":
        raw = d["data"]
        if isinstance(raw, list):
            data: Union[ValueList, Expression] = ValueList(tuple(raw))
        elif raw.get("type") == "values":
            data = ValueList(tuple(raw["values"]))
        else:
            data = Expression(raw["text"])
        scale = None
        if "scale" in d:
            scale = LinearScale(tuple(d["scale"]["domain"]), tuple(d["scale"]["range"]))
        return EncodeData(d["targetId"], d["attributePath"], data, scale)
    raise TypeMismatchError(f"unknown operation discriminator {kind!r}")
