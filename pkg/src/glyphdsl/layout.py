"""Scene instantiation: repeaters expand, bindings materialize, compositor
anchor constraints solve, producing a flat tree of groups and primitives.

Per-instance data follows two routes that the expansion unifies:
``instance.*`` bindings on a repeater act on each instance (transform paths
feed the instance transform, other paths override the child's attributes),
while a binding on any container's own path is indexed by the nearest
enclosing repeater instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import geometry
from .errors import (MissingPrevBBoxError, OverConstrainedError,
                     RelationCycleError, UnsupportedArrangementError)
from .expressions import RandomStream, binding_stream, materialize_binding
from .geometry import (AffineMatrix, BBox, IDENTITY, anchor_point, compose,
                       node_bbox, rotation_deg, to_matrix, translation)
from .model import (Arrangement, BasicBody, CompositorBody, Container,
                    CoordinateSystem, GlyphDocument, RepeaterBody, Transform,
                    TRANSFORM_PATHS, set_path)

# source/target bbox anchors per relation type, y-down
RELATION_ANCHORS = {
    "top": ("bottomCenter", "topCenter"),
    "bottom": ("topCenter", "bottomCenter"),
    "left": ("rightCenter", "leftCenter"),
    "right": ("leftCenter", "rightCenter"),
    "center": ("center", "center"),
}

OVERCONSTRAINED_TOL = 1e-6


@dataclass(frozen=True)
class Group:
    name: str
    matrix: AffineMatrix
    children: tuple
    container_id: str = ""


@dataclass(frozen=True)
class Leaf:
    primitive: object
    matrix: AffineMatrix
    container_id: str = ""


SceneNode = Group | Leaf


def _with_matrix(node: SceneNode, outer: AffineMatrix) -> SceneNode:
    if outer.is_identity():
        return node
    return replace(node, matrix=compose(outer, node.matrix))


class _Context:
    """Carries the nearest enclosing repeater's (index, count) and the
    materialized-binding cache during one instantiation pass."""

    def __init__(self, doc: GlyphDocument):
        self.doc = doc
        self.index = 0
        self.count = 1
        self._cache: dict = {}

    def materialized(self, container_id: str, binding, count: int) -> list:
        key = (container_id, binding.attribute_path, count)
        if key not in self._cache:
            rng = binding_stream(self.doc.rng_seed, container_id, binding.attribute_path)
            self._cache[key] = materialize_binding(binding, count, rng)
        return self._cache[key]


def instance_transform(arr: Arrangement, coord: CoordinateSystem, i: int,
                       prev_bboxes: list | None = None,
                       instance_data: dict | None = None) -> Transform:
    """Placement of instance ``i``: the arrangement contributes position,
    per-instance transform data fills the remaining slots.

    For stacked arrangements ``prev_bboxes`` holds the already placed
    instance bounds 0..i-1 plus, at position i, the unplaced bound of the
    current instance.
    """
    data = dict(instance_data or {})
    scale = (float(data.pop("scale.sx", data.get("scale.sx+sy", 1.0))),
             float(data.pop("scale.sy", data.get("scale.sx+sy", 1.0))))
    data.pop("scale.sx+sy", None)
    extra_translate = (float(data.pop("translate.x", 0.0)),
                       float(data.pop("translate.y", 0.0)))
    extra_rotate = float(data.pop("rotate.angleDeg", 0.0))
    rotate_center = (float(data.pop("rotate.center.x", 0.0)),
                     float(data.pop("rotate.center.y", 0.0)))

    if arr.mode == "uniform" and coord.kind == "cartesian":
        step = arr.step or (0.0, 0.0)
        translate = (i * step[0] + extra_translate[0], i * step[1] + extra_translate[1])
        return Transform(translate=translate, rotate_center=rotate_center,
                         rotate_deg=extra_rotate, scale=scale)

    if arr.mode == "uniform" and coord.kind == "polar":
        angle = (arr.start_angle_deg or 0.0) + i * (arr.delta_angle_deg or 0.0) + extra_rotate
        radius = arr.radius or 0.0
        rad = math.radians(angle)
        # translate by (radius, 0), then rotate about the repeater origin:
        # R_c(p + u) = R_c(p) + R(u)
        translate = (radius * math.cos(rad) + extra_translate[0],
                     radius * math.sin(rad) + extra_translate[1])
        return Transform(translate=translate, rotate_center=coord.origin,
                         rotate_deg=angle, scale=scale)

    if arr.mode == "stacked":
        if coord.kind != "cartesian":
            raise UnsupportedArrangementError("stacked arrangement requires cartesian coordinates")
        if i == 0:
            return Transform(scale=scale, rotate_deg=extra_rotate,
                             rotate_center=rotate_center, translate=extra_translate)
        if prev_bboxes is None or len(prev_bboxes) <= i:
            raise MissingPrevBBoxError(f"stacked instance {i} needs {i + 1} bboxes")
        prev = prev_bboxes[i - 1]
        own = prev_bboxes[i]
        gap = arr.gap or 0.0
        if arr.axis == "y":
            translate = (extra_translate[0], prev.max_y + gap - own.min_y + extra_translate[1])
        else:
            translate = (prev.max_x + gap - own.min_x + extra_translate[0], extra_translate[1])
        return Transform(translate=translate, rotate_center=rotate_center,
                         rotate_deg=extra_rotate, scale=scale)

    # flexible: identity baseline, transform comes entirely from the data
    return Transform(translate=extra_translate, rotate_center=rotate_center,
                     rotate_deg=extra_rotate, scale=scale)


def _apply_own_bindings(c: Container, ctx: _Context) -> Container:
    """Resolve a container's non-instance bindings at the enclosing index."""
    for b in c.bindings:
        if b.attribute_path.startswith("instance."):
            continue
        values = ctx.materialized(c.id, b, ctx.count)
        c = set_path(c, b.attribute_path, values[ctx.index])
    return c


def _split_instance_bindings(c: Container, ctx: _Context, count: int):
    """Materialized instance.* bindings, split into transform data and
    child attribute overrides, per instance."""
    transform_data: list[dict] = [dict() for _ in range(count)]
    overrides: list[dict] = [dict() for _ in range(count)]
    for b in c.bindings:
        if not b.attribute_path.startswith("instance."):
            continue
        rest = b.attribute_path[len("instance."):]
        values = ctx.materialized(c.id, b, count)
        bucket = transform_data if rest in TRANSFORM_PATHS else overrides
        for i in range(count):
            bucket[i][rest] = values[i]
    return transform_data, overrides


def _expand(cid: str, ctx: _Context, overrides: dict | None = None) -> SceneNode:
    c = ctx.doc.containers[cid]
    c = _apply_own_bindings(c, ctx)
    if overrides:
        for path, value in overrides.items():
            c = set_path(c, path, value)

    if isinstance(c.body, BasicBody):
        return Leaf(primitive=c.body.primitive, matrix=to_matrix(c.transform),
                    container_id=cid)

    if isinstance(c.body, RepeaterBody):
        return _expand_repeater_body(c, ctx)

    return _expand_compositor_body(c, ctx)


def _expand_repeater_body(c: Container, ctx: _Context) -> Group:
    body: RepeaterBody = c.body
    count = body.count
    transform_data, child_overrides = _split_instance_bindings(c, ctx, count)

    outer_index, outer_count = ctx.index, ctx.count
    instances = []
    placed_bboxes: list[BBox] = []
    for i in range(count):
        ctx.index, ctx.count = i, count
        child_scene = _expand(body.child, ctx, child_overrides[i])
        if body.arrangement.mode == "stacked":
            own_box = node_bbox(child_scene)
            inst_t = instance_transform(body.arrangement, c.coord, i,
                                        placed_bboxes + [own_box], transform_data[i])
            placed_bboxes.append(own_box.translated(*inst_t.translate))
        else:
            inst_t = instance_transform(body.arrangement, c.coord, i, None, transform_data[i])
        instances.append(_with_matrix(child_scene, to_matrix(inst_t)))
    ctx.index, ctx.count = outer_index, outer_count
    return Group(name=c.id, matrix=to_matrix(c.transform),
                 children=tuple(instances), container_id=c.id)


def _expand_compositor_body(c: Container, ctx: _Context) -> Group:
    body: CompositorBody = c.body
    child_scenes = [_expand(child, ctx) for child in body.children]
    placements = solve_composition(ctx.doc, c.id, child_scenes, relations=body.relations,
                                   children=body.children)
    placed = []
    centered = {r.source for r in body.relations if r.rel_type == "center"}
    for child_id, scene, placement in zip(body.children, child_scenes, placements):
        node = _with_matrix(scene, placement)
        if child_id in centered:
            node = _anchor_text_middle(node)
        placed.append(node)
    return Group(name=c.id, matrix=to_matrix(c.transform),
                 children=tuple(placed), container_id=c.id)


def _anchor_text_middle(node: SceneNode) -> SceneNode:
    if isinstance(node, Leaf):
        if node.primitive.kind == "text" and "textAnchor" not in node.primitive.attrs:
            return replace(node, primitive=node.primitive.with_attrs({"textAnchor": "middle"}))
        return node
    return replace(node, children=tuple(_anchor_text_middle(ch) for ch in node.children))


def solve_composition(doc: GlyphDocument, cid: str, child_scenes: list,
                      relations=None, children=None) -> list:
    """Placement matrix (a translation) per child, honoring the anchor
    relations in dependency order; children without relations stay put."""
    if relations is None or children is None:
        body = doc.containers[cid].body
        relations, children = body.relations, body.children
    order = _topo_order(relations, children)
    scene_by_id = dict(zip(children, child_scenes))
    placement: dict[str, tuple[float, float]] = {child: (0.0, 0.0) for child in children}
    solved: set = set()

    rels = sorted(relations, key=lambda r: order[r.source])
    for rel in rels:
        src_anchor, tgt_anchor = RELATION_ANCHORS[rel.rel_type]
        tgt_box = node_bbox(scene_by_id[rel.target]).translated(*placement[rel.target])
        src_box = node_bbox(scene_by_id[rel.source]).translated(*placement[rel.source])
        target_pt = anchor_point(tgt_box, tgt_anchor)
        source_pt = anchor_point(src_box, src_anchor)
        dx = target_pt[0] + rel.distance[0] - source_pt[0]
        dy = target_pt[1] + rel.distance[1] - source_pt[1]
        if rel.source in solved:
            if abs(dx) > OVERCONSTRAINED_TOL or abs(dy) > OVERCONSTRAINED_TOL:
                raise OverConstrainedError(
                    f"{rel.source!r} is source of conflicting relations "
                    f"(off by ({dx:.3g}, {dy:.3g}))")
            continue
        px, py = placement[rel.source]
        placement[rel.source] = (px + dx, py + dy)
        solved.add(rel.source)
    return [translation(*placement[child]) for child in children]


def _topo_order(relations, children) -> dict:
    """Kahn order over target -> source edges; raises on relation cycles."""
    incoming = {child: set() for child in children}
    outgoing = {child: set() for child in children}
    for r in relations:
        incoming[r.source].add(r.target)   # source waits for target
        outgoing[r.target].add(r.source)
    ready = sorted(ch for ch, deps in incoming.items() if not deps)
    order: dict[str, int] = {}
    while ready:
        node = ready.pop(0)
        order[node] = len(order)
        for nxt in sorted(outgoing[node]):
            incoming[nxt].discard(node)
            if not incoming[nxt] and nxt not in order and nxt not in ready:
                ready.append(nxt)
    if len(order) != len(children):
        unresolved = sorted(set(children) - set(order))
        raise RelationCycleError(f"relation cycle involving {unresolved!r}")
    return order


def expand_repeater(doc: GlyphDocument, cid: str,
                    rng: RandomStream | None = None) -> SceneNode:
    """Expand one repeater container into its scene group."""
    c = doc.containers[cid]
    if not isinstance(c.body, RepeaterBody):
        raise UnsupportedArrangementError(f"{cid!r} is not a repeater")
    return _expand(cid, _Context(doc))


def instantiate(doc: GlyphDocument) -> SceneNode:
    """Full scene from the root; an empty document yields an empty group."""
    if doc.root is None or doc.root not in doc.containers:
        return Group(name="document", matrix=IDENTITY, children=())
    return _expand(doc.root, _Context(doc))


def container_bbox(doc: GlyphDocument, cid: str) -> BBox:
    """Bound of one container expanded in isolation."""
    return node_bbox(_expand(cid, _Context(doc)))


def count_nodes(node: SceneNode) -> tuple[int, int]:
    """(groups, leaves) in a scene."""
    if isinstance(node, Leaf):
        return (0, 1)
    groups, leaves = 1, 0
    for child in node.children:
        g, l = count_nodes(child)
        groups += g
        leaves += l
    return (groups, leaves)


def iter_leaves(node: SceneNode, outer: AffineMatrix = IDENTITY):
    """Yield (leaf, world_matrix) over a scene."""
    m = compose(outer, node.matrix)
    if isinstance(node, Leaf):
        yield node, m
    else:
        for child in node.children:
            yield from iter_leaves(child, m)


def analytic_counts(doc: GlyphDocument) -> tuple[int, int]:
    """(groups, leaves) predicted from the container tree alone: each
    container occurs once per product of ancestor repeat counts."""
    if doc.root is None or doc.root not in doc.containers:
        return (1, 0)
    groups = leaves = 0
    stack = [(doc.root, 1)]
    while stack:
        cid, occurrences = stack.pop()
        c = doc.containers[cid]
        if isinstance(c.body, BasicBody):
            leaves += occurrences
        elif isinstance(c.body, RepeaterBody):
            groups += occurrences
            stack.append((c.body.child, occurrences * c.body.count))
        else:
            groups += occurrences
            for child in c.body.children:
                stack.append((child, occurrences))
    return (groups, leaves)
