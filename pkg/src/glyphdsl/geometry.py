"""Affine transform algebra, bounding boxes and anchor points.

Conventions: y grows downward (SVG screen coordinates); angles are degrees,
positive angles turn +x toward +y (visually clockwise). An AffineMatrix maps
(x, y) -> (a*x + c*y + e, b*x + d*y + f), matching the SVG matrix() order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateScaleError, EmptyGeometryError, NonFiniteError

Vec = tuple[float, float]

# Text metrics are estimated, not rasterized: width scales with glyph count.
TEXT_WIDTH_PER_CHAR = 0.6

ANCHOR_NAMES = (
    "center", "topCenter", "bottomCenter", "leftCenter", "rightCenter",
    "topLeft", "topRight", "bottomLeft", "bottomRight",
)

# (fx, fy) interpolation factors inside a bbox, y-down: top is minY.
_ANCHOR_FACTORS = {
    "center": (0.5, 0.5),
    "topCenter": (0.5, 0.0),
    "bottomCenter": (0.5, 1.0),
    "leftCenter": (0.0, 0.5),
    "rightCenter": (1.0, 0.5),
    "topLeft": (0.0, 0.0),
    "topRight": (1.0, 0.0),
    "bottomLeft": (0.0, 1.0),
    "bottomRight": (1.0, 1.0),
}

PATH_SAMPLES_PER_SEGMENT = 64


@dataclass(frozen=True)
class AffineMatrix:
    a: float = 1.0
    b: float = 0.0
    c: float = 0.0
    d: float = 1.0
    e: float = 0.0
    f: float = 0.0

    def apply(self, pt: Sequence[float]) -> Vec:
        x, y = pt
        return (self.a * x + self.c * y + self.e,
                self.b * x + self.d * y + self.f)

    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "AffineMatrix":
        det = self.determinant()
        if det == 0:
            raise DegenerateScaleError("matrix is singular")
        ia = self.d / det
        ib = -self.b / det
        ic = -self.c / det
        id_ = self.a / det
        ie = -(ia * self.e + ic * self.f)
        if_ = -(ib * self.e + id_ * self.f)
        return AffineMatrix(ia, ib, ic, id_, ie, if_)

    def is_identity(self, tol: float = 0.0) -> bool:
        return (abs(self.a - 1) <= tol and abs(self.b) <= tol
                and abs(self.c) <= tol and abs(self.d - 1) <= tol
                and abs(self.e) <= tol and abs(self.f) <= tol)

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.a, self.b, self.c, self.d, self.e, self.f)


IDENTITY = AffineMatrix()


def translation(tx: float, ty: float) -> AffineMatrix:
    return AffineMatrix(1, 0, 0, 1, tx, ty)


def scaling(sx: float, sy: float) -> AffineMatrix:
    return AffineMatrix(sx, 0, 0, sy, 0, 0)


def rotation_deg(angle_deg: float, center: Vec = (0.0, 0.0)) -> AffineMatrix:
    rad = math.radians(angle_deg)
    cos, sin = math.cos(rad), math.sin(rad)
    cx, cy = center
    # T(c) . R . T(-c)
    e = cx - cos * cx + sin * cy
    f = cy - sin * cx - cos * cy
    return AffineMatrix(cos, sin, -sin, cos, e, f)


def compose(outer: AffineMatrix, inner: AffineMatrix) -> AffineMatrix:
    """compose(M, N).apply(p) == M.apply(N.apply(p))."""
    return AffineMatrix(
        outer.a * inner.a + outer.c * inner.b,
        outer.b * inner.a + outer.d * inner.b,
        outer.a * inner.c + outer.c * inner.d,
        outer.b * inner.c + outer.d * inner.d,
        outer.a * inner.e + outer.c * inner.f + outer.e,
        outer.b * inner.e + outer.d * inner.f + outer.f,
    )


def to_matrix(t) -> AffineMatrix:
    """Matrix for a container Transform: Translate . Rotate(center) . Scale."""
    sx, sy = t.scale
    if sx == 0 or sy == 0:
        raise DegenerateScaleError(f"scale ({sx}, {sy})")
    m = scaling(sx, sy)
    if t.rotate_deg != 0:
        m = compose(rotation_deg(t.rotate_deg, t.rotate_center), m)
    tx, ty = t.translate
    if tx != 0 or ty != 0:
        m = compose(translation(tx, ty), m)
    return m


# --- bounding boxes ---------------------------------------------------------

@dataclass(frozen=True)
class BBox:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    def union(self, other: "BBox") -> "BBox":
        return BBox(min(self.min_x, other.min_x), min(self.min_y, other.min_y),
                    max(self.max_x, other.max_x), max(self.max_y, other.max_y))

    def translated(self, dx: float, dy: float) -> "BBox":
        return BBox(self.min_x + dx, self.min_y + dy,
                    self.max_x + dx, self.max_y + dy)

    def contains(self, pt: Vec, tol: float = 1e-9) -> bool:
        x, y = pt
        return (self.min_x - tol <= x <= self.max_x + tol
                and self.min_y - tol <= y <= self.max_y + tol)


def bbox_of_points(points: Iterable[Vec]) -> BBox:
    pts = list(points)
    if not pts:
        raise EmptyGeometryError("no points")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    box = BBox(min(xs), min(ys), max(xs), max(ys))
    for v in (box.min_x, box.min_y, box.max_x, box.max_y):
        if not math.isfinite(v):
            raise NonFiniteError("non-finite geometry")
    return box


def anchor_point(b: BBox, name: str) -> Vec:
    fx, fy = _ANCHOR_FACTORS[name]
    return (b.min_x + fx * (b.max_x - b.min_x),
            b.min_y + fy * (b.max_y - b.min_y))


# --- primitive sampling -----------------------------------------------------

def sample_primitive(p, samples_per_segment: int = PATH_SAMPLES_PER_SEGMENT) -> list[Vec]:
    """Outline points of a primitive in its local coordinates.

    Dense enough for bounding boxes and transform fitting; circle and path
    outlines are piecewise sampled, text uses the estimated metrics box.
    """
    kind = p.kind
    attrs = p.attrs
    if kind == "rect" or kind == "image":
        x, y = attrs["x"], attrs["y"]
        w, h = attrs["width"], attrs["height"]
        return [(x, y), (x + w, y), (x + w, y + h), (x, y + h)]
    if kind == "circle":
        cx, cy, r = attrs["cx"], attrs["cy"], attrs["r"]
        n = samples_per_segment
        return [(cx + r * math.cos(2 * math.pi * k / n),
                 cy + r * math.sin(2 * math.pi * k / n)) for k in range(n)]
    if kind == "polygon":
        pts = [tuple(pt) for pt in attrs["points"]]
        if not pts:
            raise EmptyGeometryError("polygon with no points")
        return pts
    if kind == "line":
        return [(attrs["x1"], attrs["y1"]), (attrs["x2"], attrs["y2"])]
    if kind == "path":
        return sample_path(attrs["d"], samples_per_segment)
    if kind == "text":
        x, y = attrs["x"], attrs["y"]
        size = attrs["fontSize"]
        width = TEXT_WIDTH_PER_CHAR * size * len(str(attrs["content"]))
        anchor = attrs.get("textAnchor", "start")
        if anchor == "middle":
            x -= width / 2
        elif anchor == "end":
            x -= width
        # baseline at y: box extends one font size upward
        return [(x, y - size), (x + width, y - size), (x + width, y), (x, y)]
    raise EmptyGeometryError(f"unsupported primitive kind {kind!r}")


def primitive_bbox(p) -> BBox:
    return bbox_of_points(sample_primitive(p))


def node_bbox(node) -> BBox:
    """Bound of a scene node (Leaf or Group), matrices applied."""
    return bbox_of_points(_node_points(node, IDENTITY))


def _node_points(node, outer: AffineMatrix) -> list[Vec]:
    m = compose(outer, node.matrix)
    if hasattr(node, "primitive"):
        return [m.apply(pt) for pt in sample_primitive(node.primitive)]
    points: list[Vec] = []
    for child in node.children:
        points.extend(_node_points(child, m))
    return points


# --- SVG path data ----------------------------------------------------------

_PATH_TOKEN = re.compile(r"[MmLlHhVvCcSsQqTtZzAa]|[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


def sample_path(d: str, samples_per_segment: int = PATH_SAMPLES_PER_SEGMENT) -> list[Vec]:
    """Flatten a path data string into outline points.

    Supports M/L/H/V/C/S/Q/T/Z in absolute and relative form. Elliptical
    arcs are out of scope and rejected.
    """
    tokens = _PATH_TOKEN.findall(d)
    if not tokens:
        raise EmptyGeometryError("empty path data")
    points: list[Vec] = []
    pos = (0.0, 0.0)
    start = (0.0, 0.0)
    prev_ctrl: Vec | None = None
    prev_cmd = ""
    i = 0

    def take(n: int) -> list[float]:
        nonlocal i
        vals = [float(t) for t in tokens[i:i + n]]
        if len(vals) < n:
            raise EmptyGeometryError(f"truncated path data in {d!r}")
        i += n
        return vals

    cmd = ""
    while i < len(tokens):
        tok = tokens[i]
        if tok.isalpha():
            cmd = tok
            i += 1
            if cmd in "Zz":
                pos = start
                points.append(pos)
                prev_cmd = "Z"
                continue
        # implicit command repetition: M repeats as L
        elif cmd in "Mm":
            cmd = "L" if cmd == "M" else "l"
        rel = cmd.islower()
        op = cmd.upper()
        if op == "A":
            raise EmptyGeometryError("elliptical arc (A) path commands are not supported")
        if op == "M":
            x, y = take(2)
            pos = (pos[0] + x, pos[1] + y) if rel else (x, y)
            start = pos
            points.append(pos)
            prev_ctrl = None
        elif op == "L":
            x, y = take(2)
            nxt = (pos[0] + x, pos[1] + y) if rel else (x, y)
            points.extend(_lerp_pts(pos, nxt, samples_per_segment))
            pos = nxt
            prev_ctrl = None
        elif op == "H":
            (x,) = take(1)
            nxt = (pos[0] + x if rel else x, pos[1])
            points.extend(_lerp_pts(pos, nxt, samples_per_segment))
            pos = nxt
            prev_ctrl = None
        elif op == "V":
            (y,) = take(1)
            nxt = (pos[0], pos[1] + y if rel else y)
            points.extend(_lerp_pts(pos, nxt, samples_per_segment))
            pos = nxt
            prev_ctrl = None
        elif op in ("C", "S"):
            if op == "C":
                x1, y1, x2, y2, x, y = take(6)
            else:
                x2, y2, x, y = take(4)
                if prev_cmd in ("C", "S") and prev_ctrl is not None:
                    x1, y1 = 2 * pos[0] - prev_ctrl[0], 2 * pos[1] - prev_ctrl[1]
                    if rel:
                        x1, y1 = x1 - pos[0], y1 - pos[1]
                else:
                    x1, y1 = (0.0, 0.0) if rel else pos
            if rel:
                x1, y1 = pos[0] + x1, pos[1] + y1
                x2, y2 = pos[0] + x2, pos[1] + y2
                x, y = pos[0] + x, pos[1] + y
            pts = _cubic_pts(pos, (x1, y1), (x2, y2), (x, y), samples_per_segment)
            points.extend(pts)
            prev_ctrl = (x2, y2)
            pos = (x, y)
        elif op in ("Q", "T"):
            if op == "Q":
                x1, y1, x, y = take(4)
            else:
                x, y = take(2)
                if prev_cmd in ("Q", "T") and prev_ctrl is not None:
                    x1, y1 = 2 * pos[0] - prev_ctrl[0], 2 * pos[1] - prev_ctrl[1]
                    if rel:
                        x1, y1 = x1 - pos[0], y1 - pos[1]
                else:
                    x1, y1 = (0.0, 0.0) if rel else pos
            if rel:
                x1, y1 = pos[0] + x1, pos[1] + y1
                x, y = pos[0] + x, pos[1] + y
            pts = _quad_pts(pos, (x1, y1), (x, y), samples_per_segment)
            points.extend(pts)
            prev_ctrl = (x1, y1)
            pos = (x, y)
        else:
            raise EmptyGeometryError(f"unsupported path command {cmd!r}")
        prev_cmd = op
    if not points:
        raise EmptyGeometryError("path produced no points")
    return points


def _lerp_pts(p0: Vec, p1: Vec, n: int) -> list[Vec]:
    return [(p0[0] + (p1[0] - p0[0]) * k / n, p0[1] + (p1[1] - p0[1]) * k / n)
            for k in range(1, n + 1)]


def _cubic_pts(p0: Vec, p1: Vec, p2: Vec, p3: Vec, n: int) -> list[Vec]:
    out = []
    for k in range(1, n + 1):
        t = k / n
        u = 1 - t
        x = u**3 * p0[0] + 3 * u**2 * t * p1[0] + 3 * u * t**2 * p2[0] + t**3 * p3[0]
        y = u**3 * p0[1] + 3 * u**2 * t * p1[1] + 3 * u * t**2 * p2[1] + t**3 * p3[1]
        out.append((x, y))
    return out


def _quad_pts(p0: Vec, p1: Vec, p2: Vec, n: int) -> list[Vec]:
    out = []
    for k in range(1, n + 1):
        t = k / n
        u = 1 - t
        x = u**2 * p0[0] + 2 * u * t * p1[0] + t**2 * p2[0]
        y = u**2 * p0[1] + 2 * u * t * p1[1] + t**2 * p2[1]
        out.append((x, y))
    return out
