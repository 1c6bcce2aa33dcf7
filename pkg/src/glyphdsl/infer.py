"""Structure inference: congruence grouping and simple-to-complex transform
fitting over flat vector elements, reconstructing repeater/compositor trees.

Models are tried strictly in order of increasing complexity — translation,
fixed-center rotation, translation+scale, rotation+scale, per-axis scale —
and the first whose RMS residual beats the tolerance wins. Elements that
fit nothing stay basic containers.

Circles are rotationally invariant, so they fit on centers plus a radius
channel: indexed outline correspondence would otherwise report spurious
rotation residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateShapeError, EmptyInputError
from .geometry import AffineMatrix, compose, sample_primitive, translation
from .model import (Arrangement, GlyphDocument, Primitive, Transform,
                    ValueList, empty_document)
from .ops import (CreateBasic, CreateCompositor, CreateRepeater, EncodeData,
                  apply as apply_op, modify_params)
from .svgread import FlatElement

DEFAULT_TOL = 1e-3
_AXIS_AMBIGUOUS_RATIO = 1.05  # eigenvalue ratio under which PCA direction is meaningless
MODEL_ORDER = ("translation", "rotation", "translationScale", "rotationScale", "axisScale")


@dataclass(frozen=True)
class ShapeSignature:
    kind: str
    canonical_points: tuple
    style_key: tuple
    rotation_ambiguous: bool
    radial_profile: tuple


@dataclass(frozen=True)
class FitResult:
    model: str  # translation | rotation | translationScale | rotationScale | axisScale | none
    params: dict = field(default_factory=dict)
    residual: float = float("inf")
    per_instance_scales: Optional[tuple] = None
    order: tuple = ()
    scale_axis: Optional[str] = None  # both | x | y | xy
    sequence: Optional[dict] = None   # arithmetic/geometric detection over scales


# --- signatures ---------------------------------------------------------------

def _style_key(p: Primitive) -> tuple:
    key = (p.attrs.get("fill"), p.attrs.get("stroke"), p.attrs.get("strokeWidth"))
    if p.kind == "text":
        key += (p.attrs.get("content"),)
    return key


def _signature_samples(p: Primitive) -> list:
    return sample_primitive(p, samples_per_segment=64)


def _canonicalize(points: np.ndarray, kind: str) -> ShapeSignature:
    centroid = points.mean(axis=0)
    centered = points - centroid
    rms = math.sqrt(float((centered ** 2).sum(axis=1).mean()))
    if rms <= 0:
        raise DegenerateShapeError("shape has zero extent")
    unit = centered / rms
    cov = unit.T @ unit / len(unit)
    eigvals, eigvecs = np.linalg.eigh(cov)
    ambiguous = eigvals[1] <= 0 or eigvals[0] / eigvals[1] > 1.0 / _AXIS_AMBIGUOUS_RATIO
    if not ambiguous:
        axis = eigvecs[:, 1]  # dominant direction
        angle = math.atan2(axis[1], axis[0])
        rot = np.array([[math.cos(-angle), -math.sin(-angle)],
                        [math.sin(-angle), math.cos(-angle)]])
        unit = unit @ rot.T
        # settle the 180-degree ambiguity by third moments where they break the tie
        skew = float((unit[:, 0] ** 3).sum())
        if skew < -1e-9 or (abs(skew) <= 1e-9 and float((unit[:, 1] ** 3).sum()) < -1e-9):
            unit = -unit
    radial = tuple(sorted(float(v) for v in np.hypot(unit[:, 0], unit[:, 1])))
    return ShapeSignature(
        kind=kind,
        canonical_points=tuple((float(x), float(y)) for x, y in unit),
        style_key=(),
        rotation_ambiguous=bool(ambiguous),
        radial_profile=radial,
    )


def normalize_shape(p: Primitive) -> ShapeSignature:
    """Similarity-invariant signature of a primitive's outline."""
    sig = _canonicalize(np.asarray(_signature_samples(p), dtype=float), p.kind)
    return ShapeSignature(sig.kind, sig.canonical_points, _style_key(p),
                          sig.rotation_ambiguous, sig.radial_profile)


def _element_signature(elem: FlatElement) -> ShapeSignature:
    pts = np.asarray([elem.world_matrix.apply(p) for p in _signature_samples(elem.primitive)],
                     dtype=float)
    sig = _canonicalize(pts, elem.primitive.kind)
    return ShapeSignature(sig.kind, sig.canonical_points, _style_key(elem.primitive),
                          sig.rotation_ambiguous, sig.radial_profile)


def _chamfer(a: np.ndarray, b: np.ndarray) -> float:
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return max(float(d.min(axis=1).max()), float(d.min(axis=0).max()))


def signatures_match(a: ShapeSignature, b: ShapeSignature, tol: float) -> bool:
    if a.kind != b.kind or a.style_key != b.style_key:
        return False
    if len(a.canonical_points) != len(b.canonical_points):
        return False
    if a.rotation_ambiguous or b.rotation_ambiguous:
        ra, rb = np.asarray(a.radial_profile), np.asarray(b.radial_profile)
        return float(np.abs(ra - rb).max()) <= tol
    pa = np.asarray(a.canonical_points)
    pb = np.asarray(b.canonical_points)
    return min(_chamfer(pa, pb), _chamfer(pa, -pb)) <= tol


def group_by_signature(elems: Sequence[FlatElement], tol: float = DEFAULT_TOL) -> list:
    """Partition element indices into congruence groups, first-occurrence
    order; within-group ordering is assigned by the fit stage."""
    groups: list[list[int]] = []
    reps: list[Optional[ShapeSignature]] = []
    for i, elem in enumerate(elems):
        try:
            sig = _element_signature(elem)
        except DegenerateShapeError:
            groups.append([i])
            reps.append(None)  # degenerate shapes never merge
            continue
        for gi, rep in enumerate(reps):
            if rep is not None and signatures_match(sig, rep, tol):
                groups[gi].append(i)
                break
        else:
            groups.append([i])
            reps.append(sig)
    return groups


# --- transform fitting ----------------------------------------------------------

@dataclass
class _Features:
    """Per-instance fit geometry: points with stable correspondence, and a
    scalar size channel for rotation-invariant shapes (circle radius)."""
    points: list          # list of (m, 2) arrays
    sizes: Optional[list]  # per-instance scalar, or None


def _fit_points(elem: FlatElement) -> np.ndarray:
    p = elem.primitive
    if p.kind == "circle":
        local = [(p.attrs["cx"], p.attrs["cy"])]
    elif p.kind == "path":
        local = sample_primitive(p, samples_per_segment=8)
    else:
        local = sample_primitive(p)
    return np.asarray([elem.world_matrix.apply(pt) for pt in local], dtype=float)


def _circle_radius(elem: FlatElement) -> float:
    m = elem.world_matrix
    r = elem.primitive.attrs["r"]
    rx = math.hypot(m.a * r, m.b * r)
    ry = math.hypot(m.c * r, m.d * r)
    return (rx + ry) / 2.0


def _group_features(group: Sequence[FlatElement]) -> _Features:
    points = [_fit_points(e) for e in group]
    if all(e.primitive.kind == "circle" for e in group):
        return _Features(points, [_circle_radius(e) for e in group])
    return _Features(points, None)


def _diameter(point_sets: list) -> float:
    allpts = np.vstack(point_sets)
    span = allpts.max(axis=0) - allpts.min(axis=0)
    return float(math.hypot(span[0], span[1])) or 1.0


def _procrustes_similarity(p0: np.ndarray, p1: np.ndarray):
    """Best rotation+uniform-scale+translation p0 -> p1 (no reflection) via
    complex least squares; returns (alpha, beta, residual)."""
    z0 = p0[:, 0] + 1j * p0[:, 1]
    z1 = p1[:, 0] + 1j * p1[:, 1]
    c0, c1 = z0.mean(), z1.mean()
    d0, d1 = z0 - c0, z1 - c1
    denom = float(np.vdot(d0, d0).real)
    if denom == 0:
        return 1.0 + 0j, c1 - c0, float(np.abs(d1).max()) if len(d1) else 0.0
    alpha = complex(np.vdot(d0, d1) / denom)  # vdot conjugates its first argument
    beta = c1 - alpha * c0
    resid = float(np.sqrt(np.mean(np.abs(alpha * z0 + beta - z1) ** 2)))
    return alpha, beta, resid


def _align_correspondence(p0: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Resolve cyclic-shift correspondence for small closed outlines; ties
    keep the smallest shift so symmetric shapes stay consistent."""
    m = len(pi)
    if m != len(p0) or m < 2 or m > 16:
        return pi
    best, best_resid = pi, math.inf
    for shift in range(m):
        cand = np.roll(pi, shift, axis=0)
        _, _, resid = _procrustes_similarity(p0, cand)
        if resid < best_resid - 1e-12:
            best, best_resid = cand, resid
    return best


def _aligned_in_order(feats: _Features, order: list) -> list:
    p0 = feats.points[order[0]]
    return [p0] + [_align_correspondence(p0, feats.points[i]) for i in order[1:]]


def _rms(diff: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.sum(diff * diff, axis=-1))))


def _combine_residual(point_resid: float, sizes, model_sizes) -> float:
    if sizes is None:
        return point_resid
    extra = max(abs(s - ms) for s, ms in zip(sizes, model_sizes))
    return max(point_resid, extra)


def _sequence_kind(values, tol: float = 1e-6) -> Optional[dict]:
    vals = [float(v) for v in values]
    if len(vals) < 3:
        return None
    diffs = [b - a for a, b in zip(vals, vals[1:])]
    if max(diffs) - min(diffs) <= tol * max(1.0, abs(diffs[0])):
        return {"kind": "arithmetic", "base": vals[0], "delta": sum(diffs) / len(diffs)}
    if all(abs(v) > 1e-12 for v in vals):
        ratios = [b / a for a, b in zip(vals, vals[1:])]
        if max(ratios) - min(ratios) <= tol * max(1.0, abs(ratios[0])):
            return {"kind": "geometric", "base": vals[0], "ratio": sum(ratios) / len(ratios)}
    return None


def _lex_order(centroids: np.ndarray) -> list:
    keyed = [(round(float(c[0]), 9), round(float(c[1]), 9), i) for i, c in enumerate(centroids)]
    return [i for _, _, i in sorted(keyed)]


def _fit_translation(feats: _Features, limit: float) -> Optional[FitResult]:
    centroids = np.array([p.mean(axis=0) for p in feats.points])
    order = _lex_order(centroids)
    aligned = _aligned_in_order(feats, order)
    n = len(aligned)
    p0 = aligned[0]
    idx = np.arange(n, dtype=float)
    deltas = np.array([a.mean(axis=0) - p0.mean(axis=0) for a in aligned])
    denom = float((idx ** 2).sum())
    step = (idx[:, None] * deltas).sum(axis=0) / denom
    model = [p0 + i * step for i in range(n)]
    resid = _rms(np.vstack(aligned) - np.vstack(model))
    if feats.sizes is not None:
        sizes = [feats.sizes[i] for i in order]
        resid = _combine_residual(resid, sizes, [sizes[0]] * n)
    if resid >= limit:
        return None
    return FitResult("translation", {"step": (float(step[0]), float(step[1]))},
                     resid, None, tuple(order))


def _solve_center_bisectors(pairs: list) -> Optional[np.ndarray]:
    """Least squares over perpendicular bisectors of corresponding pairs:
    every rotation center satisfies (q-p).c = (|q|^2-|p|^2)/2."""
    rows = np.asarray([q - p for p, q in pairs])
    rhs = np.asarray([(float(q @ q) - float(p @ p)) / 2.0 for p, q in pairs])
    scale = max(1.0, float(np.abs(rows).max()))
    if np.linalg.matrix_rank(rows, tol=1e-9 * scale) < 2:
        return None
    center, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    return center


def _angle_between(center: np.ndarray, p0: np.ndarray, p1: np.ndarray) -> float:
    z0 = (p0 - center) @ np.array([1, 1j])
    z1 = (p1 - center) @ np.array([1, 1j])
    dot = complex(np.vdot(z0, z1))
    return math.degrees(math.atan2(dot.imag, dot.real)) % 360.0


def _order_by_angle(angles: list) -> tuple[list, float]:
    """Angular ordering that best fits an arithmetic progression: every
    cyclic rotation of the ascending order is scored by least squares."""
    ascending = sorted(range(len(angles)), key=lambda i: angles[i])
    n = len(ascending)
    idx = np.arange(n, dtype=float)
    denom = float((idx ** 2).sum()) or 1.0
    best_order, best_delta, best_err = ascending, 0.0, math.inf
    for k in range(n):
        cand = ascending[k:] + ascending[:k]
        base = angles[cand[0]]
        rel = np.asarray([(angles[i] - base) % 360.0 for i in cand])
        delta = float((idx * rel).sum() / denom)
        err = float(((rel - idx * delta) ** 2).sum())
        if err < best_err - 1e-12:
            best_order, best_delta, best_err = cand, delta, err
    return best_order, best_delta


def _rot_mat(deg: float) -> np.ndarray:
    r = math.radians(deg)
    return np.array([[math.cos(r), math.sin(r)], [-math.sin(r), math.cos(r)]])  # row-vector form


def _fit_rotation(feats: _Features, limit: float) -> Optional[FitResult]:
    n = len(feats.points)
    p_ref = feats.points[0]
    aligned_raw = [p_ref] + [_align_correspondence(p_ref, p) for p in feats.points[1:]]
    pairs = [(p_ref[k], aligned_raw[i][k]) for i in range(1, n) for k in range(len(p_ref))]
    center = _solve_center_bisectors(pairs)
    if center is None:
        return None
    angles = [_angle_between(center, p_ref, p) for p in aligned_raw]
    order, delta = _order_by_angle(angles)
    if abs(delta) < 1e-12:
        return None
    base = aligned_raw[order[0]]
    model = [center + (base - center) @ _rot_mat(j * delta) for j in range(n)]
    resid = _rms(np.vstack([aligned_raw[i] for i in order]) - np.vstack(model))
    if feats.sizes is not None:
        sizes = [feats.sizes[i] for i in order]
        resid = _combine_residual(resid, sizes, [sizes[0]] * n)
    if resid >= limit:
        return None
    return FitResult("rotation", {"center": (float(center[0]), float(center[1])),
                                  "deltaAngleDeg": delta},
                     resid, None, tuple(order))


def _per_instance_similarity(feats: _Features, order: list):
    """(alpha_i, beta_i) per instance relative to the first in order; the
    size channel supplies scale when points alone cannot (circles)."""
    aligned = _aligned_in_order(feats, order)
    p0 = aligned[0]
    sims = []
    for j, pi in enumerate(aligned):
        alpha, beta, _ = _procrustes_similarity(p0, pi)
        if feats.sizes is not None:
            s = feats.sizes[order[j]] / feats.sizes[order[0]]
            mag = abs(alpha)
            alpha = alpha / mag * s if mag > 0 else complex(s)
            c0 = complex(p0.mean(axis=0)[0], p0.mean(axis=0)[1])
            ci = complex(pi.mean(axis=0)[0], pi.mean(axis=0)[1])
            beta = ci - alpha * c0
        sims.append((alpha, beta))
    return aligned, sims


def _fit_rotation_scale(feats: _Features, limit: float) -> Optional[FitResult]:
    n = len(feats.points)
    prelim = list(range(n))
    aligned, sims = _per_instance_similarity(feats, prelim)
    rows, rhs = [], []
    for alpha, beta in sims[1:]:
        one = 1 - alpha
        # (1 - alpha) * c = beta, split into real equations
        rows.append([one.real, -one.imag])
        rows.append([one.imag, one.real])
        rhs.extend([beta.real, beta.imag])
    a = np.asarray(rows)
    if len(rows) < 2 or np.linalg.matrix_rank(a, tol=1e-9 * max(1.0, float(np.abs(a).max()))) < 2:
        return None
    center, *_ = np.linalg.lstsq(a, np.asarray(rhs), rcond=None)
    angles = [math.degrees(math.atan2(alpha.imag, alpha.real)) % 360.0 for alpha, _ in sims]
    order, delta = _order_by_angle(angles)
    if abs(delta) < 1e-12:
        return None
    base_scale = abs(sims[order[0]][0])
    scales = [abs(sims[i][0]) / base_scale for i in order]
    if any(s <= 0 for s in scales):
        return None
    aligned_in_order = _aligned_in_order(feats, order)
    base = aligned_in_order[0]
    model = [center + scales[j] * ((base - center) @ _rot_mat(j * delta)) for j in range(n)]
    resid = _rms(np.vstack(aligned_in_order) - np.vstack(model))
    if feats.sizes is not None:
        sizes = [feats.sizes[i] for i in order]
        resid = _combine_residual(resid, sizes, [sizes[0] * s for s in scales])
    if resid >= limit:
        return None
    return FitResult("rotationScale",
                     {"center": (float(center[0]), float(center[1])), "deltaAngleDeg": delta},
                     resid, tuple(float(s) for s in scales), tuple(order), "both",
                     _sequence_kind(scales))


def _fit_scaled_translation(feats: _Features, limit: float, axes: str) -> Optional[FitResult]:
    """Translation + per-instance scale; axes 'both'/'x'/'y' carry one scalar
    per instance, 'xy' an independent pair."""
    centroids = np.array([p.mean(axis=0) for p in feats.points])
    order = _lex_order(centroids)
    aligned = _aligned_in_order(feats, order)
    n = len(aligned)
    p0 = aligned[0]
    c0 = p0.mean(axis=0)
    d0 = p0 - c0
    var_x = float((d0[:, 0] ** 2).sum())
    var_y = float((d0[:, 1] ** 2).sum())
    sizes = [feats.sizes[i] for i in order] if feats.sizes is not None else None

    scale_pairs, translates = [], []
    for j, p in enumerate(aligned):
        ci = p.mean(axis=0)
        di = p - ci
        if sizes is not None:
            if axes != "both":
                return None  # circles carry no per-axis information
            s = sizes[j] / sizes[0]
            sx = sy = s
        elif axes == "both":
            denom = var_x + var_y
            if denom == 0:
                return None
            sx = sy = float((d0 * di).sum() / denom)
        else:
            sx = float((d0[:, 0] * di[:, 0]).sum() / var_x) if var_x and axes in ("x", "xy") else 1.0
            sy = float((d0[:, 1] * di[:, 1]).sum() / var_y) if var_y and axes in ("y", "xy") else 1.0
        if sx <= 0 or sy <= 0:
            return None  # reflections are out of scope
        scale_pairs.append((sx, sy))
        translates.append((ci[0] - sx * c0[0], ci[1] - sy * c0[1]))

    base, step = _solve_scale_structure(scale_pairs, translates)
    model = []
    for i, (sx, sy) in enumerate(scale_pairs):
        t = (base[0] * (1 - sx) + i * step[0], base[1] * (1 - sy) + i * step[1])
        model.append(p0 * (sx, sy) + t)
    resid = _rms(np.vstack(aligned) - np.vstack(model))
    if sizes is not None:
        resid = _combine_residual(resid, sizes, [sizes[0] * s for s, _ in scale_pairs])
    if resid >= limit:
        return None
    if axes == "both":
        scales: tuple = tuple(s for s, _ in scale_pairs)
    elif axes in ("x", "y"):
        scales = tuple(p[0] if axes == "x" else p[1] for p in scale_pairs)
    else:
        scales = tuple(scale_pairs)
    name = "axisScale" if axes == "xy" else "translationScale"
    seq_values = [s[0] if isinstance(s, tuple) else s for s in scales]
    return FitResult(name, {"step": (float(step[0]), float(step[1])),
                            "base": (float(base[0]), float(base[1]))},
                     resid, scales, tuple(order), axes if axes != "xy" else "xy",
                     _sequence_kind(seq_values))


def _solve_scale_structure(scale_pairs: list, translates: list):
    """base/step per axis from t_i = base*(1-s_i) + i*step, least squares."""
    n = len(scale_pairs)
    base = [0.0, 0.0]
    step = [0.0, 0.0]
    for axis in (0, 1):
        rows = np.asarray([[1.0 - scale_pairs[i][axis], float(i)] for i in range(n)])
        rhs = np.asarray([translates[i][axis] for i in range(n)])
        sol, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
        base[axis], step[axis] = float(sol[0]), float(sol[1])
    return tuple(base), tuple(step)


def fit_transform_chain(group: Sequence[FlatElement], tol: float = DEFAULT_TOL) -> FitResult:
    """Simple-to-complex fit over a congruence group (size >= 2)."""
    if len(group) < 2:
        return FitResult("none")
    feats = _group_features(group)
    limit = tol * _diameter(feats.points)

    fit = _fit_translation(feats, limit)
    if fit:
        return fit
    fit = _fit_rotation(feats, limit)
    if fit:
        return fit
    for axes in ("both", "x", "y"):
        fit = _fit_scaled_translation(feats, limit, axes)
        if fit:
            return fit
    fit = _fit_rotation_scale(feats, limit)
    if fit:
        return fit
    fit = _fit_scaled_translation(feats, limit, "xy")
    if fit:
        return fit
    return FitResult("none")


# --- document reconstruction -----------------------------------------------------

def decompose_matrix(m: AffineMatrix) -> Transform:
    """Shear-free decomposition into the engine's Scale->Rotate->Translate."""
    sx = math.hypot(m.a, m.b)
    if sx == 0:
        return Transform(translate=(m.e, m.f))
    angle = math.degrees(math.atan2(m.b, m.a))
    sy = m.determinant() / sx
    return Transform(translate=(m.e, m.f), rotate_deg=angle, scale=(sx, sy))


class _IdAllocator:
    def __init__(self, taken):
        self.taken = set(taken)
        self.counters: dict[str, int] = {}

    def next(self, kind: str) -> str:
        n = self.counters.get(kind, 0)
        while True:
            n += 1
            cid = f"inferred-{kind}-{n}"
            if cid not in self.taken:
                self.counters[kind] = n
                self.taken.add(cid)
                return cid


def infer_structure(elems: Sequence[FlatElement], tol: float = DEFAULT_TOL,
                    existing_ids: Sequence[str] = ()) -> GlyphDocument:
    """Document from flat elements: fitted groups become repeaters, the rest
    basic containers, several top-level parts wrap into a compositor."""
    if not elems:
        raise EmptyInputError("no elements to infer from")
    groups = group_by_signature(elems, tol)
    groups = _merge_scale_families(elems, groups, tol)

    ids = _IdAllocator(existing_ids)
    doc = empty_document()
    top_level: list[str] = []

    for indices in groups:
        group = [elems[i] for i in indices]
        fit = fit_transform_chain(group, tol) if len(group) >= 2 else FitResult("none")
        if fit.model == "none":
            for elem in group:
                cid = ids.next("basic")
                doc = apply_op(doc, CreateBasic(
                    cid, elem.primitive.kind, dict(elem.primitive.attrs),
                    transform=decompose_matrix(elem.world_matrix)))
                top_level.append(cid)
            continue
        doc, rid = _build_repeater(doc, group, fit, ids)
        top_level.append(rid)

    if len(top_level) > 1:
        doc = apply_op(doc, CreateCompositor(ids.next("compositor"), tuple(top_level)))
    return doc


def _merge_scale_families(elems, groups, tol: float):
    """Join same-kind/style groups that one scale model fits as a family
    (curves that differ only by axis scaling land in separate similarity
    groups but belong to one repeater)."""
    merged = [list(g) for g in groups]
    changed = True
    while changed:
        changed = False
        for i in range(len(merged)):
            if not merged[i]:
                continue
            for j in range(i + 1, len(merged)):
                if not merged[j]:
                    continue
                ea, eb = elems[merged[i][0]], elems[merged[j][0]]
                if ea.primitive.kind != eb.primitive.kind:
                    continue
                if _style_key(ea.primitive) != _style_key(eb.primitive):
                    continue
                union = sorted(merged[i] + merged[j])
                fit = fit_transform_chain([elems[k] for k in union], tol)
                if fit.model in ("translationScale", "rotationScale", "axisScale"):
                    merged[i] = union
                    merged[j] = []
                    changed = True
    return [g for g in merged if g]


def _build_repeater(doc: GlyphDocument, group, fit: FitResult, ids: _IdAllocator):
    base_elem = group[fit.order[0]]
    child_id = ids.next("basic")
    repeater_id = ids.next("repeater")
    count = len(group)

    if fit.model in ("rotation", "rotationScale"):
        center = fit.params["center"]
        rebase = center
        coord_kind = "polar"
        arrangement = Arrangement(mode="uniform", radius=0.0, start_angle_deg=0.0,
                                  delta_angle_deg=fit.params["deltaAngleDeg"])
    else:
        rebase = fit.params.get("base", (0.0, 0.0))
        coord_kind = "cartesian"
        step = fit.params.get("step", (0.0, 0.0))
        arrangement = Arrangement(mode="uniform", step=(float(step[0]), float(step[1])))

    child_matrix = compose(translation(-rebase[0], -rebase[1]), base_elem.world_matrix)
    doc = apply_op(doc, CreateBasic(child_id, base_elem.primitive.kind,
                                    dict(base_elem.primitive.attrs),
                                    transform=decompose_matrix(child_matrix)))
    doc = apply_op(doc, CreateRepeater(repeater_id, child_id, coord_kind, count, arrangement))
    if rebase != (0.0, 0.0):
        doc = modify_params(doc, repeater_id, {"translate.x": float(rebase[0]),
                                               "translate.y": float(rebase[1])})

    if fit.per_instance_scales:
        if fit.scale_axis == "xy":
            sx = tuple(float(p[0]) for p in fit.per_instance_scales)
            sy = tuple(float(p[1]) for p in fit.per_instance_scales)
            doc = apply_op(doc, EncodeData(repeater_id, "instance.scale.sx", ValueList(sx)))
            doc = apply_op(doc, EncodeData(repeater_id, "instance.scale.sy", ValueList(sy)))
        else:
            path = {"both": "instance.scale.sx+sy", "x": "instance.scale.sx",
                    "y": "instance.scale.sy"}[fit.scale_axis or "both"]
            doc = apply_op(doc, EncodeData(repeater_id, path,
                                           ValueList(tuple(float(s) for s in fit.per_instance_scales))))
    return doc, repeater_id
