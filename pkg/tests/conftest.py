"""Shared document fixtures: the flower pipeline, the snowflake and protein
case studies, and seeded random document generators."""

from __future__ import annotations

import random

import pytest

ACCEPTANCE_PREFIX = "tests/test_acceptance.py::"
_acceptance_outcomes: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance_outcomes.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _acceptance_outcomes:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"  {status}  {name}")

from glyphdsl import model, ops
from glyphdsl.model import Arrangement, Expression, SpatialRelation, ValueList

STEM_SCALES = (1.0, 1.4, 0.8, 1.2, 1.6, 1.0)


def flower_operations():
    """The four-step flower build: basic circle, polar repeat x4, composite
    with a stem, cartesian repeat x6 with per-instance stem scaling."""
    return [
        ops.CreateBasic("red circle", "circle",
                        {"cx": 20.0, "cy": 0.0, "r": 8.0, "fill": "#d33344"}),
        ops.CreateRepeater("four circles", "red circle", "polar", 4,
                           Arrangement(mode="uniform", radius=0.0,
                                       start_angle_deg=0.0, delta_angle_deg=90.0)),
        ops.CreateBasic("green stem", "line",
                        {"x1": 0.0, "y1": -60.0, "x2": 0.0, "y2": 0.0,
                         "stroke": "#228822", "strokeWidth": 3.0},
                        transform=model.Transform(translate=(0.0, 90.0))),
        ops.CreateCompositor("flowerWithStem", ("four circles", "green stem"),
                             (SpatialRelation("four circles", "green stem", "top",
                                              (0.0, 0.0)),)),
    ]


def flower_row_operations():
    return [
        ops.CreateRepeater("six flowers", "flowerWithStem", "cartesian", 6,
                           Arrangement(mode="uniform", step=(70.0, 0.0))),
        ops.EncodeData("green stem", "scale.sy", ValueList(STEM_SCALES)),
    ]


def build(operations, seed=7):
    doc = model.empty_document(rng_seed=seed)
    for op in operations:
        doc = ops.apply(doc, op)
    return doc


@pytest.fixture
def flower_doc():
    """Through step (c): one flower anchored on its stem."""
    return build(flower_operations())


@pytest.fixture
def flower_row_doc():
    """The full (d) document: six flowers with varying stem heights."""
    return build(flower_operations() + flower_row_operations())


def snowflake_operations():
    """Case-study build: chevron polylines repeated up a vertical line,
    the branch repeated six-fold, a hexagon composited at the center."""
    chevron = "M -8 0 L 0 -6 L 8 0"
    hexagon = [(10.0, 0.0), (5.0, -8.66), (-5.0, -8.66),
               (-10.0, 0.0), (-5.0, 8.66), (5.0, 8.66)]
    return [
        ops.CreateBasic("chevron", "path",
                        {"d": chevron, "stroke": "#4488cc", "strokeWidth": 2.0,
                         "fill": "none"},
                        transform=model.Transform(translate=(0.0, -14.0))),
        ops.CreateRepeater("chevrons", "chevron", "cartesian", 7,
                           Arrangement(mode="uniform", step=(0.0, -9.0))),
        ops.CreateBasic("spine", "line",
                        {"x1": 0.0, "y1": 0.0, "x2": 0.0, "y2": -80.0,
                         "stroke": "#4488cc", "strokeWidth": 2.0}),
        ops.CreateCompositor("branch", ("chevrons", "spine")),
        ops.CreateRepeater("branches", "branch", "polar", 6,
                           Arrangement(mode="uniform", radius=0.0,
                                       start_angle_deg=0.0, delta_angle_deg=60.0)),
        ops.CreateBasic("hexagon", "polygon",
                        {"points": tuple(hexagon), "fill": "#bbddee"}),
        ops.CreateCompositor("snowflake", ("branches", "hexagon")),
    ]


@pytest.fixture
def snowflake_doc():
    return build(snowflake_operations(), seed=11)


CURVE_X_SCALES = (1.0, 1.2, 1.4)


def protein_operations():
    """Case-study build: curves sharing a base with arithmetic x-scales and
    random y-scales, a diamond anchored on top of each curve."""
    return [
        ops.CreateBasic("curve", "path",
                        {"d": "M 0 0 C 12 -30 28 -52 36 -78",
                         "stroke": "#3a7d44", "strokeWidth": 2.0, "fill": "none"}),
        ops.CreateBasic("diamond", "polygon",
                        {"points": ((0.0, -6.0), (4.5, 0.0), (0.0, 6.0), (-4.5, 0.0)),
                         "fill": "#b6543f"}),
        ops.CreateCompositor("sprout", ("diamond", "curve"),
                             (SpatialRelation("diamond", "curve", "top", (0.0, 0.0)),)),
        ops.CreateRepeater("plant", "sprout", "cartesian", 3,
                           Arrangement(mode="uniform", step=(0.0, 0.0))),
        ops.EncodeData("curve", "scale.sx", ValueList(CURVE_X_SCALES)),
        ops.EncodeData("curve", "scale.sy", Expression("0.8 + random()*0.7")),
    ]


@pytest.fixture
def protein_doc():
    return build(protein_operations(), seed=2024)


def corpus_base_operations():
    """Containers the shorthand operation-corpus rows refer to."""
    return [
        ops.CreateBasic("petal", "polygon",
                        {"points": ((0.0, -3.0), (18.0, -6.0), (24.0, 0.0),
                                    (18.0, 6.0), (0.0, 3.0)),
                         "fill": "#cc5588"}),
        ops.CreateBasic("title", "text",
                        {"x": 0.0, "y": -10.0, "content": "chart", "fontSize": 14.0}),
        ops.CreateBasic("bar", "rect",
                        {"x": 0.0, "y": 0.0, "width": 10.0, "height": 20.0,
                         "fill": "#336699"}),
        ops.CreateRepeater("bars", "bar", "cartesian", 3,
                           Arrangement(mode="uniform", step=(14.0, 0.0))),
    ]


def random_primitive(rng: random.Random):
    kind = rng.choice(["rect", "circle", "polygon", "line"])
    if kind == "rect":
        return kind, {"x": rng.uniform(-20, 20), "y": rng.uniform(-20, 20),
                      "width": rng.uniform(2, 30), "height": rng.uniform(2, 30),
                      "fill": "#3366aa"}
    if kind == "circle":
        return kind, {"cx": rng.uniform(-20, 20), "cy": rng.uniform(-20, 20),
                      "r": rng.uniform(1, 15), "fill": "#aa6633"}
    if kind == "polygon":
        pts = tuple((rng.uniform(-15, 15), rng.uniform(-15, 15)) for _ in range(5))
        return kind, {"points": pts, "fill": "#44aa66"}
    return kind, {"x1": rng.uniform(-20, 20), "y1": rng.uniform(-20, 20),
                  "x2": rng.uniform(-20, 20), "y2": rng.uniform(-20, 20),
                  "stroke": "#222222"}


def random_document(rng: random.Random, max_depth: int = 3):
    """A random valid container tree built through the operation layer."""
    doc = model.empty_document(rng_seed=rng.getrandbits(32))
    counter = [0]

    def fresh(prefix):
        counter[0] += 1
        return f"{prefix}-{counter[0]}"

    def grow(depth) -> tuple:
        roll = rng.random()
        if depth >= max_depth or roll < 0.4:
            cid = fresh("leafbox")
            kind, attrs = random_primitive(rng)
            return cid, [ops.CreateBasic(cid, kind, attrs)]
        if roll < 0.75:
            child_id, child_ops = grow(depth + 1)
            cid = fresh("ring")
            count = rng.randint(1, 5)
            if rng.random() < 0.5:
                arr = Arrangement(mode="uniform",
                                  step=(rng.uniform(-30, 30), rng.uniform(-30, 30)))
                return cid, child_ops + [ops.CreateRepeater(cid, child_id, "cartesian",
                                                            count, arr)]
            arr = Arrangement(mode="uniform", radius=rng.uniform(0, 25),
                              start_angle_deg=rng.uniform(0, 360),
                              delta_angle_deg=rng.uniform(10, 120))
            return cid, child_ops + [ops.CreateRepeater(cid, child_id, "polar", count, arr)]
        n = rng.randint(2, 3)
        parts = [grow(depth + 1) for _ in range(n)]
        cid = fresh("combo")
        all_ops = [op for _, part_ops in parts for op in part_ops]
        return cid, all_ops + [ops.CreateCompositor(cid, tuple(p for p, _ in parts))]

    _, operations = grow(0)
    for op in operations:
        doc = ops.apply(doc, op)
    return doc
