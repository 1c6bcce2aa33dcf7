import random

import pytest

from glyphdsl import model, ops, serialize
from glyphdsl.errors import (BadPrimitiveParamsError, DuplicateIdError,
                             GlyphError, RelationCycleError,
                             ReparentConflictError, ReplayDivergenceError,
                             UnknownPathError, UnknownTargetError,
                             WouldCreateCycleError)
from glyphdsl.model import (Arrangement, Expression, SpatialRelation,
                            ValueList, empty_document, validate_document)

from conftest import build, flower_operations, random_document, corpus_base_operations


def rect1_op():
    return ops.CreateBasic("rect1", "rect", {"width": 100, "height": 50, "fill": "#ff0000"})


class TestApply:
    def test_create_basic_on_empty_sets_root(self):
        doc = ops.apply(empty_document(), rect1_op())
        assert doc.root == "rect1"
        assert doc.version == 1
        assert doc.containers["rect1"].body.primitive.attrs["x"] == 0.0  # defaulted

    def test_duplicate_id_rejected(self):
        doc = ops.apply(empty_document(), rect1_op())
        with pytest.raises(DuplicateIdError):
            ops.apply(doc, rect1_op())

    def test_unknown_target_leaves_document_unchanged(self):
        doc = ops.apply(empty_document(), rect1_op())
        before = serialize.serialize(doc)
        with pytest.raises(UnknownTargetError):
            ops.apply(doc, ops.ModifyParams("missing", {"primitive.fill": "#000000"}))
        assert serialize.serialize(doc) == before

    def test_version_increments_by_one(self):
        doc = build(flower_operations())
        assert doc.version == 4


class TestCreateBasic:
    def test_zero_radius_circle_allowed(self):
        doc = ops.create_basic(empty_document(), "dot", "circle", {"r": 0})
        assert doc.containers["dot"].body.primitive.attrs["r"] == 0

    def test_negative_width_rejected(self):
        with pytest.raises(BadPrimitiveParamsError):
            ops.create_basic(empty_document(), "bad", "rect",
                             {"width": -1, "height": 5})

    def test_missing_nondefaultable_attr_rejected(self):
        with pytest.raises(BadPrimitiveParamsError):
            ops.create_basic(empty_document(), "t", "text", {})  # no content

    def test_unattached_second_basic_is_warning_only(self):
        doc = ops.apply(empty_document(), rect1_op())
        doc = ops.apply(doc, ops.CreateBasic("side", "circle", {"r": 3}))
        assert [v for v in validate_document(doc) if v.severity == "error"] == []
        assert any(v.rule == "UnattachedContainer" for v in validate_document(doc))


class TestCreateRepeater:
    def test_polar_delta_defaults_to_full_turn(self):
        doc = build(corpus_base_operations())
        doc = ops.apply(doc, ops.CreateRepeater("flower", "petal", "polar", 12))
        arr = doc.containers["flower"].body.arrangement
        assert arr.delta_angle_deg == 30.0
        assert arr.radius == 0.0

    def test_cartesian_step_defaults_to_child_width(self):
        doc = ops.apply(empty_document(), rect1_op())
        doc = ops.apply(doc, ops.CreateRepeater("row", "rect1", "cartesian", 3))
        assert doc.containers["row"].body.arrangement.step == (100.0, 0.0)

    def test_reparents_root(self):
        doc = ops.apply(empty_document(), rect1_op())
        doc = ops.apply(doc, ops.CreateRepeater("row", "rect1", "cartesian", 2))
        assert doc.root == "row"

    def test_reparents_slot_inside_existing_repeater(self):
        doc = ops.apply(empty_document(), rect1_op())
        doc = ops.apply(doc, ops.CreateRepeater("row", "rect1", "cartesian", 2))
        doc = ops.apply(doc, ops.CreateRepeater("inner", "rect1", "cartesian", 3))
        assert doc.containers["row"].body.child == "inner"
        assert doc.containers["inner"].body.child == "rect1"
        assert [v for v in validate_document(doc) if v.severity == "error"] == []

    def test_self_reference_is_cycle(self):
        doc = ops.apply(empty_document(), rect1_op())
        with pytest.raises((WouldCreateCycleError, UnknownTargetError)):
            ops.apply(doc, ops.CreateRepeater("r", "r", "cartesian", 2))

    def test_unknown_target(self):
        with pytest.raises(UnknownTargetError):
            ops.apply(empty_document(), ops.CreateRepeater("r", "ghost", "polar", 3))


class TestCreateCompositor:
    def test_children_reparented(self, flower_doc):
        assert flower_doc.root == "flowerWithStem"
        comp = flower_doc.containers["flowerWithStem"]
        assert comp.body.children == ("four circles", "green stem")

    def test_relation_cycle_rejected(self):
        doc = ops.apply(empty_document(), rect1_op())
        doc = ops.apply(doc, ops.CreateBasic("c2", "circle", {"r": 4}))
        rels = (SpatialRelation("rect1", "c2", "top"), SpatialRelation("c2", "rect1", "top"))
        with pytest.raises(RelationCycleError):
            ops.apply(doc, ops.CreateCompositor("x", ("rect1", "c2"), rels))

    def test_unknown_relation_type_rejected(self):
        doc = ops.apply(empty_document(), rect1_op())
        doc = ops.apply(doc, ops.CreateBasic("c2", "circle", {"r": 4}))
        with pytest.raises(GlyphError):
            ops.apply(doc, ops.CreateCompositor(
                "x", ("rect1", "c2"),
                (SpatialRelation("rect1", "c2", "diagonal"),)))

    def test_reparenting_compositor_member_rewrites_relations(self):
        doc = ops.apply(empty_document(), rect1_op())
        doc = ops.apply(doc, ops.CreateBasic("c2", "circle", {"r": 4}))
        doc = ops.apply(doc, ops.CreateCompositor(
            "combo", ("rect1", "c2"),
            (SpatialRelation("rect1", "c2", "top"),)))
        doc = ops.apply(doc, ops.CreateRepeater("row", "rect1", "cartesian", 3))
        combo = doc.containers["combo"]
        assert combo.body.children == ("row", "c2")
        assert combo.body.relations[0].source == "row"
        assert [v for v in validate_document(doc) if v.severity == "error"] == []
        instantiate_scene = __import__("glyphdsl.layout", fromlist=["instantiate"])
        instantiate_scene.instantiate(doc)  # constraint still solvable

    def test_no_relations_allowed(self):
        doc = ops.apply(empty_document(), ops.CreateBasic("title", "text",
                                                          {"content": "t", "fontSize": 10}))
        doc = ops.apply(doc, ops.CreateBasic("bars", "rect", {"width": 5, "height": 5}))
        doc = ops.apply(doc, ops.CreateCompositor("chart", ("title", "bars")))
        assert doc.root == "chart"

    def test_stealing_two_attached_children_rejected(self):
        doc = ops.apply(empty_document(), rect1_op())
        doc = ops.apply(doc, ops.CreateRepeater("r1", "rect1", "cartesian", 2))
        doc = ops.apply(doc, ops.CreateBasic("c", "circle", {"r": 2}))
        doc = ops.apply(doc, ops.CreateRepeater("r2", "c", "cartesian", 2))
        # r1 is root, r2 is unattached: adopting both attached trees is fine,
        # but two *attached* ones is a conflict
        doc2 = ops.apply(doc, ops.CreateCompositor("ok", ("r1", "r2")))
        assert doc2.root == "ok"
        doc3 = ops.apply(doc, ops.CreateBasic("c3", "circle", {"r": 9}))
        doc3 = ops.apply(doc3, ops.CreateRepeater("r3", "c3", "cartesian", 2))
        doc3 = ops.apply(doc3, ops.CreateCompositor("first", ("r2", "r3")))
        with pytest.raises(ReparentConflictError):
            # r1 (root) and r2 (now inside "first") are both attached
            ops.apply(doc3, ops.CreateCompositor("bad", ("r1", "r2")))


class TestModifyParams:
    def test_table_style_aliases(self):
        doc = ops.apply(empty_document(), rect1_op())
        doc = ops.apply(doc, ops.ModifyParams("rect1", {"fill": "#ff0000", "width": 150}))
        attrs = doc.containers["rect1"].body.primitive.attrs
        assert attrs["fill"] == "#ff0000" and attrs["width"] == 150

    def test_repeat_count_alias(self):
        doc = build(corpus_base_operations())
        doc = ops.apply(doc, ops.ModifyParams("bars", {"repeat count": 5}))
        assert doc.containers["bars"].body.count == 5
        doc = ops.apply(doc, ops.ModifyParams("bars", {"body.count": 4}))
        assert doc.containers["bars"].body.count == 4

    def test_unknown_attr_for_kind(self):
        doc = ops.apply(empty_document(), rect1_op())
        with pytest.raises(UnknownPathError):
            ops.apply(doc, ops.ModifyParams("rect1", {"primitive.r": 3}))

    def test_atomic_across_paths(self):
        doc = ops.apply(empty_document(), rect1_op())
        before = serialize.serialize(doc)
        with pytest.raises(GlyphError):
            ops.apply(doc, ops.ModifyParams("rect1", {"primitive.width": 10,
                                                      "primitive.r": 1}))
        assert serialize.serialize(doc) == before

    def test_modify_clears_binding_on_touched_path(self):
        doc = ops.apply(empty_document(), rect1_op())
        doc = ops.apply(doc, ops.EncodeData("rect1", "primitive.width",
                                            ValueList((10, 20))))
        assert doc.containers["rect1"].bindings
        doc = ops.apply(doc, ops.ModifyParams("rect1", {"primitive.width": 42}))
        assert doc.containers["rect1"].bindings == ()


class TestEncodeData:
    def test_bare_attr_on_repeater_binds_per_instance(self):
        doc = build(corpus_base_operations())
        doc = ops.apply(doc, ops.EncodeData("bars", "height", ValueList((10, 45, 30))))
        binding = doc.containers["bars"].bindings[0]
        assert binding.attribute_path == "instance.primitive.height"

    def test_expression_validated_at_encode_time(self):
        doc = build(corpus_base_operations())
        with pytest.raises(GlyphError):
            ops.apply(doc, ops.EncodeData("bars", "instance.scale.sx+sy",
                                          Expression("1 + nonsense()")))

    def test_rebinding_replaces(self):
        doc = build(corpus_base_operations())
        doc = ops.apply(doc, ops.EncodeData("bars", "height", ValueList((1, 2, 3))))
        doc = ops.apply(doc, ops.EncodeData("bars", "height", ValueList((4, 5, 6))))
        bindings = doc.containers["bars"].bindings
        assert len(bindings) == 1
        assert bindings[0].source.values == (4, 5, 6)

    def test_text_content_list(self):
        doc = ops.apply(empty_document(), ops.CreateBasic(
            "label", "text", {"content": "x", "fontSize": 10}))
        doc = ops.apply(doc, ops.CreateRepeater("labels", "label", "cartesian", 3,
                                                Arrangement(mode="uniform", step=(30.0, 0.0))))
        doc = ops.apply(doc, ops.EncodeData(
            "labels", "instance.primitive.content",
            ValueList(("California", "Arizona", "Texas"))))
        assert doc.containers["labels"].bindings[0].source.values == (
            "California", "Arizona", "Texas")


class TestReplay:
    def test_empty_history_returns_initial(self):
        doc = build(flower_operations())
        assert ops.replay(doc, ops.EditHistory()) is doc

    def test_flower_sequence_reproduces_document(self, flower_row_doc):
        history = ops.EditHistory()
        doc = empty_document(rng_seed=7)
        from conftest import flower_row_operations
        for op in flower_operations() + flower_row_operations():
            before = doc.version
            doc = ops.apply(doc, op)
            history.record(op, before, doc.version)
        replayed = ops.replay(empty_document(rng_seed=7), history)
        assert serialize.serialize(replayed) == serialize.serialize(flower_row_doc)

    def test_stale_id_diverges(self):
        history = ops.EditHistory()
        history.record(ops.ModifyParams("ghost", {"primitive.fill": "#000000"}), 0, 1)
        with pytest.raises(ReplayDivergenceError) as err:
            ops.replay(empty_document(), history)
        assert err.value.index == 0


class TestProperties:
    def test_transactionality_fuzz(self):
        # invalid operations never change the canonical bytes
        rng = random.Random(99)
        doc = build(flower_operations())
        bad_ops = [
            ops.ModifyParams("missing", {"primitive.fill": "#000000"}),
            ops.CreateRepeater("four circles", "red circle", "polar", 3),  # dup id
            ops.CreateBasic("bad rect", "rect", {"width": -5, "height": 1}),
            ops.EncodeData("red circle", "primitive.nothing", ValueList((1,))),
            ops.CreateCompositor("x", ()),
            ops.ModifyParams("red circle", {"primitive.r": "huge"}),
        ]
        before = serialize.serialize(doc)
        for _ in range(60):
            op = rng.choice(bad_ops)
            with pytest.raises(GlyphError):
                ops.apply(doc, op)
            assert serialize.serialize(doc) == before

    def test_closure_random_sequences_validate_clean(self):
        # documents reachable through ops only ever carry warnings
        for seed in range(12):
            doc = random_document(random.Random(seed))
            assert [v for v in validate_document(doc) if v.severity == "error"] == []

    def test_closure_adversarial_op_interleavings(self):
        # random op streams, including reparenting steals: every successful
        # apply leaves a clean, instantiable document
        from glyphdsl.layout import instantiate
        rng = random.Random(404)
        doc = empty_document()
        next_id = [0]

        def fresh():
            next_id[0] += 1
            return f"n{next_id[0]}"

        def random_op():
            ids = list(doc.containers) or ["missing"]
            roll = rng.random()
            if roll < 0.35 or not doc.containers:
                return ops.CreateBasic(fresh(), "rect",
                                       {"x": 0, "y": 0, "width": rng.uniform(1, 9),
                                        "height": rng.uniform(1, 9)})
            if roll < 0.6:
                return ops.CreateRepeater(fresh(), rng.choice(ids),
                                          rng.choice(["cartesian", "polar"]),
                                          rng.randint(1, 4))
            if roll < 0.8:
                children = tuple(set(rng.choice(ids) for _ in range(2)))
                rels = ()
                if len(children) == 2 and rng.random() < 0.5:
                    rels = (SpatialRelation(children[0], children[1],
                                            rng.choice(["top", "bottom", "left",
                                                        "right", "center"])),)
                return ops.CreateCompositor(fresh(), children, rels)
            if roll < 0.9:
                return ops.ModifyParams(rng.choice(ids),
                                        {"scale.sx+sy": rng.uniform(0.5, 2)})
            return ops.EncodeData(rng.choice(ids), "translate.y",
                                  ValueList(tuple(rng.uniform(-5, 5)
                                                  for _ in range(3))))

        applied = 0
        for _ in range(120):
            try:
                doc = ops.apply(doc, random_op())
                applied += 1
            except GlyphError:
                continue
            errors = [v for v in validate_document(doc) if v.severity == "error"]
            assert errors == [], errors
            instantiate(doc)  # expansion never crashes on a clean document
        assert applied > 40  # the stream exercised real mutations

    def test_apply_is_deterministic(self):
        doc = build(flower_operations())
        op = ops.EncodeData("green stem", "scale.sy", Expression("1 + random()*0.5"))
        a = serialize.serialize(ops.apply(doc, op))
        b = serialize.serialize(ops.apply(doc, op))
        assert a == b


class TestOpSerialization:
    def test_round_trip_all_variants(self, flower_row_doc):
        from conftest import flower_row_operations
        all_ops = flower_operations() + flower_row_operations()
        for op in all_ops:
            data = ops.op_to_data(op)
            again = ops.op_from_data(data)
            assert ops.op_to_data(again) == data

    def test_encode_data_accepts_plain_list(self):
        op = ops.op_from_data({"op": "encodeData", "targetId": "bars",
                               "attributePath": "height", "data": [10, 45, 30]})
        assert op.data.values == (10, 45, 30)
