import json
from pathlib import Path

import pytest

from glyphdsl import cli, ops, serialize
from glyphdsl.cli import EXIT_INPUT, EXIT_IO, EXIT_OK, EXIT_SUGGESTION
from glyphdsl.model import Arrangement, empty_document

from conftest import build, flower_operations, flower_row_operations, corpus_base_operations

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def flower_doc_file(tmp_path, flower_row_doc):
    path = tmp_path / "flowers.gdsl.json"
    path.write_bytes(serialize.serialize(flower_row_doc))
    return path


class TestCompile:
    def test_flower_row_matches_golden(self, tmp_path, flower_doc_file):
        out = tmp_path / "out.svg"
        assert cli.main(["compile", str(flower_doc_file), "-o", str(out)]) == EXIT_OK
        assert out.read_bytes() == (GOLDEN / "six_flowers.svg").read_bytes()

    def test_malformed_json_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.gdsl.json"
        bad.write_text("{not json")
        out = tmp_path / "out.svg"
        assert cli.main(["compile", str(bad), "-o", str(out)]) == EXIT_INPUT
        assert not out.exists()

    def test_missing_input_exits_2(self, tmp_path):
        out = tmp_path / "out.svg"
        assert cli.main(["compile", str(tmp_path / "nope.gdsl.json"),
                         "-o", str(out)]) == EXIT_IO

    def test_unwritable_output_exits_2(self, tmp_path, flower_doc_file):
        # parent directory does not exist, so the write must fail
        target = tmp_path / "missing-dir" / "out.svg"
        assert cli.main(["compile", str(flower_doc_file), "-o", str(target)]) == EXIT_IO

    def test_invalid_document_exits_1(self, tmp_path, capsys):
        doc_path = tmp_path / "bad.gdsl.json"
        raw = json.loads(serialize.serialize(build(flower_operations())))
        raw["containers"]["four circles"]["child"] = "ghost"
        doc_path.write_text(json.dumps(raw))
        assert cli.main(["compile", str(doc_path),
                         "-o", str(tmp_path / "x.svg")]) == EXIT_INPUT
        assert "DanglingReference" in capsys.readouterr().err

    def test_referential_transparency(self, tmp_path, flower_doc_file):
        out1, out2 = tmp_path / "a.svg", tmp_path / "b.svg"
        cli.main(["compile", str(flower_doc_file), "-o", str(out1), "--decimals", "6"])
        cli.main(["compile", str(flower_doc_file), "-o", str(out2), "--decimals", "6"])
        assert out1.read_bytes() == out2.read_bytes()

    def test_seed_override_changes_random_encodings(self, tmp_path, protein_doc):
        doc_path = tmp_path / "protein.gdsl.json"
        doc_path.write_bytes(serialize.serialize(protein_doc))
        a, b, c = (tmp_path / n for n in ("a.svg", "b.svg", "c.svg"))
        cli.main(["compile", str(doc_path), "-o", str(a), "--seed", "1"])
        cli.main(["compile", str(doc_path), "-o", str(b), "--seed", "2"])
        cli.main(["compile", str(doc_path), "-o", str(c), "--seed", "1"])
        assert a.read_bytes() != b.read_bytes()
        assert a.read_bytes() == c.read_bytes()


class TestApply:
    def test_empty_ops_reproduces_input_bytes(self, tmp_path, flower_doc_file):
        ops_file = tmp_path / "ops.json"
        ops_file.write_text("[]")
        out = tmp_path / "out.gdsl.json"
        assert cli.main(["apply", str(flower_doc_file), str(ops_file),
                         "-o", str(out)]) == EXIT_OK
        assert out.read_bytes() == flower_doc_file.read_bytes()

    def test_operation_corpus_rows_apply_from_base(self, tmp_path):
        base = build(corpus_base_operations())
        doc_path = tmp_path / "base.gdsl.json"
        doc_path.write_bytes(serialize.serialize(base))
        rows = [
            {"op": "createBasic", "id": "rect1", "primitiveKind": "rect",
             "params": {"width": 100, "height": 50, "fill": "#ff0000"}},
            {"op": "createRepeater", "id": "flower", "targetId": "petal",
             "coordKind": "polar", "count": 12,
             "arrangement": {"mode": "uniform"}},
            {"op": "createCompositor", "id": "chart", "children": ["title", "bars"],
             "relations": [{"source": "title", "target": "bars", "relType": "top",
                            "distance": [0, 0]}]},
            {"op": "modifyParams", "targetId": "rect1",
             "params": {"fill": "#ff0000", "width": 150}},
            {"op": "encodeData", "targetId": "bars", "attributePath": "height",
             "data": [10, 45, 30]},
        ]
        ops_file = tmp_path / "ops.json"
        ops_file.write_text(json.dumps(rows))
        out = tmp_path / "out.gdsl.json"
        assert cli.main(["apply", str(doc_path), str(ops_file), "-o", str(out)]) == EXIT_OK
        doc = serialize.deserialize(out.read_bytes())
        assert doc.containers["flower"].body.arrangement.delta_angle_deg == 30.0
        assert doc.containers["rect1"].body.primitive.attrs["width"] == 150

    def test_failing_op_prints_index_and_writes_nothing(self, tmp_path, flower_doc_file,
                                                        capsys):
        rows = [
            {"op": "modifyParams", "targetId": "red circle",
             "params": {"primitive.r": 4}},
            {"op": "modifyParams", "targetId": "ghost",
             "params": {"primitive.r": 4}},
        ]
        ops_file = tmp_path / "ops.json"
        ops_file.write_text(json.dumps(rows))
        out = tmp_path / "out.gdsl.json"
        assert cli.main(["apply", str(flower_doc_file), str(ops_file),
                         "-o", str(out)]) == EXIT_INPUT
        assert not out.exists()
        assert "operation 1" in capsys.readouterr().err

    def test_cli_apply_agrees_with_library_replay(self, tmp_path):
        base = empty_document()
        base_path = tmp_path / "empty.gdsl.json"
        base_path.write_bytes(serialize.serialize(base))
        op_objs = flower_operations() + flower_row_operations()
        ops_file = tmp_path / "ops.json"
        ops_file.write_text(json.dumps([ops.op_to_data(o) for o in op_objs]))
        out = tmp_path / "out.gdsl.json"
        assert cli.main(["apply", str(base_path), str(ops_file), "-o", str(out)]) == EXIT_OK

        history = ops.EditHistory()
        doc = base
        for op in op_objs:
            before = doc.version
            doc = ops.apply(doc, op)
            history.record(op, before, doc.version)
        replayed = ops.replay(base, history)
        assert out.read_bytes() == serialize.serialize(replayed)


class TestInfer:
    def test_twelve_petal_flower_round_trip(self, tmp_path):
        doc = empty_document()
        doc = ops.apply(doc, ops.CreateBasic(
            "petal", "polygon",
            {"points": ((0, -4), (30, -9), (38, 0), (30, 9), (0, 4)), "fill": "#cc3366"}))
        doc = ops.apply(doc, ops.CreateRepeater(
            "flower", "petal", "polar", 12,
            Arrangement(mode="uniform", radius=10.0, start_angle_deg=0.0,
                        delta_angle_deg=30.0)))
        svg_path = tmp_path / "flower.svg"
        doc_path = tmp_path / "flower.gdsl.json"
        doc_path.write_bytes(serialize.serialize(doc))
        assert cli.main(["compile", str(doc_path), "-o", str(svg_path),
                         "--decimals", "8"]) == EXIT_OK
        out = tmp_path / "inferred.gdsl.json"
        assert cli.main(["infer", str(svg_path), "-o", str(out)]) == EXIT_OK
        inferred = serialize.deserialize(out.read_bytes())
        reps = [c for c in inferred.containers.values() if c.kind == "repeater"]
        assert len(reps) == 1 and reps[0].body.count == 12

    def test_unsupported_element_exits_1(self, tmp_path, capsys):
        svg = tmp_path / "e.svg"
        svg.write_text('<svg xmlns="http://www.w3.org/2000/svg">'
                       '<ellipse cx="0" cy="0" rx="3" ry="2"/></svg>')
        assert cli.main(["infer", str(svg), "-o", str(tmp_path / "o.json")]) == EXIT_INPUT
        assert "ellipse" in capsys.readouterr().err

    def test_empty_svg_exits_1(self, tmp_path):
        svg = tmp_path / "empty.svg"
        svg.write_text('<svg xmlns="http://www.w3.org/2000/svg"></svg>')
        assert cli.main(["infer", str(svg), "-o", str(tmp_path / "o.json")]) == EXIT_INPUT


class TestParseNl:
    def test_proposal_exits_0_and_prints_json(self, tmp_path, capsys):
        doc = build(flower_operations())
        doc_path = tmp_path / "doc.gdsl.json"
        doc_path.write_bytes(serialize.serialize(doc))
        code = cli.main(["parse-nl", "rotate and copy the red circle 6 times",
                         "--doc", str(doc_path)])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["outcome"] == "proposal"
        assert payload["operation"]["op"] == "createRepeater"

    def test_gibberish_exits_3(self, capsys):
        assert cli.main(["parse-nl", "what day is it today"]) == EXIT_SUGGESTION
        payload = json.loads(capsys.readouterr().out)
        assert payload["outcome"] == "suggestion"

    def test_missing_doc_exits_2(self, tmp_path):
        assert cli.main(["parse-nl", "hello", "--doc",
                         str(tmp_path / "absent.gdsl.json")]) == EXIT_IO

    def test_selection_resolves_pronouns(self, tmp_path, capsys):
        doc = build(flower_operations())
        doc_path = tmp_path / "doc.gdsl.json"
        doc_path.write_bytes(serialize.serialize(doc))
        code = cli.main(["parse-nl", "Vertically duplicate it twice",
                         "--doc", str(doc_path), "--selection", "red circle"])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["operation"]["targetId"] == "red circle"
