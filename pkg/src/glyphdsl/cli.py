"""Batch entry points: compile, apply, infer, parse-nl, serve.

Exit codes: 0 success, 1 input/validation failure, 2 I/O failure,
3 natural-language suggestion (no operation produced).
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from . import infer as infer_mod
from . import layout, nlcmd, ops, serialize, svgread
from .errors import GlyphError, GlyphWarning
from .model import validate_document
from .render import SvgConfig, render_svg

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_IO = 2
EXIT_SUGGESTION = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glyphdsl",
                                     description="Glyph container DSL engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="render a .gdsl.json document to SVG")
    p.add_argument("doc", help="input document (.gdsl.json)")
    p.add_argument("--out", "-o", required=True, help="output SVG path")
    p.add_argument("--width", type=float, default=400.0)
    p.add_argument("--height", type=float, default=400.0)
    p.add_argument("--decimals", type=int, default=4)
    p.add_argument("--seed", type=int, default=None,
                   help="override the document rng seed")

    p = sub.add_parser("apply", help="apply a JSON array of operations")
    p.add_argument("doc", help="input document (.gdsl.json)")
    p.add_argument("opsfile", help="JSON array of operations")
    p.add_argument("--out", "-o", required=True, help="output document path")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("infer", help="recover GDSL structure from an SVG file")
    p.add_argument("svg", help="input SVG")
    p.add_argument("--out", "-o", required=True, help="output document path")
    p.add_argument("--tol", type=float, default=infer_mod.DEFAULT_TOL)

    p = sub.add_parser("parse-nl", help="translate a natural-language command")
    p.add_argument("text", help="the command")
    p.add_argument("--doc", default=None, help="document providing context ids")
    p.add_argument("--selection", default=None, help="selected container id")

    p = sub.add_parser("serve", help="run the session HTTP service")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default="./sessions")
    p.add_argument("--cors-origin", default="*")
    p.add_argument("--ui-dir", default=None, help="static UI bundle directory")
    return parser


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _IoFailure(f"cannot read {path}: {exc}") from exc


def _write_bytes(path: str, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise _IoFailure(f"cannot write {path}: {exc}") from exc


class _IoFailure(Exception):
    pass


def _load_document(path: str, seed: int | None):
    doc = serialize.deserialize(_read_bytes(path))
    if seed is not None:
        doc = replace(doc, rng_seed=seed)
    return doc


def cmd_compile(args) -> int:
    try:
        doc = _load_document(args.doc, args.seed)
    except _IoFailure as exc:
        print(exc, file=sys.stderr)
        return EXIT_IO
    except GlyphError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    violations = [v for v in validate_document(doc) if v.severity == "error"]
    if violations:
        v = violations[0]
        print(f"invalid document: {v.container_id}: {v.rule}: {v.message}", file=sys.stderr)
        return EXIT_INPUT
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", GlyphWarning)
            scene = layout.instantiate(doc)
            svg = render_svg(scene, SvgConfig(width=args.width, height=args.height,
                                              decimals=args.decimals))
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except GlyphError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    try:
        _write_bytes(args.out, svg)
    except _IoFailure as exc:
        print(exc, file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_apply(args) -> int:
    try:
        doc = _load_document(args.doc, args.seed)
        raw_ops = _read_bytes(args.opsfile)
    except _IoFailure as exc:
        print(exc, file=sys.stderr)
        return EXIT_IO
    except GlyphError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    try:
        op_list = json.loads(raw_ops)
        if not isinstance(op_list, list):
            raise ValueError("operations file must hold a JSON array")
        operations = [ops.op_from_data(d) for d in op_list]
    except (ValueError, KeyError, GlyphError) as exc:
        print(f"bad operations file: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for k, op in enumerate(operations):
        try:
            doc = ops.apply(doc, op)
        except GlyphError as exc:
            print(f"operation {k} failed: {exc}", file=sys.stderr)
            return EXIT_INPUT
    try:
        _write_bytes(args.out, serialize.serialize(doc))
    except _IoFailure as exc:
        print(exc, file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_infer(args) -> int:
    try:
        raw = _read_bytes(args.svg)
    except _IoFailure as exc:
        print(exc, file=sys.stderr)
        return EXIT_IO
    try:
        elements = svgread.parse_svg(raw)
        doc = infer_mod.infer_structure(elements, tol=args.tol)
    except GlyphError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    try:
        _write_bytes(args.out, serialize.serialize(doc))
    except _IoFailure as exc:
        print(exc, file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_parse_nl(args) -> int:
    from .model import empty_document
    if args.doc is not None:
        try:
            doc = _load_document(args.doc, None)
        except _IoFailure as exc:
            print(exc, file=sys.stderr)
            return EXIT_IO
        except GlyphError as exc:
            print(exc, file=sys.stderr)
            return EXIT_IO
    else:
        doc = empty_document()
    result = nlcmd.parse_command(args.text, doc, selection=args.selection)
    print(json.dumps(nlcmd.parse_result_to_data(result), indent=2, sort_keys=True))
    return EXIT_OK if result.outcome == "proposal" else EXIT_SUGGESTION


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app
    app = create_app(ServiceConfig(data_dir=Path(args.data_dir),
                                   cors_origin=args.cors_origin,
                                   ui_dir=Path(args.ui_dir) if args.ui_dir else None))
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "compile": cmd_compile,
        "apply": cmd_apply,
        "infer": cmd_infer,
        "parse-nl": cmd_parse_nl,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
