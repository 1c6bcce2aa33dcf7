"""Glyph container DSL engine: documents, atomic edits, scene instantiation,
deterministic SVG rendering, structure inference and NL commands."""

from .model import (Arrangement, Container, CoordinateSystem, DataBinding,
                    Expression, GlyphDocument, LinearScale, Primitive,
                    SpatialRelation, Transform, ValueList, empty_document,
                    validate_document)
from .ops import (CreateBasic, CreateCompositor, CreateRepeater, EncodeData,
                  ModifyParams, apply, replay)
from .layout import instantiate
from .render import SvgConfig, render_svg

__all__ = [
    "Arrangement", "Container", "CoordinateSystem", "DataBinding",
    "Expression", "GlyphDocument", "LinearScale", "Primitive",
    "SpatialRelation", "Transform", "ValueList",
    "empty_document", "validate_document",
    "CreateBasic", "CreateCompositor", "CreateRepeater", "EncodeData",
    "ModifyParams", "apply", "replay",
    "instantiate", "SvgConfig", "render_svg",
]

__version__ = "0.1.0"
