"""Exception hierarchy shared by every engine module.

All engine failures derive from GlyphError so callers can catch one type at
API boundaries (CLI exit codes, HTTP status mapping).
"""

from __future__ import annotations


class GlyphError(Exception):
    """Base class for all engine errors."""

    code = "GlyphError"

    def __str__(self) -> str:  # pragma: no cover - trivial
        base = super().__str__()
        return f"{self.code}: {base}" if base else self.code


# --- document / operation errors -------------------------------------------

class DuplicateIdError(GlyphError):
    code = "DuplicateId"


class UnknownTargetError(GlyphError):
    code = "UnknownTarget"


class UnknownChildError(GlyphError):
    code = "UnknownChild"


class UnknownPathError(GlyphError):
    code = "UnknownPath"


class PathKindMismatchError(GlyphError):
    code = "PathKindMismatch"


class TypeMismatchError(GlyphError):
    code = "TypeMismatch"


class BadPrimitiveParamsError(GlyphError):
    code = "BadPrimitiveParams"


class WouldCreateCycleError(GlyphError):
    code = "WouldCreateCycle"


class ReparentConflictError(GlyphError):
    code = "ReparentConflict"


class RelationOutsideChildrenError(GlyphError):
    code = "RelationOutsideChildren"


class RelationCycleError(GlyphError):
    code = "RelationCycle"


class ReplayDivergenceError(GlyphError):
    code = "ReplayDivergence"

    def __init__(self, index: int, message: str = ""):
        super().__init__(message or f"history diverges at entry {index}")
        self.index = index


# --- serialization ----------------------------------------------------------

class MalformedInputError(GlyphError):
    code = "MalformedInput"

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class SchemaViolationError(GlyphError):
    code = "SchemaViolation"

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# --- geometry ---------------------------------------------------------------

class DegenerateScaleError(GlyphError):
    code = "DegenerateScale"


class EmptyGeometryError(GlyphError):
    code = "EmptyGeometry"


class NonFiniteError(GlyphError):
    code = "NonFinite"


# --- expressions / bindings -------------------------------------------------

class ExpressionSyntaxError(GlyphError):
    code = "SyntaxError"

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} at column {column}")
        self.column = column


class UnknownIdentifierError(GlyphError):
    code = "UnknownIdentifier"

    def __init__(self, name: str, column: int = 0):
        super().__init__(f"'{name}' at column {column}")
        self.name = name
        self.column = column


class DivisionByZeroError(GlyphError):
    code = "DivisionByZero"


class NonFiniteResultError(GlyphError):
    code = "NonFiniteResult"


class EmptyDataError(GlyphError):
    code = "EmptyData"


class BadExpressionError(GlyphError):
    code = "BadExpression"


# --- layout -----------------------------------------------------------------

class MissingPrevBBoxError(GlyphError):
    code = "MissingPrevBBox"


class UnsupportedArrangementError(GlyphError):
    code = "UnsupportedArrangement"


class OverConstrainedError(GlyphError):
    code = "OverConstrained"


# --- inference --------------------------------------------------------------

class DegenerateShapeError(GlyphError):
    code = "DegenerateShape"


class EmptyInputError(GlyphError):
    code = "EmptyInput"


class UnsupportedElementError(GlyphError):
    code = "UnsupportedElement"


# --- nl commands ------------------------------------------------------------

class UnknownSlotError(GlyphError):
    code = "UnknownSlot"


class InvalidTargetError(GlyphError):
    code = "InvalidTarget"


# --- warnings ---------------------------------------------------------------

class GlyphWarning(UserWarning):
    """Base class for non-fatal engine diagnostics."""


class LengthMismatchWarning(GlyphWarning):
    """Bound value list length differs from the repetition count."""
