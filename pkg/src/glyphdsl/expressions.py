"""Data expression language and binding materialization.

Grammar (see docs/expressions.md): numbers, `index`, `random()`, unary
minus, + - * / with the usual precedence, parentheses. `random()` draws
from a named 64-bit generator (splitmix64) so every materialization is
reproducible from the document seed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

from .errors import (BadExpressionError, DivisionByZeroError, EmptyDataError,
                     ExpressionSyntaxError, LengthMismatchWarning,
                     NonFiniteResultError, TypeMismatchError,
                     UnknownIdentifierError)
from .model import DataBinding, Expression, LinearScale, ValueList

MASK64 = (1 << 64) - 1


class RandomStream:
    """splitmix64 sequence; state advances one step per draw."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        return (self.next_u64() >> 11) * (2.0 ** -53)


def fnv1a_64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & MASK64
    return h


def binding_stream(doc_seed: int, container_id: str, attribute_path: str) -> RandomStream:
    """Independent stream per (container, path); stable across runs."""
    return RandomStream((doc_seed & MASK64) ^ fnv1a_64(f"{container_id}\x1f{attribute_path}"))


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Index:
    pass


@dataclass(frozen=True)
class RandomCall:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: "Expr"
    right: "Expr"


Expr = Union[Number, Index, RandomCall, Neg, BinOp]

_OP_ALIASES = {"−": "-", "×": "*", "÷": "/", "·": "*"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        col = i + 1
        ch = _OP_ALIASES.get(ch, ch)
        if ch in "+-*/()":
            tokens.append(("op", ch, col))
            i += 1
        elif ch.isdigit() or ch == ".":
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                seen_dot = seen_dot or text[j] == "."
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k >= n or not text[k].isdigit():
                    raise ExpressionSyntaxError("malformed exponent", j + 1)
                while k < n and text[k].isdigit():
                    k += 1
                j = k
            try:
                value = float(text[i:j])
            except ValueError:
                raise ExpressionSyntaxError(f"bad number {text[i:j]!r}", col) from None
            tokens.append(("num", text[i:j], col))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], col))
            i = j
        else:
            raise ExpressionSyntaxError(f"unexpected character {text[i]!r}", col)
    tokens.append(("eof", "", n + 1))
    return tokens


def parse_expression(text: str) -> Expr:
    """Recursive-descent parse: * and / bind tighter than + and -, both
    left-associative."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def advance():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_sum() -> Expr:
        node = parse_term()
        while peek()[0] == "op" and peek()[1] in "+-":
            op = advance()[1]
            node = BinOp(op, node, parse_term())
        return node

    def parse_term() -> Expr:
        node = parse_factor()
        while peek()[0] == "op" and peek()[1] in "*/":
            op = advance()[1]
            node = BinOp(op, node, parse_factor())
        return node

    def parse_factor() -> Expr:
        kind, value, col = peek()
        if kind == "op" and value == "-":
            advance()
            return Neg(parse_factor())
        if kind == "op" and value == "+":
            advance()
            return parse_factor()
        return parse_primary()

    def parse_primary() -> Expr:
        kind, value, col = advance()
        if kind == "num":
            return Number(float(value))
        if kind == "ident":
            if value == "index":
                return Index()
            if value == "random":
                k2, v2, c2 = advance()
                if (k2, v2) != ("op", "("):
                    raise ExpressionSyntaxError("random is a function: write random()", c2)
                k3, v3, c3 = advance()
                if (k3, v3) != ("op", ")"):
                    raise ExpressionSyntaxError("random() takes no arguments", c3)
                return RandomCall()
            raise UnknownIdentifierError(value, col)
        if kind == "op" and value == "(":
            node = parse_sum()
            k2, v2, c2 = advance()
            if (k2, v2) != ("op", ")"):
                raise ExpressionSyntaxError("expected ')'", c2)
            return node
        raise ExpressionSyntaxError(f"unexpected {value!r}" if value else "unexpected end of input", col)

    node = parse_sum()
    kind, value, col = peek()
    if kind != "eof":
        raise ExpressionSyntaxError(f"unexpected {value!r}", col)
    return node


def eval_expression(e: Expr, index: int, rng: RandomStream) -> float:
    """Evaluate with the instance index substituted; random() advances rng."""
    if isinstance(e, Number):
        return e.value
    if isinstance(e, Index):
        return float(index)
    if isinstance(e, RandomCall):
        return rng.next_float()
    if isinstance(e, Neg):
        return -eval_expression(e.operand, index, rng)
    if isinstance(e, BinOp):
        left = eval_expression(e.left, index, rng)
        right = eval_expression(e.right, index, rng)
        if e.op == "+":
            out = left + right
        elif e.op == "-":
            out = left - right
        elif e.op == "*":
            out = left * right
        else:
            if right == 0:
                raise DivisionByZeroError(f"dividing {left} by zero")
            out = left / right
        if not math.isfinite(out):
            raise NonFiniteResultError(f"{left} {e.op} {right}")
        return out
    raise BadExpressionError(f"unknown node {e!r}")


def apply_linear_scale(value: float, scale: LinearScale) -> float:
    lo, hi = scale.domain
    rlo, rhi = scale.range
    return rlo + (value - lo) * (rhi - rlo) / (hi - lo)


def materialize_binding(b: DataBinding, count: int, rng: RandomStream) -> list:
    """Per-instance values for a binding: lists cycle/truncate (with a
    warning), expressions evaluate at index 0..count-1, the linear scale
    applies last."""
    if count < 1:
        raise EmptyDataError(f"count {count} < 1")
    if isinstance(b.source, ValueList):
        values = list(b.source.values)
        if not values:
            raise EmptyDataError(f"empty value list on {b.attribute_path!r}")
        if len(values) != count:
            verb = "cycled" if len(values) < count else "truncated"
            warnings.warn(
                f"{b.attribute_path!r}: {len(values)} values for {count} instances ({verb})",
                LengthMismatchWarning, stacklevel=2)
        out = [values[i % len(values)] for i in range(count)]
    else:
        try:
            expr = parse_expression(b.source.text)
        except (ExpressionSyntaxError, UnknownIdentifierError) as exc:
            raise BadExpressionError(f"{b.source.text!r}: {exc}") from exc
        out = []
        for i in range(count):
            try:
                out.append(eval_expression(expr, i, rng))
            except (DivisionByZeroError, NonFiniteResultError) as exc:
                raise type(exc)(f"at index {i}: {exc}") from exc
    if b.scale is not None:
        lo, hi = b.scale.domain
        if lo == hi:
            raise BadExpressionError("linear scale domain has zero width")
        scaled = []
        for v in out:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise TypeMismatchError(
                    f"{b.attribute_path!r}: cannot apply a linear scale to {v!r}")
            scaled.append(apply_linear_scale(float(v), b.scale))
        out = scaled
    return out
