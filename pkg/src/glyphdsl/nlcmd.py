"""Natural-language commands -> operation proposals with editable slots.

A hand-written pattern grammar covers duplication, composition, parameter
changes and data encoding (with synonyms and the documented defaults);
anything it cannot parse goes to the optional LLM backend, and if that
fails too the result is a suggestion with example commands. Proposals only
ever contain the five atomic operations, whatever the backend returns.
"""

from __future__ import annotations

import json
import os
import re
import urllib.request
from dataclasses import dataclass, replace
from typing import Optional

from . import layout
from .errors import InvalidTargetError, TypeMismatchError, UnknownSlotError
from .model import (Arrangement, BasicBody, Expression, GlyphDocument,
                    RepeaterBody, SpatialRelation, ValueList)
from .ops import (CreateCompositor, CreateRepeater, EncodeData, ModifyParams,
                  Operation, op_from_data, op_to_data)
from .svgread import CSS_BASIC_COLORS

EXAMPLE_COMMANDS = (
    "replicate the shape five times",
    "rotate and copy the branch 6 times",
    "Change the circle's fill to blue.",
    "Place a circle 50 units above the rectangle.",
    "Randomize petal sizes between 1 and 1.5.",
)

_NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12,
    "once": 1, "twice": 2, "thrice": 3,
}

_PRIMITIVE_NOUNS = {
    "circle": "circle", "rect": "rect", "rectangle": "rect", "square": "rect",
    "line": "line", "text": "text", "label": "text", "image": "image",
    "polygon": "polygon", "path": "path", "curve": "path",
}

_REL_WORDS = {
    "above": "top", "on top of": "top", "over": "top",
    "below": "bottom", "under": "bottom", "underneath": "bottom",
    "left of": "left", "to the left of": "left",
    "right of": "right", "to the right of": "right",
    "at the center of": "center", "centered on": "center",
}

_NUM = r"(?:\d+(?:\.\d+)?|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve)"


@dataclass(frozen=True)
class Slot:
    slot_id: str
    kind: str  # targetId | number | color | freeString
    current_value: object
    choices: Optional[tuple] = None
    derived: bool = False  # value was defaulted; recomputes when count changes


@dataclass(frozen=True)
class ParseResult:
    outcome: str  # proposal | suggestion
    operation: Optional[Operation] = None
    slots: tuple = ()
    explanation: str = ""
    template: str = ""  # proposal shape, drives slot -> operation rebuild
    message: str = ""
    example_commands: tuple = ()

    def slot(self, slot_id: str) -> Slot:
        for s in self.slots:
            if s.slot_id == slot_id:
                return s
        raise UnknownSlotError(f"no slot {slot_id!r}")


def _parse_number(token: str) -> float:
    token = token.strip().lower()
    if token in _NUMBER_WORDS:
        return float(_NUMBER_WORDS[token])
    return float(token)


def _singular(noun: str) -> str:
    noun = noun.strip()
    if noun.endswith("es") and len(noun) > 3:
        return noun[:-2] if noun.endswith(("xes", "ses", "shes", "ches")) else noun[:-1]
    if noun.endswith("s") and len(noun) > 2:
        return noun[:-1]
    return noun


def _strip_articles(noun: str) -> str:
    return re.sub(r"^(?:the|a|an|this|that|each|every|all)\s+", "", noun.strip(),
                  flags=re.IGNORECASE).strip()


def resolve_target(noun: str, doc: GlyphDocument,
                   selection: Optional[str] = None) -> tuple[str, bool]:
    """Map a noun phrase to a container id; (value, resolved) where an
    unresolved noun passes through for the user to fix in the widget."""
    pronoun = bool(re.match(r"^(?:it|this|that|them|the\s+selection)\b", noun.strip(),
                            re.IGNORECASE))
    noun = _strip_articles(noun)
    low = noun.lower()
    if pronoun and low in ("it", "this", "them", "this one", "that", "selection") and selection:
        return selection, True
    ids = list(doc.containers)
    for cid in ids:
        if cid.lower() == low:
            return cid, True
    sing = _singular(low)
    for cid in ids:
        if cid.lower() == sing or _singular(cid.lower()) == sing:
            return cid, True
    for cid in ids:
        if sing and (sing in cid.lower() or cid.lower() in (low, sing)):
            return cid, True
    kind = _PRIMITIVE_NOUNS.get(sing)
    if kind:
        for cid in ids:
            body = doc.containers[cid].body
            if isinstance(body, BasicBody) and body.primitive.kind == kind:
                return cid, True
    # a repeater whose child matches the noun ("petals" -> the flower repeater)
    for cid in ids:
        body = doc.containers[cid].body
        if isinstance(body, RepeaterBody):
            child = body.child.lower()
            if sing and (sing in child or _singular(child) == sing):
                return cid, True
    if pronoun and selection:
        return selection, True
    return noun, False


def _enclosing_repeater(doc: GlyphDocument, cid: str) -> Optional[str]:
    for rid, c in doc.containers.items():
        if isinstance(c.body, RepeaterBody) and c.body.child == cid:
            return rid
    return None


def _fresh_id(doc: GlyphDocument, stem: str) -> str:
    stem = re.sub(r"[^A-Za-z0-9_ -]", " ", stem).strip() or "container"
    if stem not in doc.containers:
        return stem
    n = 2
    while f"{stem} {n}" in doc.containers:
        n += 1
    return f"{stem} {n}"


# --- grammar ------------------------------------------------------------------

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?;])\s+(?=[A-Za-z])")

_POLAR_RE = re.compile(
    rf"^rotate\s+and\s+(?:copy|duplicate|replicate|repeat)\s+(?P<target>.+?)\s+"
    rf"(?P<count>{_NUM})\s+times?"
    rf"(?:\s*,?\s*(?:every|at|with|by)\s+(?P<angle>{_NUM})\s+degrees?)?[\s.]*$",
    re.IGNORECASE)

_POLAR_SUFFIX_RE = re.compile(
    rf"^(?:copy|duplicate|replicate|repeat)\s+(?P<target>.+?)\s+"
    rf"(?P<count>{_NUM})\s+times?\s+(?:around(?:\s+a\s+center)?|in\s+a\s+circle|radially)"
    rf"(?:\s*,?\s*(?:every|at|with|by)\s+(?P<angle>{_NUM})\s+degrees?)?[\s.]*$",
    re.IGNORECASE)

_DUP_RE = re.compile(
    rf"^(?:(?P<dir>vertically|horizontally)\s+)?(?:copy|duplicate|replicate|repeat)\s+"
    rf"(?P<target>.+?)"
    rf"(?:\s+(?P<count>{_NUM})\s+times?|\s+(?P<countword>once|twice|thrice))"
    rf"(?:\s+(?P<dir2>vertically|horizontally))?[\s.]*$",
    re.IGNORECASE)

_MODIFY_RE = re.compile(
    r"^(?:change|set|make)\s+(?P<target>.+?)(?:'s)?\s+(?P<attr>[A-Za-z]+)\s+to\s+"
    r"(?P<value>.+?)[\s.]*$",
    re.IGNORECASE)

_TEXT_LIST_RE = re.compile(
    r"^(?:change|set)\s+(?P<target>.+?\s+)?texts?(?:\s+labels?)?\s+to\s+(?P<values>.+?)[\s.]*$",
    re.IGNORECASE)

_RANDOMIZE_RE = re.compile(
    rf"^randomi[sz]e\s+(?P<target>.+?)\s+(?P<attr>[A-Za-z]+?)s?\s+between\s+"
    rf"(?P<lo>{_NUM})\s+and\s+(?P<hi>{_NUM})[\s.]*$",
    re.IGNORECASE)

_GIVE_RANDOM_RE = re.compile(
    rf"^give\s+(?P<target>.+?)\s+(?:with\s+)?different\s+(?P<attr>[A-Za-z]+?)s?\s*,?\s+"
    rf"randomly\s+varying\s+between\s+(?P<lo>{_NUM})\s+and\s+(?P<hi>{_NUM})[\s.]*$",
    re.IGNORECASE)

_PLACE_RE = re.compile(
    rf"^(?:add|place|put)\s+(?P<source>.+?)\s+"
    rf"(?:(?P<units>{_NUM})\s+units?\s+)?"
    rf"(?P<rel>above|over|below|under|underneath|on\s+top\s+of|to\s+the\s+left\s+of|"
    rf"left\s+of|to\s+the\s+right\s+of|right\s+of|at\s+the\s+center\s+of|centered\s+on)\s+"
    rf"(?P<targ>.+?)[\s.]*$",
    re.IGNORECASE)


def parse_command(text: str, doc: GlyphDocument,
                  selection: Optional[str] = None,
                  backend: Optional["LlmBackend"] = None) -> ParseResult:
    """Grammar first, optional backend second, suggestion last."""
    sentences = [s for s in _SENTENCE_SPLIT.split(text.strip()) if s.strip()]
    for sentence in sentences or [text]:
        result = _parse_sentence(sentence.strip(), doc, selection)
        if result is not None:
            return result
    if backend is not None:
        result = _backend_translate(backend, text, doc)
        if result is not None:
            return result
    return ParseResult(
        outcome="suggestion",
        message="I couldn't map that to a glyph operation — "
                "try 'replicate the shape five times' instead.",
        example_commands=EXAMPLE_COMMANDS,
    )


def _parse_sentence(sentence: str, doc: GlyphDocument,
                    selection: Optional[str]) -> Optional[ParseResult]:
    m = _POLAR_RE.match(sentence) or _POLAR_SUFFIX_RE.match(sentence)
    if m:
        return _polar_proposal(m, doc, selection)
    m = _TEXT_LIST_RE.match(sentence)
    if m and "," in m.group("values"):
        return _text_list_proposal(m, doc, selection)
    m = _RANDOMIZE_RE.match(sentence)
    if m:
        return _randomize_proposal(m, doc, selection)
    m = _GIVE_RANDOM_RE.match(sentence)
    if m:
        return _randomize_proposal(m, doc, selection)
    m = _PLACE_RE.match(sentence)
    if m:
        return _place_proposal(m, doc, selection)
    m = _DUP_RE.match(sentence)
    if m:
        return _duplicate_proposal(m, doc, selection)
    m = _MODIFY_RE.match(sentence)
    if m:
        return _modify_proposal(m, doc, selection)
    return None


def _polar_proposal(m, doc, selection) -> ParseResult:
    target, _ = resolve_target(m.group("target"), doc, selection)
    count = int(_parse_number(m.group("count")))
    angle_text = m.group("angle")
    derived = angle_text is None
    angle = 360.0 / count if derived else _parse_number(angle_text)
    slots = (
        Slot("target", "targetId", target, tuple(doc.containers)),
        Slot("count", "number", count),
        Slot("angle", "number", angle, derived=derived),
    )
    return _finish_proposal("repeat-polar", slots, doc)


def _duplicate_proposal(m, doc, selection) -> ParseResult:
    target, resolved = resolve_target(m.group("target"), doc, selection)
    count = int(_parse_number(m.group("count") or m.group("countword")))
    direction = (m.group("dir") or m.group("dir2") or "horizontally").lower()
    if resolved and target in doc.containers:
        box = layout.container_bbox(doc, target)
        extent = box.height if direction == "vertically" else box.width
    else:
        extent = 10.0
    step = (0.0, extent) if direction == "vertically" else (extent, 0.0)
    slots = (
        Slot("target", "targetId", target, tuple(doc.containers)),
        Slot("count", "number", count),
        Slot("step-x", "number", step[0], derived=True),
        Slot("step-y", "number", step[1], derived=True),
    )
    return _finish_proposal("repeat-cartesian", slots, doc)


def _modify_proposal(m, doc, selection) -> ParseResult:
    target, _ = resolve_target(m.group("target"), doc, selection)
    attr = m.group("attr").lower()
    raw_value = m.group("value").strip().rstrip(".")
    value: object = raw_value
    kind = "freeString"
    if raw_value.lower() in CSS_BASIC_COLORS:
        value = CSS_BASIC_COLORS[raw_value.lower()]
        kind = "color"
    elif re.fullmatch(r"#[0-9a-fA-F]{6}([0-9a-fA-F]{2})?", raw_value):
        kind = "color"
    else:
        try:
            value = _parse_number(raw_value)
            kind = "number"
        except ValueError:
            pass
    slots = (
        Slot("target", "targetId", target, tuple(doc.containers)),
        Slot("attr", "freeString", attr),
        Slot("value", kind, value),
    )
    return _finish_proposal("modify", slots, doc)


def _text_list_proposal(m, doc, selection) -> ParseResult:
    noun = (m.group("target") or "text").strip()
    target, _ = resolve_target(noun + " text" if noun != "text" else "text", doc, selection)
    target, _path = _encode_path(doc, target, "content")
    values = tuple(v.strip() for v in m.group("values").rstrip(".").split(",") if v.strip())
    slots = (
        Slot("target", "targetId", target, tuple(doc.containers)),
        Slot("values", "freeString", ", ".join(values)),
    )
    return _finish_proposal("encode-list", slots, doc)


def _randomize_proposal(m, doc, selection) -> ParseResult:
    target, _ = resolve_target(m.group("target"), doc, selection)
    attr = _singular(m.group("attr").lower())
    target, _path = _encode_path(doc, target, attr)  # promote basics to their repeater
    lo = _parse_number(m.group("lo"))
    hi = _parse_number(m.group("hi"))
    slots = (
        Slot("target", "targetId", target, tuple(doc.containers)),
        Slot("attr", "freeString", attr),
        Slot("low", "number", lo),
        Slot("high", "number", hi),
    )
    return _finish_proposal("encode-random", slots, doc)


def _place_proposal(m, doc, selection) -> ParseResult:
    source, _ = resolve_target(m.group("source"), doc, selection)
    target, _ = resolve_target(m.group("targ"), doc, selection)
    rel = _REL_WORDS[re.sub(r"\s+", " ", m.group("rel").lower())]
    units = _parse_number(m.group("units")) if m.group("units") else 0.0
    # y grows downward: "above" lifts the source by -units
    dx, dy = 0.0, 0.0
    if rel == "top" and units:
        dy = -units
    elif rel == "bottom":
        dy = units
    elif rel == "left" and units:
        dx = -units
    elif rel == "right":
        dx = units
    slots = (
        Slot("source", "targetId", source, tuple(doc.containers)),
        Slot("target", "targetId", target, tuple(doc.containers)),
        Slot("relation", "freeString", rel, choices=("top", "bottom", "left", "right", "center")),
        Slot("offset-x", "number", dx),
        Slot("offset-y", "number", dy),
    )
    return _finish_proposal("compose", slots, doc)


# --- proposal assembly -----------------------------------------------------------

def _slot_value(slots, slot_id):
    for s in slots:
        if s.slot_id == slot_id:
            return s.current_value
    return None


def _build_operation(template: str, slots: tuple, doc: GlyphDocument) -> Operation:
    v = lambda sid: _slot_value(slots, sid)
    if template == "repeat-polar":
        count = int(v("count"))
        return CreateRepeater(_fresh_id(doc, f"{v('target')} ring"), str(v("target")),
                              "polar", count,
                              Arrangement(mode="uniform", radius=0.0, start_angle_deg=0.0,
                                          delta_angle_deg=float(v("angle"))))
    if template == "repeat-cartesian":
        count = int(v("count"))
        return CreateRepeater(_fresh_id(doc, f"{v('target')} row"), str(v("target")),
                              "cartesian", count,
                              Arrangement(mode="uniform",
                                          step=(float(v("step-x")), float(v("step-y")))))
    if template == "modify":
        target = str(v("target"))
        attr = str(v("attr"))
        value = v("value")
        target, attr = _retarget_modify(doc, target, attr)
        return ModifyParams(target, {attr: value})
    if template == "encode-list":
        target = str(v("target"))
        values = tuple(x.strip() for x in str(v("values")).split(",") if x.strip())
        target, path = _encode_path(doc, target, "content")
        return EncodeData(target, path, ValueList(values))
    if template == "encode-random":
        target = str(v("target"))
        lo, hi = float(v("low")), float(v("high"))
        target, path = _encode_path(doc, target, str(v("attr")))
        from .serialize import canonical_number
        spread = canonical_number(hi - lo)
        return EncodeData(target, path,
                          Expression(f"{canonical_number(lo)} + random()*{spread}"))
    if template == "compose":
        source, target = str(v("source")), str(v("target"))
        rel = SpatialRelation(source, target, str(v("relation")),
                              (float(v("offset-x")), float(v("offset-y"))))
        return CreateCompositor(_fresh_id(doc, f"{source} with {target}"),
                                (source, target), (rel,))
    raise TypeMismatchError(f"unknown proposal template {template!r}")


def _retarget_modify(doc: GlyphDocument, target: str, attr: str) -> tuple[str, str]:
    """Static changes to a repeated primitive edit the child container."""
    c = doc.containers.get(target)
    if c is not None and isinstance(c.body, RepeaterBody):
        child = doc.containers.get(c.body.child)
        if child is not None and isinstance(child.body, BasicBody):
            if attr in child.body.primitive.attrs or attr in ("fill", "stroke", "opacity"):
                return c.body.child, attr
        if attr in ("count", "repeat count"):
            return target, "body.count"
    return target, attr


_SCALE_ALIASES = {"size": "instance.scale.sx+sy", "scale": "instance.scale.sx+sy",
                  "height": "instance.scale.sy", "width": "instance.scale.sx"}


def _encode_path(doc: GlyphDocument, target: str, attr: str) -> tuple[str, str]:
    """Per-instance paths: prefer the child's primitive attr, fall back to
    scale aliases; basic targets are promoted to their enclosing repeater."""
    attr = _singular(attr.lower())
    c = doc.containers.get(target)
    if c is not None and isinstance(c.body, BasicBody):
        rid = _enclosing_repeater(doc, target)
        if rid:
            target, c = rid, doc.containers[rid]
    if c is not None and isinstance(c.body, RepeaterBody):
        child = doc.containers.get(c.body.child)
        if child is not None and isinstance(child.body, BasicBody) \
                and attr in child.body.primitive.attrs:
            return target, f"instance.primitive.{attr}"
        if attr in _SCALE_ALIASES:
            return target, _SCALE_ALIASES[attr]
        if attr in ("content", "text"):
            return target, "instance.primitive.content"
        return target, f"instance.primitive.{attr}"
    # not a repeater: bind on the container's own schema
    if attr in _SCALE_ALIASES:
        return target, _SCALE_ALIASES[attr].removeprefix("instance.")
    return target, f"primitive.{attr}"


_EXPLANATIONS = {
    "repeat-polar": "Repeat {{target}} {{count}} times around a center, "
                    "every {{angle}} degrees.",
    "repeat-cartesian": "Repeat {{target}} {{count}} times, stepping "
                        "({{step-x}}, {{step-y}}) each time.",
    "modify": "Set {{attr}} of {{target}} to {{value}}.",
    "encode-list": "Bind the values {{values}} across the instances of {{target}}.",
    "encode-random": "Randomly vary {{attr}} of {{target}} between {{low}} and {{high}}.",
    "compose": "Place {{source}} {{relation}} {{target}} at offset "
               "({{offset-x}}, {{offset-y}}).",
}


def _finish_proposal(template: str, slots: tuple, doc: GlyphDocument) -> ParseResult:
    operation = _build_operation(template, slots, doc)
    return ParseResult(outcome="proposal", operation=operation, slots=slots,
                       explanation=_EXPLANATIONS[template], template=template)


def explain(op: Operation) -> str:
    """Human-readable sentence for an operation, with {{slot}} markers."""
    if isinstance(op, CreateRepeater):
        if op.coord_kind == "polar":
            return _EXPLANATIONS["repeat-polar"]
        return _EXPLANATIONS["repeat-cartesian"]
    if isinstance(op, ModifyParams):
        return _EXPLANATIONS["modify"]
    if isinstance(op, EncodeData):
        if isinstance(op.data, Expression):
            return f"Bind the expression '{op.data.text}' to {{{{target}}}}."
        return _EXPLANATIONS["encode-list"]
    if isinstance(op, CreateCompositor):
        return _EXPLANATIONS["compose"]
    return "Create a basic {{target}} container."


def fill_slot(result: ParseResult, slot_id: str, new_value) -> ParseResult:
    """Substitute one slot value and rebuild the proposal operation."""
    if result.outcome != "proposal":
        raise UnknownSlotError("suggestions have no slots")
    slot = result.slot(slot_id)
    new_value = _coerce_slot_value(slot, new_value)
    if slot.kind == "targetId" and slot.choices and new_value not in slot.choices:
        raise InvalidTargetError(f"{new_value!r} is not a container id")
    slots = []
    for s in result.slots:
        if s.slot_id == slot_id:
            slots.append(replace(s, current_value=new_value, derived=False))
        elif slot_id == "count" and s.slot_id == "angle" and s.derived:
            slots.append(replace(s, current_value=360.0 / max(int(new_value), 1)))
        else:
            slots.append(s)
    slots = tuple(slots)
    operation = _rebuild_operation(result, slots)
    return replace(result, slots=slots, operation=operation)


def _rebuild_operation(result: ParseResult, slots: tuple) -> Operation:
    op = result.operation
    v = lambda sid: _slot_value(slots, sid)
    if result.template == "repeat-polar":
        return replace(op, target_id=str(v("target")), count=int(v("count")),
                       arrangement=replace(op.arrangement, delta_angle_deg=float(v("angle"))))
    if result.template == "repeat-cartesian":
        return replace(op, target_id=str(v("target")), count=int(v("count")),
                       arrangement=replace(op.arrangement,
                                           step=(float(v("step-x")), float(v("step-y")))))
    if result.template == "modify":
        attr = next(iter(op.params))
        return replace(op, target_id=str(v("target")), params={attr: v("value")})
    if result.template == "encode-list":
        values = tuple(x.strip() for x in str(v("values")).split(",") if x.strip())
        return replace(op, target_id=str(v("target")), data=ValueList(values))
    if result.template == "encode-random":
        from .serialize import canonical_number
        lo, hi = float(v("low")), float(v("high"))
        attr = _singular(str(v("attr")).lower())
        # no document at hand: remap via aliases, keep an instance prefix
        path = _SCALE_ALIASES.get(attr)
        if path is None:
            prefix = "instance.primitive." if op.attribute_path.startswith("instance.") \
                else "primitive."
            path = prefix + attr
        return replace(op, target_id=str(v("target")), attribute_path=path,
                       data=Expression(f"{canonical_number(lo)} + random()*{canonical_number(hi - lo)}"))
    if result.template == "compose":
        rel = op.relations[0]
        rel = replace(rel, source=str(v("source")), target=str(v("target")),
                      rel_type=str(v("relation")),
                      distance=(float(v("offset-x")), float(v("offset-y"))))
        return replace(op, children=(rel.source, rel.target), relations=(rel,))
    return op


def _coerce_slot_value(slot: Slot, value):
    if slot.kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise TypeMismatchError(f"slot {slot.slot_id!r} expects a number")
        try:
            return float(value) if not isinstance(value, str) else _parse_number(value)
        except ValueError:
            raise TypeMismatchError(f"slot {slot.slot_id!r} expects a number") from None
    if slot.kind == "color":
        if not isinstance(value, str):
            raise TypeMismatchError(f"slot {slot.slot_id!r} expects a color string")
        low = value.lower()
        if low in CSS_BASIC_COLORS:
            return CSS_BASIC_COLORS[low]
        if re.fullmatch(r"#[0-9a-fA-F]{6}([0-9a-fA-F]{2})?", value):
            return value
        raise TypeMismatchError(f"{value!r} is not a color")
    if not isinstance(value, str):
        raise TypeMismatchError(f"slot {slot.slot_id!r} expects a string")
    return value


def summarize_document(doc: GlyphDocument) -> str:
    """One stable line per container for prompts and suggestions."""
    if not doc.containers:
        return "(empty)"
    lines = []
    for cid in sorted(doc.containers):
        c = doc.containers[cid]
        if isinstance(c.body, BasicBody):
            lines.append(f"{cid}: basic {c.body.primitive.kind}")
        elif isinstance(c.body, RepeaterBody):
            lines.append(f"{cid}: repeater {c.body.count} x {c.body.child} "
                         f"({c.coord.kind} {c.body.arrangement.mode})")
        else:
            lines.append(f"{cid}: compositor of {', '.join(c.body.children)}")
    return "\n".join(lines)


# --- pluggable backend -----------------------------------------------------------

class LlmBackend:
    """Translate free text into a ParseResult; None means 'cannot help'."""

    def translate(self, text: str, document_summary: str) -> Optional[dict]:
        raise NotImplementedError


class MockBackend(LlmBackend):
    """Deterministic stand-in: answers from a fixed mapping, else None."""

    def __init__(self, canned: Optional[dict] = None):
        self.canned = canned or {}

    def translate(self, text: str, document_summary: str) -> Optional[dict]:
        return self.canned.get(text.strip())


class HttpBackend(LlmBackend):
    """Remote backend: POSTs {text, summary, model} and expects ParseResult
    JSON back. Failures and timeouts degrade to None (-> suggestion)."""

    def __init__(self, endpoint: str, credential: str = "", model: str = "",
                 timeout: float = 10.0):
        self.endpoint = endpoint
        self.credential = credential
        self.model = model
        self.timeout = timeout

    def translate(self, text: str, document_summary: str) -> Optional[dict]:
        payload = json.dumps({"text": text, "summary": document_summary,
                              "model": self.model}).encode("utf-8")
        req = urllib.request.Request(self.endpoint, data=payload,
                                     headers={"Content-Type": "application/json"})
        if self.credential:
            req.add_header("Authorization", f"Bearer {self.credential}")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read().decode("utf-8"))
        except Exception:
            return None


def backend_from_env(env: Optional[dict] = None) -> LlmBackend:
    env = env if env is not None else os.environ
    endpoint = env.get("GLYPHDSL_LLM_ENDPOINT", "")
    if endpoint:
        return HttpBackend(endpoint,
                           credential=env.get("GLYPHDSL_LLM_CREDENTIAL", ""),
                           model=env.get("GLYPHDSL_LLM_MODEL", ""),
                           timeout=float(env.get("GLYPHDSL_LLM_TIMEOUT", "10")))
    return MockBackend()


def _backend_translate(backend: LlmBackend, text: str,
                       doc: GlyphDocument) -> Optional[ParseResult]:
    """Run the backend and validate its output; anything malformed becomes
    a suggestion so the output space stays closed."""
    try:
        raw = backend.translate(text, summarize_document(doc))
    except Exception:
        return None
    if raw is None:
        return None
    try:
        result = parse_result_from_data(raw)
    except Exception:
        return ParseResult(outcome="suggestion",
                           message="The language backend returned something unusable.",
                           example_commands=EXAMPLE_COMMANDS)
    if result.outcome == "proposal" and result.operation is None:
        return ParseResult(outcome="suggestion",
                           message="The language backend returned something unusable.",
                           example_commands=EXAMPLE_COMMANDS)
    return result


# --- (de)serialization ------------------------------------------------------------

def slot_to_data(s: Slot) -> dict:
    data: dict = {"slotId": s.slot_id, "kind": s.kind, "currentValue": s.current_value}
    if s.choices is not None:
        data["choices"] = list(s.choices)
    if s.derived:
        data["derived"] = True
    return data


def parse_result_to_data(r: ParseResult) -> dict:
    if r.outcome == "suggestion":
        return {"outcome": "suggestion", "message": r.message,
                "exampleCommands": list(r.example_commands)}
    return {
        "outcome": "proposal",
        "operation": op_to_data(r.operation),
        "slots": [slot_to_data(s) for s in r.slots],
        "explanation": r.explanation,
        "template": r.template,
    }


def parse_result_from_data(d: dict) -> ParseResult:
    if d.get("outcome") == "suggestion":
        return ParseResult(outcome="suggestion", message=d.get("message", ""),
                           example_commands=tuple(d.get("exampleCommands", ())))
    slots = tuple(
        Slot(s["slotId"], s["kind"], s["currentValue"],
             tuple(s["choices"]) if "choices" in s else None, s.get("derived", False))
        for s in d.get("slots", ())
    )
    return ParseResult(outcome="proposal", operation=op_from_data(d["operation"]),
                       slots=slots, explanation=d.get("explanation", ""),
                       template=d.get("template", ""))
