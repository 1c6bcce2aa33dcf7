/** Ambiguity widgets: slot descriptors, explanation templating and the DOM
 * controls rendered inline in the dialogue panel. */

import type { SlotData, SlotKind } from "./api.js";

export type ControlKind = "dropdown" | "number" | "color" | "string";

export interface WidgetDescriptor {
  slotId: string;
  control: ControlKind;
  value: string;
  choices: string[];
}

const CONTROL_BY_KIND: Record<SlotKind, ControlKind> = {
  targetId: "dropdown",
  number: "number",
  color: "color",
  freeString: "string",
};

export function describeSlot(slot: SlotData): WidgetDescriptor {
  let control = CONTROL_BY_KIND[slot.kind];
  if (slot.kind === "freeString" && slot.choices && slot.choices.length) {
    control = "dropdown";
  }
  return {
    slotId: slot.slotId,
    control,
    value: formatValue(slot.currentValue),
    choices: slot.choices ? [...slot.choices] : [],
  };
}

export function formatValue(value: string | number): string {
  if (typeof value === "number") {
    const rounded = Math.round(value * 1e6) / 1e6;
    return String(rounded);
  }
  return value;
}

/** Coerce a raw input string back into the slot's value space. */
export function parseWidgetValue(descriptor: WidgetDescriptor,
                                 raw: string): string | number {
  if (descriptor.control === "number") {
    const parsed = raw.trim() === "" ? NaN : Number(raw);
    if (!Number.isFinite(parsed)) {
      throw new Error(`${descriptor.slotId}: '${raw}' is not a number`);
    }
    return parsed;
  }
  return raw;
}

export type ExplanationPiece =
  | { kind: "text"; text: string }
  | { kind: "slot"; slotId: string };

const MARKER = /\{\{([A-Za-z0-9_+-]+)\}\}/g;

/** Split an explanation template into text runs and slot markers. */
export function splitExplanation(template: string): ExplanationPiece[] {
  const pieces: ExplanationPiece[] = [];
  let last = 0;
  for (const match of template.matchAll(MARKER)) {
    const index = match.index ?? 0;
    if (index > last) {
      pieces.push({ kind: "text", text: template.slice(last, index) });
    }
    pieces.push({ kind: "slot", slotId: match[1] });
    last = index + match[0].length;
  }
  if (last < template.length) {
    pieces.push({ kind: "text", text: template.slice(last) });
  }
  return pieces;
}

/** Build the DOM control for one slot. onChange receives the coerced value. */
export function renderSlotWidget(
  descriptor: WidgetDescriptor,
  onChange: (value: string | number) => void,
  doc: Document = document,
): HTMLElement {
  if (descriptor.control === "dropdown") {
    const select = doc.createElement("select");
    select.className = "slot-widget slot-dropdown";
    select.dataset.slotId = descriptor.slotId;
    for (const choice of descriptor.choices) {
      const option = doc.createElement("option");
      option.value = choice;
      option.textContent = choice;
      option.selected = choice === descriptor.value;
      select.appendChild(option);
    }
    if (!descriptor.choices.includes(descriptor.value)) {
      const option = doc.createElement("option");
      option.value = descriptor.value;
      option.textContent = descriptor.value;
      option.selected = true;
      select.appendChild(option);
    }
    select.addEventListener("change", () => onChange(select.value));
    return select;
  }
  const input = doc.createElement("input");
  input.className = `slot-widget slot-${descriptor.control}`;
  input.dataset.slotId = descriptor.slotId;
  if (descriptor.control === "number") {
    input.type = "number";
    input.step = "any";
  } else if (descriptor.control === "color") {
    input.type = "color";
  } else {
    input.type = "text";
  }
  input.value = descriptor.value;
  input.addEventListener("change", () => {
    try {
      onChange(parseWidgetValue(descriptor, input.value));
      input.classList.remove("invalid");
    } catch {
      input.classList.add("invalid");
    }
  });
  return input;
}
