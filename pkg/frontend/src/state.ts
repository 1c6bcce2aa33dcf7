/** UI state and its pure transitions. The server owns the document; this
 * mirrors just enough to render panes and keep widget edits responsive. */

import type { ParseResultData, ProposalData, SlotData } from "./api.js";

export interface ChatTurn {
  role: "user" | "system";
  text: string;
  proposal?: ProposalData;
  examples?: string[];
}

export interface UiState {
  sessionId: string | null;
  documentSnapshot: Record<string, unknown> | null;
  selection: string | null;
  chatLog: ChatTurn[];
  pendingProposal: ProposalData | null;
  /** widget edits queued for confirm, slotId -> value */
  overrides: Record<string, string | number>;
  displayedSvg: string;
  etag: string | null;
}

export function initialState(): UiState {
  return {
    sessionId: null,
    documentSnapshot: null,
    selection: null,
    chatLog: [],
    pendingProposal: null,
    overrides: {},
    displayedSvg: "",
    etag: null,
  };
}

export function withSelection(state: UiState, selection: string | null): UiState {
  return { ...state, selection };
}

export function pushTurn(state: UiState, turn: ChatTurn): UiState {
  return { ...state, chatLog: [...state.chatLog, turn] };
}

export function recordParse(state: UiState, text: string,
                            result: ParseResultData): UiState {
  let next = pushTurn(state, { role: "user", text });
  if (result.outcome === "proposal") {
    next = pushTurn(next, { role: "system", text: result.explanation,
                            proposal: result });
    return { ...next, pendingProposal: result, overrides: {} };
  }
  next = pushTurn(next, { role: "system", text: result.message,
                          examples: result.exampleCommands });
  return { ...next, pendingProposal: null, overrides: {} };
}

export function clearProposal(state: UiState): UiState {
  return { ...state, pendingProposal: null, overrides: {} };
}

/** Record a widget edit. Mirrors the server's derived-slot rule so the
 * panel updates instantly: a defaulted polar angle follows 360/count. */
export function applyOverride(state: UiState, slotId: string,
                              value: string | number): UiState {
  if (!state.pendingProposal) {
    return state;
  }
  const overrides = { ...state.overrides, [slotId]: value };
  const slots = state.pendingProposal.slots.map((slot) => {
    if (slot.slotId === slotId) {
      return { ...slot, currentValue: value, derived: false };
    }
    return slot;
  });
  if (slotId === "count") {
    const count = Number(value);
    for (let i = 0; i < slots.length; i++) {
      const slot = slots[i];
      if (slot.slotId === "angle" && slot.derived && count >= 1) {
        slots[i] = { ...slot, currentValue: 360 / count };
      }
    }
  }
  return {
    ...state,
    overrides,
    pendingProposal: { ...state.pendingProposal, slots },
  };
}

export function slotValue(proposal: ProposalData, slotId: string):
    string | number | undefined {
  const slot = proposal.slots.find((s: SlotData) => s.slotId === slotId);
  return slot?.currentValue;
}

export function setPreview(state: UiState, svg: string, etag: string): UiState {
  return { ...state, displayedSvg: svg, etag };
}
