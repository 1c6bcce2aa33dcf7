/** Controller wiring the three panes to the session service. All document
 * mutation goes through server round-trips; at most one is in flight. */

import { ApiClient, ApiError, ParseResultData, ProposalData } from "./api.js";
import { selectionFromClick } from "./hittest.js";
import { buildModifyOp, ContainerData, paramRows, validateRowValue } from "./params.js";
import {
  UiState, applyOverride, clearProposal, initialState, recordParse,
  setPreview, withSelection,
} from "./state.js";
import { describeSlot, renderSlotWidget, splitExplanation } from "./widgets.js";

const POLL_INTERVAL_MS = 500;

export interface AppElements {
  preview: HTMLElement;
  chatLog: HTMLElement;
  chatInput: HTMLInputElement;
  chatSend: HTMLButtonElement;
  paramPanel: HTMLElement;
  banner: HTMLElement;
  selectionLabel: HTMLElement;
}

export class App {
  state: UiState = initialState();
  private readonly api: ApiClient;
  private readonly els: AppElements;
  private mutationInFlight = false;
  private pollTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(api: ApiClient, els: AppElements) {
    this.api = api;
    this.els = els;
  }

  async start(): Promise<void> {
    const { sessionId } = await this.api.createSession();
    this.state = { ...this.state, sessionId };
    this.els.chatSend.addEventListener("click", () => void this.submitChat());
    this.els.chatInput.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") {
        void this.submitChat();
      }
    });
    this.els.preview.addEventListener("click", (ev) => {
      this.handlePreviewClick(ev.target as Element | null);
    });
    await this.refreshPreview(true);
    await this.refreshDocument();
    this.schedulePoll();
  }

  private schedulePoll(): void {
    if (this.pollTimer) {
      clearTimeout(this.pollTimer);
    }
    this.pollTimer = setTimeout(() => {
      void this.refreshPreview(false).finally(() => this.schedulePoll());
    }, POLL_INTERVAL_MS);
  }

  private banner(message: string): void {
    this.els.banner.textContent = message;
    this.els.banner.classList.toggle("open", message.length > 0);
  }

  async refreshPreview(force: boolean): Promise<void> {
    if (!this.state.sessionId) {
      return;
    }
    try {
      const result = await this.api.fetchPreview(
        this.state.sessionId, true, force ? null : this.state.etag);
      if (!result.notModified) {
        this.state = setPreview(this.state, result.svg, result.etag);
        this.els.preview.innerHTML = result.svg;
      }
      this.banner("");
    } catch (err) {
      this.banner(`preview failed: ${(err as Error).message}`);
    }
  }

  async refreshDocument(): Promise<void> {
    if (!this.state.sessionId) {
      return;
    }
    const doc = await this.api.getDocument(this.state.sessionId);
    this.state = { ...this.state, documentSnapshot: doc };
    this.renderParamPanel();
  }

  handlePreviewClick(target: Element | null): void {
    const selection = selectionFromClick(target);
    this.state = withSelection(this.state, selection);
    this.els.selectionLabel.textContent = selection ?? "(nothing selected)";
    this.renderParamPanel();
  }

  async submitChat(): Promise<void> {
    const text = this.els.chatInput.value.trim();
    if (!text || !this.state.sessionId) {
      return;
    }
    this.els.chatInput.value = "";
    const result = await this.api.postNl(this.state.sessionId, text,
                                         this.state.selection);
    this.state = recordParse(this.state, text, result);
    this.renderChat(result);
  }

  private renderChat(latest?: ParseResultData): void {
    const doc = this.els.chatLog.ownerDocument;
    this.els.chatLog.innerHTML = "";
    for (const turn of this.state.chatLog) {
      const bubble = doc.createElement("div");
      bubble.className = `turn turn-${turn.role}`;
      if (turn.proposal && turn.proposal === this.state.pendingProposal?.valueOf()) {
        bubble.appendChild(this.renderProposal(this.state.pendingProposal, doc));
      } else if (turn.examples) {
        bubble.textContent = turn.text;
        const list = doc.createElement("ul");
        for (const example of turn.examples) {
          const item = doc.createElement("li");
          item.textContent = example;
          list.appendChild(item);
        }
        bubble.appendChild(list);
      } else {
        bubble.textContent = turn.text;
      }
      this.els.chatLog.appendChild(bubble);
    }
    this.els.chatLog.scrollTop = this.els.chatLog.scrollHeight;
  }

  /** Explanation text with the inline widgets substituted for markers. */
  renderProposal(proposal: ProposalData, doc: Document): HTMLElement {
    const wrap = doc.createElement("div");
    wrap.className = "proposal";
    const sentence = doc.createElement("p");
    for (const piece of splitExplanation(proposal.explanation)) {
      if (piece.kind === "text") {
        sentence.appendChild(doc.createTextNode(piece.text));
        continue;
      }
      const slot = proposal.slots.find((s) => s.slotId === piece.slotId);
      if (!slot) {
        sentence.appendChild(doc.createTextNode(`{${piece.slotId}}`));
        continue;
      }
      const widget = renderSlotWidget(describeSlot(slot), (value) => {
        this.state = applyOverride(this.state, slot.slotId, value);
      }, doc);
      sentence.appendChild(widget);
    }
    wrap.appendChild(sentence);

    const confirm = doc.createElement("button");
    confirm.textContent = "Apply";
    confirm.className = "confirm";
    confirm.addEventListener("click", () => void this.confirmProposal());
    const cancel = doc.createElement("button");
    cancel.textContent = "Cancel";
    cancel.className = "cancel";
    cancel.addEventListener("click", () => {
      this.state = clearProposal(this.state);
      this.renderChat();
    });
    wrap.appendChild(confirm);
    wrap.appendChild(cancel);
    return wrap;
  }

  async confirmProposal(): Promise<void> {
    if (!this.state.sessionId || !this.state.pendingProposal
        || this.mutationInFlight) {
      return;
    }
    this.mutationInFlight = true;
    try {
      await this.api.confirmNl(this.state.sessionId, this.state.overrides);
      this.state = clearProposal(this.state);
      this.renderChat();
      await this.refreshPreview(true);
      await this.refreshDocument();
    } catch (err) {
      this.banner(`apply failed: ${(err as Error).message}`);
    } finally {
      this.mutationInFlight = false;
    }
  }

  selectedContainer(): ContainerData | null {
    const snapshot = this.state.documentSnapshot;
    const selection = this.state.selection;
    if (!snapshot || !selection) {
      return null;
    }
    const containers = snapshot.containers as Record<string, ContainerData> | undefined;
    return containers?.[selection] ?? null;
  }

  renderParamPanel(): void {
    const doc = this.els.paramPanel.ownerDocument;
    this.els.paramPanel.innerHTML = "";
    const container = this.selectedContainer();
    if (!container) {
      const hint = doc.createElement("p");
      hint.className = "hint";
      hint.textContent = "Click an element in the preview to edit its parameters.";
      this.els.paramPanel.appendChild(hint);
      return;
    }
    const title = doc.createElement("h3");
    title.textContent = `${container.id} (${container.kind})`;
    this.els.paramPanel.appendChild(title);
    for (const row of paramRows(container)) {
      const label = doc.createElement("label");
      label.className = "param-row";
      const span = doc.createElement("span");
      span.textContent = row.label;
      label.appendChild(span);
      const input = doc.createElement("input");
      input.type = row.control === "number" ? "number"
        : row.control === "color" ? "color" : "text";
      if (row.control === "number") {
        input.step = "any";
      }
      input.value = String(row.value);
      input.addEventListener("change", () => {
        let value: string | number;
        try {
          value = validateRowValue(row, input.value);
          input.classList.remove("invalid");
        } catch {
          input.classList.add("invalid");
          return; // no request for invalid numeric input
        }
        void this.postParamEdit(container.id, row.path, value, input);
      });
      label.appendChild(input);
      this.els.paramPanel.appendChild(label);
    }
  }

  async postParamEdit(containerId: string, path: string,
                      value: string | number,
                      input: HTMLInputElement): Promise<void> {
    if (!this.state.sessionId || this.mutationInFlight) {
      return;
    }
    this.mutationInFlight = true;
    try {
      await this.api.postOps(this.state.sessionId,
                             [buildModifyOp(containerId, path, value)]);
      this.banner("");
      await this.refreshPreview(true);
      await this.refreshDocument();
    } catch (err) {
      if (err instanceof ApiError) {
        input.classList.add("invalid");
      }
      this.banner(`edit failed: ${(err as Error).message}`);
      await this.refreshDocument(); // roll the panel back to server truth
    } finally {
      this.mutationInFlight = false;
    }
  }
}
