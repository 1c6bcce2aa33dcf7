/** Controller wiring against a stubbed client: panes render, widgets edit,
 * confirm round-trips, parameter edits post modifyParams. */

import { beforeEach, describe, expect, it } from "vitest";

import type { OpsResponse, ParseResultData, PreviewResponse } from "../src/api.js";
import { App, AppElements } from "../src/app.js";

function proposalFor(text: string): ParseResultData {
  if (text.startsWith("rotate")) {
    return {
      outcome: "proposal",
      operation: { op: "createRepeater", targetId: "branch", count: 6 },
      slots: [
        { slotId: "target", kind: "targetId", currentValue: "branch",
          choices: ["branch"] },
        { slotId: "count", kind: "number", currentValue: 6 },
        { slotId: "angle", kind: "number", currentValue: 60, derived: true },
      ],
      explanation: "Repeat {{target}} {{count}} times, every {{angle}} degrees.",
      template: "repeat-polar",
    };
  }
  return { outcome: "suggestion", message: "try something else",
           exampleCommands: ["replicate the shape five times"] };
}

class StubClient {
  confirmedOverrides: Record<string, string | number> | null = null;
  postedOps: unknown[][] = [];
  previewVersion = 0;
  doc: Record<string, unknown> = {
    containers: {
      branch: {
        id: "branch", kind: "basic",
        transform: { translate: [0, 0],
                     rotate: { center: [0, 0], angleDeg: 0 },
                     scale: { sx: 1, sy: 1 } },
        primitive: { kind: "line",
                     attrs: { x1: 0, y1: 0, x2: 0, y2: -40, stroke: "#224488" } },
      },
    },
  };

  async createSession(): Promise<{ sessionId: string }> {
    return { sessionId: "s1" };
  }

  async postOps(_sid: string, ops: unknown[]): Promise<OpsResponse> {
    this.postedOps.push(ops);
    this.previewVersion += 1;
    return { version: this.previewVersion, warnings: [] };
  }

  async postNl(_sid: string, text: string): Promise<ParseResultData> {
    return proposalFor(text);
  }

  async confirmNl(_sid: string, overrides: Record<string, string | number>):
      Promise<{ version: number }> {
    this.confirmedOverrides = overrides;
    this.previewVersion += 1;
    return { version: this.previewVersion };
  }

  async getDocument(): Promise<Record<string, unknown>> {
    return this.doc;
  }

  async fetchPreview(): Promise<PreviewResponse> {
    const count = this.confirmedOverrides ? Number(this.confirmedOverrides.count) : 1;
    const lines = Array.from({ length: count },
                             () => '<line data-container-id="branch"/>').join("");
    return { svg: `<svg>${lines}</svg>`, etag: `"v${this.previewVersion}"`,
             notModified: false };
  }
}

function makeElements(): AppElements {
  document.body.innerHTML = `
    <div id="banner"></div>
    <div id="preview"></div>
    <span id="selection-label"></span>
    <div id="chat-log"></div>
    <input id="chat-input">
    <button id="chat-send"></button>
    <div id="param-panel"></div>`;
  return {
    preview: document.getElementById("preview")!,
    chatLog: document.getElementById("chat-log")!,
    chatInput: document.getElementById("chat-input") as HTMLInputElement,
    chatSend: document.getElementById("chat-send") as HTMLButtonElement,
    paramPanel: document.getElementById("param-panel")!,
    banner: document.getElementById("banner")!,
    selectionLabel: document.getElementById("selection-label")!,
  };
}

describe("App", () => {
  let client: StubClient;
  let app: App;
  let els: AppElements;

  beforeEach(async () => {
    client = new StubClient();
    els = makeElements();
    app = new App(client as never, els);
    await app.start();
  });

  it("boots a session and shows the preview", () => {
    expect(app.state.sessionId).toBe("s1");
    expect(els.preview.innerHTML).toContain("<line");
  });

  it("renders proposal widgets inline in the dialogue", async () => {
    els.chatInput.value = "rotate and copy the branch 6 times";
    await app.submitChat();
    const select = els.chatLog.querySelector("select") as HTMLSelectElement;
    const numbers = els.chatLog.querySelectorAll('input[type="number"]');
    expect(select).toBeTruthy();
    expect(select.value).toBe("branch");
    expect(numbers.length).toBe(2); // count and angle
    expect(els.chatLog.querySelector("button.confirm")).toBeTruthy();
  });

  it("widget edit + confirm sends overrides and refreshes the preview", async () => {
    els.chatInput.value = "rotate and copy the branch 6 times";
    await app.submitChat();
    const count = els.chatLog.querySelector(
      'input[data-slot-id="count"]') as HTMLInputElement;
    count.value = "12";
    count.dispatchEvent(new Event("change"));
    await app.confirmProposal();
    expect(client.confirmedOverrides).toEqual({ count: 12 });
    expect(app.state.pendingProposal).toBeNull();
    const lines = els.preview.innerHTML.match(/<line/g) ?? [];
    expect(lines.length).toBe(12);
    // the pane holds exactly what the last fetch returned
    const fresh = await client.fetchPreview();
    expect(app.state.displayedSvg).toBe(fresh.svg);
  });

  it("suggestions render example commands", async () => {
    els.chatInput.value = "what day is it today";
    await app.submitChat();
    expect(els.chatLog.textContent).toContain("replicate the shape five times");
    expect(els.chatLog.querySelector("button.confirm")).toBeNull();
  });

  it("clicking the preview selects the container and fills the panel", async () => {
    const line = els.preview.querySelector("line");
    app.handlePreviewClick(line);
    expect(app.state.selection).toBe("branch");
    expect(els.selectionLabel.textContent).toBe("branch");
    expect(els.paramPanel.textContent).toContain("branch (basic)");
    const inputs = els.paramPanel.querySelectorAll("input");
    expect(inputs.length).toBeGreaterThan(4);
  });

  it("parameter edits post one modifyParams operation", async () => {
    app.handlePreviewClick(els.preview.querySelector("line"));
    await app.postParamEdit("branch", "primitive.strokeWidth", 3,
                            document.createElement("input"));
    expect(client.postedOps.at(-1)).toEqual([
      { op: "modifyParams", targetId: "branch",
        params: { "primitive.strokeWidth": 3 } },
    ]);
  });

  it("invalid numeric input never reaches the server", async () => {
    app.handlePreviewClick(els.preview.querySelector("line"));
    const before = client.postedOps.length;
    const input = els.paramPanel.querySelector(
      'input[type="number"]') as HTMLInputElement;
    input.value = "";
    input.dispatchEvent(new Event("change"));
    await Promise.resolve();
    expect(client.postedOps.length).toBe(before);
    expect(input.classList.contains("invalid")).toBe(true);
  });
});
