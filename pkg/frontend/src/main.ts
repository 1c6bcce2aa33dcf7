import { ApiClient } from "./api.js";
import { App, AppElements } from "./app.js";

function grab<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing #${id}`);
  }
  return el as T;
}

const els: AppElements = {
  preview: grab("preview"),
  chatLog: grab("chat-log"),
  chatInput: grab<HTMLInputElement>("chat-input"),
  chatSend: grab<HTMLButtonElement>("chat-send"),
  paramPanel: grab("param-panel"),
  banner: grab("banner"),
  selectionLabel: grab("selection-label"),
};

const app = new App(new ApiClient(""), els);
void app.start();
