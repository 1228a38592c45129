// Entry point: one store, one socket, one canvas. Every socket message
// and key event funnels through run(), whose effects are the only IO.

import { HornAudio } from "./audio.js";
import { updateHud } from "./hud.js";
import type { HudElements } from "./hud.js";
import { attachKeyboard } from "./input.js";
import { Net, defaultUrl } from "./net.js";
import { drawMessage, drawScene } from "./render.js";
import { createStore } from "./state.js";
import type { Event } from "./state.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node;
}

const canvas = el("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d");
if (ctx === null) throw new Error("canvas 2d context unavailable");

const hud: HudElements = {
  episode: el("episode"),
  clock: el("clock"),
  counter: el("counter"),
  total: el("total"),
  rate: el("rate"),
  queued: el("queued"),
  horn: el("horn"),
  status: el("status"),
  overlay: el("overlay"),
  overlayTitle: el("overlay-title"),
  overlayBody: el("overlay-body"),
  sound: el("sound"),
};

const store = createStore();
const horn = new HornAudio();
const net = new Net(defaultUrl(window.location), {
  onOpen: () => run({ kind: "open" }),
  onMessage: (msg) => run({ kind: "message", msg }),
  onClose: () => run({ kind: "closed" }),
});

function paint(): void {
  const view = store.view;
  if (view.state !== null && view.config !== null) {
    drawScene(ctx!, view.config, view.state, canvas.width, canvas.height);
  } else {
    drawMessage(ctx!, "waiting for the first tick...", canvas.width, canvas.height);
  }
  updateHud(hud, view);
}

function run(event: Event): void {
  for (const effect of store.apply(event)) {
    switch (effect.kind) {
      case "send":
        net.send(effect.msg);
        break;
      case "horn":
        horn.honk(store.view.soundOn);
        break;
      case "reconnect":
        setTimeout(() => net.connect(), effect.delayMs);
        break;
    }
  }
  paint();
}

attachKeyboard(window, (action) => run({ kind: "key", action }));
el("sound").addEventListener("click", () => run({ kind: "toggle-sound" }));

net.connect();
paint();
