import { describe, expect, it } from "vitest";

import type { ServerMsg } from "../src/protocol.js";
import { createStore } from "../src/state.js";
import type { Effect, Store } from "../src/state.js";
import { episodeEnd, joined, sessionEnd, state } from "./helpers.js";

function msg(store: Store, m: ServerMsg): Effect[] {
  return store.apply({ kind: "message", msg: m });
}

function playingStore(): Store {
  const store = createStore();
  store.apply({ kind: "open" });
  msg(store, joined());
  msg(store, state());
  return store;
}

function sends(effects: Effect[]): Effect[] {
  return effects.filter((e) => e.kind === "send");
}

describe("connection lifecycle", () => {
  it("joins fresh on the first open", () => {
    const store = createStore();
    const effects = store.apply({ kind: "open" });
    expect(effects).toEqual([{ kind: "send", msg: { type: "join" } }]);
    expect(store.view.phase).toBe("joining");
  });

  it("resumes with the known session id after a drop", () => {
    const store = playingStore();
    const dropEffects = store.apply({ kind: "closed" });
    expect(dropEffects).toEqual([{ kind: "reconnect", delayMs: 1000 }]);
    expect(store.view.phase).toBe("dropped");

    const effects = store.apply({ kind: "open" });
    expect(effects).toEqual([
      { kind: "send", msg: { type: "resume", session_id: "s0000" } },
    ]);
  });

  it("backs off on repeated drops and resets after rejoining", () => {
    const store = playingStore();
    const delays: number[] = [];
    for (let i = 0; i < 6; i += 1) {
      const [eff] = store.apply({ kind: "closed" });
      if (eff?.kind === "reconnect") delays.push(eff.delayMs);
    }
    expect(delays).toEqual([1000, 2000, 4000, 8000, 10000, 10000]);

    store.apply({ kind: "open" });
    msg(store, joined());
    const [eff] = store.apply({ kind: "closed" });
    expect(eff).toEqual({ kind: "reconnect", delayMs: 1000 });
  });

  it("stays put when the socket closes after the session is over", () => {
    const store = playingStore();
    msg(store, episodeEnd(9));
    msg(store, sessionEnd([9]));
    expect(store.apply({ kind: "closed" })).toEqual([]);
    expect(store.view.phase).toBe("summary");
  });

  it("a resume discards the stale rendered frame", () => {
    const store = playingStore();
    store.apply({ kind: "closed" });
    store.apply({ kind: "open" });
    msg(store, joined({ episode: 3, cumulative_cents: 21 }));
    expect(store.view.state).toBeNull();
    expect(store.view.episode).toBe(3);
    expect(store.view.cumulativeCents).toBe(21);
  });
});

describe("state frames", () => {
  it("renders exactly the last accepted frame", () => {
    const store = playingStore();
    const frame = state({ tick: 3, sdc_cell: 2, human_cell: 4, elapsed_s: 3 });
    msg(store, frame);
    expect(store.view.state).toEqual(frame);
  });

  it("discards out-of-order ticks within an episode", () => {
    const store = playingStore();
    msg(store, state({ tick: 5, sdc_cell: 3 }));
    msg(store, state({ tick: 4, sdc_cell: 9 }));
    msg(store, state({ tick: 5, sdc_cell: 9 }));
    expect(store.view.state?.tick).toBe(5);
    expect(store.view.state?.sdc_cell).toBe(3);
  });

  it("discards frames from an already-finished episode", () => {
    const store = playingStore();
    msg(store, episodeEnd(9));
    msg(store, state({ episode: 1, tick: 0 }));
    msg(store, state({ episode: 0, tick: 9 }));
    expect(store.view.state?.episode).toBe(1);
    expect(store.view.episode).toBe(1);
  });

  it("emits a horn cue only when the frame horns", () => {
    const store = playingStore();
    expect(msg(store, state({ tick: 1, horn: true }))).toEqual([
      { kind: "horn" },
    ]);
    expect(msg(store, state({ tick: 2, horn: false }))).toEqual([]);
  });

  it("tracks the running session total from frames", () => {
    const store = playingStore();
    msg(store, state({ tick: 1, cumulative_cents: 24 }));
    expect(store.view.cumulativeCents).toBe(24);
  });

  it("never lets a straggler frame stomp the summary screen", () => {
    const store = playingStore();
    msg(store, episodeEnd(9));
    msg(store, sessionEnd([9]));
    msg(store, state({ tick: 9 }));
    expect(store.view.phase).toBe("summary");
  });
});

describe("input latching", () => {
  it("sends one input frame for the current tick", () => {
    const store = playingStore();
    const effects = store.apply({ kind: "key", action: "forward" });
    expect(sends(effects)).toEqual([
      {
        kind: "send",
        msg: { type: "input", episode: 0, tick: 0, action: "forward" },
      },
    ]);
    expect(store.view.queued).toEqual({ action: "forward", sentTick: 0 });
  });

  it("never sends twice in one tick; the newer intent waits", () => {
    const store = playingStore();
    store.apply({ kind: "key", action: "forward" });
    const second = store.apply({ kind: "key", action: "backward" });
    expect(second).toEqual([]);
    expect(store.view.queued).toEqual({ action: "backward", sentTick: null });

    const effects = msg(store, state({ tick: 1 }));
    expect(sends(effects)).toEqual([
      {
        kind: "send",
        msg: { type: "input", episode: 0, tick: 1, action: "backward" },
      },
    ]);
  });

  it("clears the latch once the movement tick has passed", () => {
    const store = playingStore();
    store.apply({ kind: "key", action: "forward" });
    msg(store, state({ tick: 1, sdc_cell: 1 }));
    expect(store.view.queued).toBeNull();
  });

  it("ignores keys between episodes and before the first frame", () => {
    const idle = createStore();
    idle.apply({ kind: "open" });
    msg(idle, joined());
    expect(idle.apply({ kind: "key", action: "forward" })).toEqual([]);

    const store = playingStore();
    msg(store, episodeEnd(9));
    expect(store.apply({ kind: "key", action: "forward" })).toEqual([]);
    expect(store.view.queued).toBeNull();
  });

  it("drops a leftover latch when the next episode starts", () => {
    const store = playingStore();
    store.apply({ kind: "key", action: "forward" });
    store.apply({ kind: "key", action: "backward" }); // waiting, unsent
    msg(store, episodeEnd(9));
    const effects = msg(store, state({ episode: 1, tick: 0 }));
    expect(sends(effects)).toEqual([]);
    expect(store.view.queued).toBeNull();
  });
});

describe("episode boundaries", () => {
  it("shows the payoff interstitial and resumes on the next frame", () => {
    const store = playingStore();
    msg(store, state({ tick: 8, elapsed_s: 8 }));
    msg(store, episodeEnd(9));
    expect(store.view.phase).toBe("interstitial");
    expect(store.view.lastPayoff).toEqual({ episode: 0, cents: 9 });
    expect(store.view.payoffs).toEqual([9]);

    msg(store, state({ episode: 1, tick: 0 }));
    expect(store.view.phase).toBe("playing");
  });

  it("collects the final summary", () => {
    const store = playingStore();
    msg(store, episodeEnd(9));
    msg(store, state({ episode: 1, tick: 0 }));
    msg(store, episodeEnd(11));
    msg(store, sessionEnd([9, 11]));
    expect(store.view.phase).toBe("summary");
    expect(store.view.summary?.payoffs).toEqual([9, 11]);
    expect(store.view.cumulativeCents).toBe(20);
  });

  it("surfaces server errors", () => {
    const store = createStore();
    store.apply({ kind: "open" });
    msg(store, { type: "error", reason: "session is full" });
    expect(store.view.phase).toBe("error");
    expect(store.view.errorReason).toBe("session is full");
  });
});

describe("sound toggle", () => {
  it("flips the flag and nothing else", () => {
    const store = playingStore();
    expect(store.view.soundOn).toBe(false);
    expect(store.apply({ kind: "toggle-sound" })).toEqual([]);
    expect(store.view.soundOn).toBe(true);
  });
});
