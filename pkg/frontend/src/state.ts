// Single state store. Every socket message and key event flows through
// apply(), which updates the view and returns the side effects the
// caller must perform. The store never simulates the game: the only
// positions it holds are the last state frame the server sent.

import type {
  Action,
  ClientMsg,
  ServerConfig,
  ServerMsg,
  SessionSummary,
  StateMsg,
} from "./protocol.js";

export type Phase =
  | "connecting"
  | "joining"
  | "playing"
  | "interstitial"
  | "summary"
  | "error"
  | "dropped";

export interface Queued {
  action: Action;
  // tick the input frame went out for; null means it is waiting for the
  // next state frame because this tick's message was already spent
  sentTick: number | null;
}

export interface View {
  phase: Phase;
  sessionId: string | null;
  config: ServerConfig | null;
  episodesTotal: number;
  episode: number;
  state: StateMsg | null;
  queued: Queued | null;
  cumulativeCents: number;
  lastPayoff: { episode: number; cents: number } | null;
  payoffs: number[];
  summary: SessionSummary | null;
  errorReason: string | null;
  soundOn: boolean;
}

export type Event =
  | { kind: "open" }
  | { kind: "message"; msg: ServerMsg }
  | { kind: "key"; action: Action }
  | { kind: "closed" }
  | { kind: "toggle-sound" };

export type Effect =
  | { kind: "send"; msg: ClientMsg }
  | { kind: "horn" }
  | { kind: "reconnect"; delayMs: number };

const BACKOFF_START_MS = 1000;
const BACKOFF_CAP_MS = 10000;

export interface Store {
  readonly view: View;
  apply(event: Event): Effect[];
}

export function createStore(): Store {
  const view: View = {
    phase: "connecting",
    sessionId: null,
    config: null,
    episodesTotal: 0,
    episode: 0,
    state: null,
    queued: null,
    cumulativeCents: 0,
    lastPayoff: null,
    payoffs: [],
    summary: null,
    errorReason: null,
    soundOn: false,
  };
  let backoffMs = BACKOFF_START_MS;

  function onState(msg: StateMsg, effects: Effect[]): void {
    if (view.phase === "summary" || view.phase === "error") return;
    const prev = view.state;
    if (prev && msg.episode < prev.episode) return; // stale episode
    if (prev && msg.episode === prev.episode && msg.tick <= prev.tick) {
      return; // out of order within the episode
    }
    const newEpisode = prev === null || msg.episode > prev.episode;
    if (newEpisode) view.queued = null; // intent from a finished episode
    view.state = msg;
    view.episode = msg.episode;
    view.cumulativeCents = msg.cumulative_cents;
    view.phase = "playing";
    const q = view.queued;
    if (q && q.sentTick === null) {
      // a second key press last tick could not go out; it becomes this
      // tick's one message
      effects.push({
        kind: "send",
        msg: {
          type: "input",
          episode: msg.episode,
          tick: msg.tick,
          action: q.action,
        },
      });
      q.sentTick = msg.tick;
    } else if (q && q.sentTick !== null && msg.tick > q.sentTick) {
      view.queued = null; // the movement it asked for has happened
    }
    if (msg.horn) effects.push({ kind: "horn" });
  }

  function onKey(action: Action, effects: Effect[]): void {
    if (view.phase !== "playing" || view.state === null) return;
    const tick = view.state.tick;
    if (view.queued && view.queued.sentTick === tick) {
      // one input frame per tick; remember the newer intent instead
      view.queued = { action, sentTick: null };
      return;
    }
    effects.push({
      kind: "send",
      msg: { type: "input", episode: view.episode, tick, action },
    });
    view.queued = { action, sentTick: tick };
  }

  function apply(event: Event): Effect[] {
    const effects: Effect[] = [];
    switch (event.kind) {
      case "open":
        view.phase = "joining";
        effects.push({
          kind: "send",
          msg:
            view.sessionId === null
              ? { type: "join" }
              : { type: "resume", session_id: view.sessionId },
        });
        break;
      case "message": {
        const msg = event.msg;
        switch (msg.type) {
          case "joined":
            view.sessionId = msg.session_id;
            view.config = msg.config;
            view.episodesTotal = msg.episodes_total;
            view.episode = msg.episode;
            view.cumulativeCents = msg.cumulative_cents;
            view.state = null; // a resume replays the episode from scratch
            view.queued = null;
            view.phase = "playing";
            backoffMs = BACKOFF_START_MS;
            break;
          case "state":
            onState(msg, effects);
            break;
          case "episode_end":
            view.lastPayoff = { episode: view.episode, cents: msg.payoff_cents };
            view.payoffs.push(msg.payoff_cents);
            view.queued = null;
            view.phase = "interstitial";
            break;
          case "session_end":
            view.summary = msg.summary;
            view.cumulativeCents = msg.summary.total_cents;
            view.phase = "summary";
            break;
          case "error":
            view.errorReason = msg.reason;
            view.phase = "error";
            break;
        }
        break;
      }
      case "key":
        onKey(event.action, effects);
        break;
      case "closed":
        if (view.phase === "summary" || view.phase === "error") break;
        view.phase = "dropped";
        effects.push({ kind: "reconnect", delayMs: backoffMs });
        backoffMs = Math.min(backoffMs * 2, BACKOFF_CAP_MS);
        break;
      case "toggle-sound":
        view.soundOn = !view.soundOn;
        break;
    }
    return effects;
  }

  return { view, apply };
}
