// Wire protocol spoken with the game server. These shapes mirror the
// server's frames exactly; anything that does not parse is dropped by
// the caller rather than crashing the client.

export type Action = "forward" | "stay" | "backward";

export interface ServerConfig {
  horizon_rounds: number;
  base_reward: number;
  per_step_cost: number;
  theta: number;
  approach_cells: number;
  bridge_cells: number;
  close_start: number;
  far_start: number;
  tick_ms: number;
  seconds_per_step: number;
  round_limit_s: number;
}

export interface JoinedMsg {
  type: "joined";
  session_id: string;
  episode: number;
  episodes_total: number;
  cumulative_cents: number;
  config: ServerConfig;
}

export interface StateMsg {
  type: "state";
  episode: number;
  tick: number;
  sdc_cell: number;
  human_cell: number;
  horn: boolean;
  elapsed_s: number;
  cumulative_cents: number;
}

export interface EpisodeEndMsg {
  type: "episode_end";
  payoff_cents: number;
  bullied: boolean;
  next_mode_visible: false;
}

export interface SessionSummary {
  episodes: number;
  payoffs: number[];
  total_cents: number;
  bullied_count: number;
}

export interface SessionEndMsg {
  type: "session_end";
  summary: SessionSummary;
}

export interface ErrorMsg {
  type: "error";
  reason: string;
}

export type ServerMsg =
  | JoinedMsg
  | StateMsg
  | EpisodeEndMsg
  | SessionEndMsg
  | ErrorMsg;

export interface JoinMsg {
  type: "join";
  config?: Partial<ServerConfig>;
}

export interface ResumeMsg {
  type: "resume";
  session_id: string;
}

export interface InputMsg {
  type: "input";
  episode: number;
  tick: number;
  action: Action;
}

export type ClientMsg = JoinMsg | ResumeMsg | InputMsg;

function isNum(x: unknown): x is number {
  return typeof x === "number" && Number.isFinite(x);
}

/** Parse one incoming frame; null for anything malformed or unknown. */
export function parseServerMsg(raw: string): ServerMsg | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;
  switch (msg.type) {
    case "joined":
      if (
        typeof msg.session_id === "string" &&
        isNum(msg.episode) &&
        isNum(msg.episodes_total) &&
        isNum(msg.cumulative_cents) &&
        typeof msg.config === "object" &&
        msg.config !== null
      ) {
        return msg as unknown as JoinedMsg;
      }
      return null;
    case "state":
      if (
        isNum(msg.episode) &&
        isNum(msg.tick) &&
        isNum(msg.sdc_cell) &&
        isNum(msg.human_cell) &&
        typeof msg.horn === "boolean" &&
        isNum(msg.elapsed_s) &&
        isNum(msg.cumulative_cents)
      ) {
        return msg as unknown as StateMsg;
      }
      return null;
    case "episode_end":
      if (isNum(msg.payoff_cents) && typeof msg.bullied === "boolean") {
        return msg as unknown as EpisodeEndMsg;
      }
      return null;
    case "session_end": {
      const summary = msg.summary as Record<string, unknown> | undefined;
      if (
        summary &&
        isNum(summary.episodes) &&
        Array.isArray(summary.payoffs) &&
        summary.payoffs.every(isNum) &&
        isNum(summary.total_cents) &&
        isNum(summary.bullied_count)
      ) {
        return msg as unknown as SessionEndMsg;
      }
      return null;
    }
    case "error":
      if (typeof msg.reason === "string") return msg as unknown as ErrorMsg;
      return null;
    default:
      return null;
  }
}

export function serializeClientMsg(msg: ClientMsg): string {
  return JSON.stringify(msg);
}
