import type {
  EpisodeEndMsg,
  JoinedMsg,
  ServerConfig,
  SessionEndMsg,
  StateMsg,
} from "../src/protocol.js";

export const CONFIG: ServerConfig = {
  horizon_rounds: 10,
  base_reward: 13,
  per_step_cost: 1,
  theta: 2,
  approach_cells: 3,
  bridge_cells: 4,
  close_start: 2,
  far_start: 0,
  tick_ms: 1000,
  seconds_per_step: 2,
  round_limit_s: 26,
};

export function joined(overrides: Partial<JoinedMsg> = {}): JoinedMsg {
  return {
    type: "joined",
    session_id: "s0000",
    episode: 0,
    episodes_total: 20,
    cumulative_cents: 0,
    config: CONFIG,
    ...overrides,
  };
}

export function state(overrides: Partial<StateMsg> = {}): StateMsg {
  return {
    type: "state",
    episode: 0,
    tick: 0,
    sdc_cell: 0,
    human_cell: 2,
    horn: false,
    elapsed_s: 0,
    cumulative_cents: 0,
    ...overrides,
  };
}

export function episodeEnd(payoff: number, bullied = false): EpisodeEndMsg {
  return {
    type: "episode_end",
    payoff_cents: payoff,
    bullied,
    next_mode_visible: false,
  };
}

export function sessionEnd(payoffs: number[]): SessionEndMsg {
  return {
    type: "session_end",
    summary: {
      episodes: payoffs.length,
      payoffs,
      total_cents: payoffs.reduce((a, b) => a + b, 0),
      bullied_count: 0,
    },
  };
}
