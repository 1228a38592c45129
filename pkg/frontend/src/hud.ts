// HUD around the canvas: episode progress, clock, money, the queued
// action, and the overlays shown between episodes and at the end.

import type { ServerConfig } from "./protocol.js";
import type { Queued, View } from "./state.js";

export function dollars(cents: number): string {
  const sign = cents < 0 ? "-" : "";
  return `${sign}$${(Math.abs(cents) / 100).toFixed(2)}`;
}

/**
 * What this episode is still worth at the posted rate. Display only:
 * the server remains authoritative and reports the real payoff in the
 * episode_end frame.
 */
export function counterCents(cfg: ServerConfig, elapsedS: number): number {
  const steps = Math.floor(elapsedS / cfg.seconds_per_step);
  return Math.max(cfg.base_reward - cfg.per_step_cost * steps, 0);
}

export function rateLabel(cfg: ServerConfig): string {
  return `${dollars(cfg.base_reward)} for crossing, minus ${dollars(
    cfg.per_step_cost,
  )} every ${cfg.seconds_per_step} s`;
}

export function episodeLabel(episode: number, total: number): string {
  return `Episode ${episode + 1} of ${total}`;
}

export function queuedLabel(queued: Queued | null): string {
  return queued === null ? "next: (coast)" : `next: ${queued.action}`;
}

export interface HudElements {
  episode: HTMLElement;
  clock: HTMLElement;
  counter: HTMLElement;
  total: HTMLElement;
  rate: HTMLElement;
  queued: HTMLElement;
  horn: HTMLElement;
  status: HTMLElement;
  overlay: HTMLElement;
  overlayTitle: HTMLElement;
  overlayBody: HTMLElement;
  sound: HTMLElement;
}

function overlayContent(view: View): { title: string; body: string } | null {
  switch (view.phase) {
    case "connecting":
    case "joining":
      return { title: "Connecting", body: "Reaching the game server..." };
    case "dropped":
      return { title: "Connection lost", body: "Resuming your session..." };
    case "interstitial": {
      const p = view.lastPayoff;
      return {
        title: p ? `Episode ${p.episode + 1} finished` : "Episode finished",
        body: p
          ? `You earned ${dollars(p.cents)}. Next episode starts shortly.`
          : "Next episode starts shortly.",
      };
    }
    case "summary": {
      const s = view.summary;
      if (!s) return { title: "Session complete", body: "" };
      const lines = s.payoffs
        .map((cents, i) => `Episode ${i + 1}: ${dollars(cents)}`)
        .join("\n");
      return {
        title: "Session complete",
        body: `${lines}\nTotal: ${dollars(s.total_cents)}`,
      };
    }
    case "error":
      return {
        title: "Server error",
        body: view.errorReason ?? "unknown error",
      };
    case "playing":
      return null;
  }
}

export function updateHud(el: HudElements, view: View): void {
  el.episode.textContent = episodeLabel(view.episode, view.episodesTotal || 20);
  const s = view.state;
  el.clock.textContent = s ? `${s.elapsed_s} s` : "0 s";
  el.counter.textContent =
    s && view.config ? dollars(counterCents(view.config, s.elapsed_s)) : "--";
  el.total.textContent = dollars(view.cumulativeCents);
  el.rate.textContent = view.config ? rateLabel(view.config) : "";
  el.queued.textContent = queuedLabel(view.queued);
  el.horn.classList.toggle("active", Boolean(s && s.horn));
  el.sound.textContent = view.soundOn ? "sound: on" : "sound: off";
  el.status.textContent = view.phase === "playing" ? "" : view.phase;

  const overlay = overlayContent(view);
  if (overlay === null) {
    el.overlay.classList.add("hidden");
  } else {
    el.overlay.classList.remove("hidden");
    el.overlayTitle.textContent = overlay.title;
    el.overlayBody.textContent = overlay.body;
  }
}
