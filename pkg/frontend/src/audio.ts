// Audible horn. The context is created lazily on the first honk after
// the user turns sound on, which also satisfies browser autoplay rules
// (the toggle click is the required gesture).

interface GainLike {
  gain: { value: number; exponentialRampToValueAtTime(v: number, t: number): void };
  connect(node: unknown): void;
}

interface OscillatorLike {
  type: string;
  frequency: { value: number };
  connect(node: GainLike): void;
  start(t: number): void;
  stop(t: number): void;
}

export interface AudioContextLike {
  currentTime: number;
  destination: unknown;
  createOscillator(): OscillatorLike;
  createGain(): GainLike;
}

type ContextFactory = () => AudioContextLike;

function browserContext(): AudioContextLike {
  return new AudioContext() as unknown as AudioContextLike;
}

export class HornAudio {
  private ctx: AudioContextLike | null = null;

  constructor(private readonly factory: ContextFactory = browserContext) {}

  /** Two quick blasts; a no-op while sound is toggled off. */
  honk(enabled: boolean): void {
    if (!enabled) return;
    if (this.ctx === null) {
      try {
        this.ctx = this.factory();
      } catch {
        return; // no audio support; the visual horn still shows
      }
    }
    const ctx = this.ctx;
    const t0 = ctx.currentTime;
    for (const [offset, length] of [
      [0, 0.18],
      [0.26, 0.3],
    ] as const) {
      const gain = ctx.createGain();
      gain.gain.value = 0.2;
      gain.gain.exponentialRampToValueAtTime(0.001, t0 + offset + length);
      gain.connect(ctx.destination);
      // two detuned squares sound enough like a car horn
      for (const hz of [392, 311]) {
        const osc = ctx.createOscillator();
        osc.type = "square";
        osc.frequency.value = hz;
        osc.connect(gain);
        osc.start(t0 + offset);
        osc.stop(t0 + offset + length);
      }
    }
  }
}
