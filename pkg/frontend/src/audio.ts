// Feedback tones synthesized on the fly; no audio assets. Silently
// inert where WebAudio is unavailable (tests, older browsers).

export class GameSounds {
  private ctx: AudioContext | null = null;

  private context(): AudioContext | null {
    if (this.ctx) return this.ctx;
    const Ctor = (globalThis as { AudioContext?: typeof AudioContext }).AudioContext;
    if (!Ctor) return null;
    this.ctx = new Ctor();
    return this.ctx;
  }

  private tone(freq: number, duration: number, type: OscillatorType, gain: number, delay = 0): void {
    const ctx = this.context();
    if (!ctx) return;
    const osc = ctx.createOscillator();
    const amp = ctx.createGain();
    const t0 = ctx.currentTime + delay;
    osc.type = type;
    osc.frequency.value = freq;
    amp.gain.setValueAtTime(gain, t0);
    amp.gain.exponentialRampToValueAtTime(1e-4, t0 + duration);
    osc.connect(amp).connect(ctx.destination);
    osc.start(t0);
    osc.stop(t0 + duration);
  }

  hit(): void {
    this.tone(880, 0.08, "sine", 0.12);
  }

  mistake(): void {
    this.tone(196, 0.25, "square", 0.08);
  }

  complete(): void {
    this.tone(523.25, 0.15, "sine", 0.12);
    this.tone(659.25, 0.15, "sine", 0.12, 0.12);
    this.tone(783.99, 0.3, "sine", 0.12, 0.24);
  }
}
