// Auditory cue playback: the bundled "Stopping" clip at gain = loudness.
//
// The clip is synthesized once into an AudioBuffer (a short two-tone
// voice-like cue).  When audio is unavailable the caller gets a flag to
// surface visual-only mode instead of an exception.

export interface AudioOutcome {
  played: boolean;
  gain: number;
  reason?: string;
}

type AudioContextFactory = () => AudioContext;

const defaultFactory: AudioContextFactory = () => {
  const Ctx =
    (globalThis as { AudioContext?: typeof AudioContext }).AudioContext ??
    (globalThis as { webkitAudioContext?: typeof AudioContext }).webkitAudioContext;
  if (!Ctx) throw new Error("Web Audio unavailable");
  return new Ctx();
};

let cachedContext: AudioContext | null = null;
let cachedClip: AudioBuffer | null = null;

export function synthesizeStoppingClip(ctx: BaseAudioContext): AudioBuffer {
  const duration = 0.7;
  const rate = ctx.sampleRate;
  const buffer = ctx.createBuffer(1, Math.floor(duration * rate), rate);
  const data = buffer.getChannelData(0);
  // falling two-tone contour, long-short, like a spoken "stop-ping"
  for (let i = 0; i < data.length; i++) {
    const t = i / rate;
    const inFirst = t < 0.35;
    const f = inFirst ? 660 : 520;
    const local = inFirst ? t / 0.35 : (t - 0.4) / 0.3;
    const envelope =
      t >= 0.35 && t < 0.4
        ? 0
        : Math.sin(Math.PI * Math.min(Math.max(local, 0), 1));
    data[i] = 0.8 * envelope * Math.sin(2 * Math.PI * f * t);
  }
  return buffer;
}

/**
 * Plays the cue at the given amplitude fraction; 0 plays nothing.
 * Never throws: audio problems degrade to `{played: false}`.
 */
export function playStoppingCue(
  loudness: number,
  factory: AudioContextFactory = defaultFactory,
): AudioOutcome {
  if (loudness <= 0) {
    return { played: false, gain: 0 };
  }
  try {
    if (factory === defaultFactory) {
      cachedContext ??= factory();
      if (cachedClip === null) cachedClip = synthesizeStoppingClip(cachedContext);
      return start(cachedContext, cachedClip, loudness);
    }
    const ctx = factory();
    return start(ctx, synthesizeStoppingClip(ctx), loudness);
  } catch (err) {
    return { played: false, gain: 0, reason: String(err) };
  }
}

function start(ctx: AudioContext, clip: AudioBuffer, loudness: number): AudioOutcome {
  const source = ctx.createBufferSource();
  source.buffer = clip;
  const gainNode = ctx.createGain();
  gainNode.gain.value = loudness;
  source.connect(gainNode);
  gainNode.connect(ctx.destination);
  source.start();
  return { played: true, gain: gainNode.gain.value };
}
