// Blink scheduling for the eHMI display.
//
// The display toggles with a 50% duty cycle at the frequency the service
// resolved from the design; 0 Hz means constantly on.  Frame timing is
// injectable so tests can drive the controller with synthetic timestamps.

export type FrameCallback = (timestampMs: number) => void;

/** Subscribes to a frame stream; the returned function unsubscribes. */
export type FrameSource = (cb: FrameCallback) => () => void;

export const animationFrameSource: FrameSource = (cb) => {
  let handle = 0;
  let active = true;
  const tick = (t: number) => {
    if (!active) return;
    cb(t);
    handle = requestAnimationFrame(tick);
  };
  handle = requestAnimationFrame(tick);
  return () => {
    active = false;
    cancelAnimationFrame(handle);
  };
};

/** Phase-based on/off state: on during the first half of each cycle. */
export function blinkStateAt(blinkHz: number, elapsedMs: number): boolean {
  if (blinkHz <= 0) return true;
  const phase = (elapsedMs / 1000) * blinkHz;
  return phase - Math.floor(phase) < 0.5;
}

export interface BlinkController {
  stop(): void;
  /** Number of off-to-on transitions seen so far (cycle starts). */
  readonly toggleCount: number;
}

export function startBlink(
  blinkHz: number,
  onStateChange: (on: boolean) => void,
  frames: FrameSource = animationFrameSource,
): BlinkController {
  let origin: number | null = null;
  let current: boolean | null = null;
  let toggles = 0;

  const unsubscribe = frames((t) => {
    if (origin === null) origin = t;
    const on = blinkStateAt(blinkHz, t - origin);
    if (on !== current) {
      if (on && current === false) toggles += 1;
      current = on;
      onStateChange(on);
    }
  });

  return {
    stop: unsubscribe,
    get toggleCount() {
      return toggles;
    },
  };
}
