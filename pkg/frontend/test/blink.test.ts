// Frame-timestamp harness for blink fidelity: drives the controller with
// synthetic frame times instead of requestAnimationFrame.

import { blinkStateAt, startBlink, type FrameSource } from "../src/blink";

function syntheticFrames(durationMs: number, fps: number): FrameSource {
  return (cb) => {
    const step = 1000 / fps;
    for (let t = 0; t <= durationMs; t += step) {
      cb(t);
    }
    return () => {};
  };
}

describe("blinkStateAt", () => {
  it("is on during the first half of each cycle (50% duty)", () => {
    expect(blinkStateAt(1, 0)).toBe(true);
    expect(blinkStateAt(1, 499)).toBe(true);
    expect(blinkStateAt(1, 501)).toBe(false);
    expect(blinkStateAt(1, 999)).toBe(false);
    expect(blinkStateAt(1, 1001)).toBe(true);
  });

  it("0 Hz means constantly on", () => {
    for (const t of [0, 100, 5000, 1e6]) {
      expect(blinkStateAt(0, t)).toBe(true);
    }
  });
});

describe("startBlink toggle counting", () => {
  it("3.2 Hz yields 16 +/- 1 toggles over 5 s", () => {
    const states: boolean[] = [];
    const controller = startBlink(
      3.2,
      (on) => states.push(on),
      syntheticFrames(5000, 60),
    );
    expect(controller.toggleCount).toBeGreaterThanOrEqual(15);
    expect(controller.toggleCount).toBeLessThanOrEqual(17);
    // the display actually alternates
    expect(states).toContain(true);
    expect(states).toContain(false);
  });

  it("counts scale with frequency", () => {
    const twoHz = startBlink(2, () => {}, syntheticFrames(5000, 60));
    expect(twoHz.toggleCount).toBeGreaterThanOrEqual(9);
    expect(twoHz.toggleCount).toBeLessThanOrEqual(11);
  });

  it("0 Hz never toggles and stays visible", () => {
    const states: boolean[] = [];
    const controller = startBlink(
      0,
      (on) => states.push(on),
      syntheticFrames(5000, 60),
    );
    expect(controller.toggleCount).toBe(0);
    expect(states).toEqual([true]);
  });

  it("survives low frame rates", () => {
    const controller = startBlink(3.2, () => {}, syntheticFrames(5000, 24));
    expect(Math.abs(controller.toggleCount - 16)).toBeLessThanOrEqual(1);
  });
});
