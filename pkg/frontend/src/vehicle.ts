// Schematic vehicle front with the parametric eHMI rectangle.
//
// All geometry derives from the rendering payload the service resolves;
// the client never re-computes blink frequency, clamping or color math.

import { startBlink, type BlinkController, type FrameSource } from "./blink";
import type { Rendering } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

export function svgNode<K extends keyof SVGElementTagNameMap>(
  parent: Element | null,
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  parent?.appendChild(el);
  return el;
}

// Drawing canvas and the region of it the display may occupy.  The region
// covers windshield, hood and grille; v = 1 is the windshield top edge.
export const VIEW = { width: 480, height: 360 } as const;
export const DISPLAY_REGION = { x: 90, y: 60, width: 300, height: 220 } as const;

// Headlight cutouts (restricted zones the display never covers).
const HEADLIGHTS = [
  { x: 100, y: 228, width: 64, height: 34, rx: 12 },
  { x: 316, y: 228, width: 64, height: 34, rx: 12 },
] as const;

export interface VehicleView {
  root: SVGSVGElement;
  ehmiRect: SVGRectElement;
  blink: BlinkController | null;
  dispose(): void;
}

export function rgbaString(color: [number, number, number, number]): string {
  const [r, g, b, a] = color;
  const to255 = (v: number) => Math.round(v * 255);
  return `rgba(${to255(r)}, ${to255(g)}, ${to255(b)}, ${a})`;
}

/** Maps a normalized display rect onto drawing coordinates. */
export function displayRectPx(rect: Rendering["rect"]) {
  const region = DISPLAY_REGION;
  const w = rect.w * region.width;
  const h = rect.h * region.height;
  const cx = region.x + rect.center_u * region.width;
  // v grows upward: v = 1 at the top edge of the region
  const cy = region.y + (1 - rect.center_v) * region.height;
  return { x: cx - w / 2, y: cy - h / 2, width: w, height: h };
}

function drawChassis(root: SVGSVGElement): void {
  svgNode(root, "rect", {
    x: 60, y: 30, width: 360, height: 290, rx: 40,
    fill: "#e8e8ec", stroke: "#4a4a52", "stroke-width": 3,
  });
  // windshield
  svgNode(root, "rect", {
    x: 110, y: 56, width: 260, height: 86, rx: 14,
    fill: "#b9cbd8", stroke: "#4a4a52", "stroke-width": 2,
  });
  // autonomous-mode indicator strip above the windshield
  svgNode(root, "rect", {
    x: 200, y: 38, width: 80, height: 8, rx: 4, fill: "#18c7c7",
  });
  // hood crease and grille
  svgNode(root, "line", {
    x1: 90, y1: 206, x2: 390, y2: 206, stroke: "#9a9aa2", "stroke-width": 2,
  });
  svgNode(root, "rect", {
    x: 188, y: 238, width: 104, height: 40, rx: 8,
    fill: "#c7c7cd", stroke: "#4a4a52", "stroke-width": 2,
  });
  for (const light of HEADLIGHTS) {
    svgNode(root, "rect", {
      ...light, fill: "#fff6cf", stroke: "#4a4a52", "stroke-width": 2,
    });
  }
  // wheels peeking out at the bottom
  svgNode(root, "rect", { x: 72, y: 318, width: 70, height: 24, rx: 10, fill: "#2e2e33" });
  svgNode(root, "rect", { x: 338, y: 318, width: 70, height: 24, rx: 10, fill: "#2e2e33" });
}

function headlightMask(root: SVGSVGElement, id: string): string {
  const defs = svgNode(root, "defs");
  const mask = svgNode(defs, "mask", { id });
  svgNode(mask, "rect", {
    x: 0, y: 0, width: VIEW.width, height: VIEW.height, fill: "white",
  });
  for (const light of HEADLIGHTS) {
    svgNode(mask, "rect", { ...light, fill: "black" });
  }
  return `url(#${id})`;
}

let maskCounter = 0;

/**
 * Draws the vehicle and the eHMI rectangle for one design, animating the
 * rectangle at the resolved blink frequency (constantly on at 0 Hz).
 */
export function renderDesign(
  container: Element,
  rendering: Rendering,
  frames?: FrameSource,
): VehicleView {
  container.replaceChildren();
  const root = svgNode(container, "svg", {
    viewBox: `0 0 ${VIEW.width} ${VIEW.height}`,
    width: VIEW.width,
    height: VIEW.height,
    role: "img",
  });
  drawChassis(root);
  const mask = headlightMask(root, `headlight-mask-${maskCounter++}`);
  const px = displayRectPx(rendering.rect);
  const ehmiRect = svgNode(root, "rect", {
    ...px,
    fill: rgbaString(rendering.color),
    mask,
    "data-role": "ehmi",
  });
  let blink: BlinkController | null = null;
  if (rendering.blink_hz > 0) {
    blink = startBlink(
      rendering.blink_hz,
      (on) => ehmiRect.setAttribute("visibility", on ? "visible" : "hidden"),
      frames,
    );
  } else {
    ehmiRect.setAttribute("visibility", "visible");
  }
  return {
    root,
    ehmiRect,
    blink,
    dispose() {
      blink?.stop();
    },
  };
}

/** Fallback card shown when a design payload is missing or malformed. */
export function renderPlaceholder(container: Element, message: string): void {
  container.replaceChildren();
  const div = document.createElement("div");
  div.className = "placeholder";
  div.textContent = message;
  container.appendChild(div);
}
