// Maps between the model's 3D meter coordinates and canvas pixels.
//
// The vertical orientation faces the player (x right, y up), the
// horizontal one is viewed from above (x right, z toward the player).
// The remaining axis is depth; a pointer cannot supply it, so toWorld
// synthesizes the depth of the nearest dot in screen space. Clicking a
// dot therefore lands exactly on it regardless of configuration.

import type { ModelPayload, Vec3 } from "./protocol.js";

export interface Projection {
  toCanvas(p: Vec3): [number, number];
  toWorld(px: number, py: number): Vec3;
  /** pixels per meter */
  scale: number;
}

interface Axes {
  u: 0 | 1 | 2; // canvas x
  v: 0 | 1 | 2; // canvas y
  depth: 0 | 1 | 2;
  flipV: boolean;
}

function axesFor(orientation: ModelPayload["orientation"]): Axes {
  if (orientation === "vertical") {
    return { u: 0, v: 1, depth: 2, flipV: true }; // y up -> canvas y down
  }
  return { u: 0, v: 2, depth: 1, flipV: false };
}

export function fitProjection(
  model: ModelPayload,
  width: number,
  height: number,
  margin = 24,
): Projection {
  const ax = axesFor(model.orientation);
  let uMin = Infinity, uMax = -Infinity, vMin = Infinity, vMax = -Infinity;
  for (const dot of model.dots) {
    uMin = Math.min(uMin, dot[ax.u]);
    uMax = Math.max(uMax, dot[ax.u]);
    vMin = Math.min(vMin, dot[ax.v]);
    vMax = Math.max(vMax, dot[ax.v]);
  }
  const uRange = Math.max(uMax - uMin, 1e-9);
  const vRange = Math.max(vMax - vMin, 1e-9);
  const scale = Math.min(
    (width - 2 * margin) / uRange,
    (height - 2 * margin) / vRange,
  );
  const uOff = (width - scale * uRange) / 2;
  const vOff = (height - scale * vRange) / 2;

  const toCanvas = (p: Vec3): [number, number] => {
    const cu = uOff + scale * (p[ax.u] - uMin);
    const cv = scale * (p[ax.v] - vMin);
    return [cu, ax.flipV ? height - vOff - cv : vOff + cv];
  };

  // precomputed screen positions for the nearest-dot depth lookup
  const screen = model.dots.map(toCanvas);

  const toWorld = (px: number, py: number): Vec3 => {
    const cu = (px - uOff) / scale + uMin;
    const cv = (ax.flipV ? height - vOff - py : py - vOff) / scale + vMin;
    let best = 0;
    let bestD = Infinity;
    for (let i = 0; i < screen.length; i++) {
      const d = (screen[i][0] - px) ** 2 + (screen[i][1] - py) ** 2;
      if (d < bestD) {
        bestD = d;
        best = i;
      }
    }
    const world: Vec3 = [0, 0, 0];
    world[ax.u] = cu;
    world[ax.v] = cv;
    world[ax.depth] = model.dots[best][ax.depth];
    return world;
  };

  return { toCanvas, toWorld, scale };
}
