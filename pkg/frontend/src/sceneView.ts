// Scene view model: objects projected to the canvas, the deixis marker,
// and what to draw for each object kind. Pure computation; canvas.ts does
// the actual strokes.

import type { AffineMap, GroundPoint } from "./mapping.js";
import { worldToScreen } from "./mapping.js";
import type { SceneObject, SceneStateMsg } from "./protocol.js";

export type GlyphShape = "disc" | "ring" | "blade" | "square" | "ball" | "post" | "fallback";

export interface Glyph {
  id: string;
  kind: string;
  shape: GlyphShape;
  sx: number;
  sy: number;
  color: string;
  label: string;
  held: boolean;
}

export interface DeixisMarker {
  world: GroundPoint;
  resolved: boolean; // false while only the optimistic local click is known
}

const KIND_SHAPES: Record<string, GlyphShape> = {
  plate: "disc",
  cup: "ring",
  knife: "blade",
  fork: "blade",
  spoon: "blade",
  block: "square",
  ball: "ball",
  lamp: "post",
};

const ATTR_COLORS: Record<string, string> = {
  blue: "#3b82d6",
  red: "#d64545",
  green: "#3f9e4d",
  yellow: "#d6b83b",
};

const DEFAULT_COLOR = "#8a8f98";

export function glyphColor(attributes: string[]): string {
  for (const attr of attributes) {
    const color = ATTR_COLORS[attr];
    if (color) return color;
  }
  return DEFAULT_COLOR;
}

export function objectGlyph(obj: SceneObject, map: AffineMap): { glyph: Glyph; warning?: string } {
  const { sx, sy } = worldToScreen(map, { x: obj.position[0], z: obj.position[2] });
  const shape = KIND_SHAPES[obj.kind];
  const glyph: Glyph = {
    id: obj.id,
    kind: obj.kind,
    shape: shape ?? "fallback",
    sx,
    sy,
    color: glyphColor(obj.attributes),
    label: obj.id,
    held: obj.held_by !== null,
  };
  if (shape === undefined) {
    return { glyph, warning: `unknown object kind ${obj.kind}; using fallback glyph` };
  }
  return { glyph };
}

export class SceneView {
  objects = new Map<string, SceneObject>();
  marker: DeixisMarker | null = null;
  warnings: string[] = [];

  constructor(public map: AffineMap) {}

  applySceneState(msg: SceneStateMsg): void {
    this.objects.clear();
    for (const obj of msg.objects) {
      this.objects.set(obj.id, obj);
    }
  }

  glyphs(): Glyph[] {
    this.warnings = [];
    const out: Glyph[] = [];
    for (const obj of this.objects.values()) {
      const { glyph, warning } = objectGlyph(obj, this.map);
      if (warning) this.warnings.push(warning);
      out.push(glyph);
    }
    return out;
  }

  placeLocalMarker(world: GroundPoint): void {
    this.marker = { world, resolved: false };
  }

  resolveMarker(world: GroundPoint): void {
    this.marker = { world, resolved: true };
  }

  // The glyph whose screen footprint contains the point, topmost last drawn.
  hitTest(sx: number, sy: number, radiusPx = 14): Glyph | null {
    let best: Glyph | null = null;
    let bestD = radiusPx;
    for (const glyph of this.glyphs()) {
      const d = Math.hypot(glyph.sx - sx, glyph.sy - sy);
      if (d <= bestD) {
        best = glyph;
        bestD = d;
      }
    }
    return best;
  }
}
