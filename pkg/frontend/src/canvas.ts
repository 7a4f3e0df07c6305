// Canvas drawing for the scene view. Everything worth testing lives in
// sceneView.ts; this file just strokes the computed glyphs.

import type { AffineMap } from "./mapping.js";
import { worldToScreen } from "./mapping.js";
import type { DeixisMarker, Glyph } from "./sceneView.js";

export function drawScene(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  glyphs: Glyph[],
  marker: DeixisMarker | null,
  map: AffineMap,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#f4f1ea";
  ctx.fillRect(0, 0, width, height);

  for (const glyph of glyphs) {
    drawGlyph(ctx, glyph);
  }
  if (marker) {
    const { sx, sy } = worldToScreen(map, marker.world);
    ctx.strokeStyle = marker.resolved ? "#7a3fd1" : "#b39ddb";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(sx, sy, 10, 0, Math.PI * 2);
    ctx.moveTo(sx - 14, sy);
    ctx.lineTo(sx + 14, sy);
    ctx.moveTo(sx, sy - 14);
    ctx.lineTo(sx, sy + 14);
    ctx.stroke();
  }
}

function drawGlyph(ctx: CanvasRenderingContext2D, glyph: Glyph): void {
  const { sx, sy } = glyph;
  ctx.fillStyle = glyph.color;
  ctx.strokeStyle = "#2b2b2b";
  ctx.lineWidth = 1.5;

  switch (glyph.shape) {
    case "disc":
      circle(ctx, sx, sy, 13, true);
      break;
    case "ring":
      circle(ctx, sx, sy, 9, true);
      ctx.fillStyle = "#f4f1ea";
      circle(ctx, sx, sy, 4, true);
      break;
    case "blade":
      ctx.save();
      ctx.translate(sx, sy);
      ctx.rotate(-0.5);
      ctx.fillRect(-3, -13, 6, 26);
      ctx.strokeRect(-3, -13, 6, 26);
      ctx.restore();
      break;
    case "square":
      ctx.fillRect(sx - 9, sy - 9, 18, 18);
      ctx.strokeRect(sx - 9, sy - 9, 18, 18);
      break;
    case "ball":
      circle(ctx, sx, sy, 8, true);
      break;
    case "post":
      ctx.beginPath();
      ctx.moveTo(sx, sy - 13);
      ctx.lineTo(sx - 9, sy + 9);
      ctx.lineTo(sx + 9, sy + 9);
      ctx.closePath();
      ctx.fill();
      ctx.stroke();
      break;
    default: // fallback: something visibly unknown
      circle(ctx, sx, sy, 10, false);
      ctx.fillStyle = "#2b2b2b";
      ctx.font = "12px sans-serif";
      ctx.textAlign = "center";
      ctx.fillText("?", sx, sy + 4);
  }

  if (glyph.held) {
    ctx.strokeStyle = "#e08a00";
    ctx.lineWidth = 2.5;
    circle(ctx, sx, sy, 17, false);
  }

  ctx.fillStyle = "#2b2b2b";
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(glyph.label, sx, sy + 28);
}

function circle(ctx: CanvasRenderingContext2D, x: number, y: number, r: number, fill: boolean) {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, Math.PI * 2);
  if (fill) ctx.fill();
  ctx.stroke();
}
