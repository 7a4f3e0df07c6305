// World <-> screen coordinates. The scene is viewed top-down: world x maps
// to screen x, world z to screen y (z grows away from the human, i.e. up
// the canvas). The map is a pure affine transform, fixed once fitted.

export interface GroundPoint {
  x: number;
  z: number;
}

export interface ScreenPoint {
  sx: number;
  sy: number;
}

export interface AffineMap {
  scale: number; // pixels per metre, uniform in both axes
  offsetX: number;
  offsetY: number;
}

export interface Bounds {
  minX: number;
  maxX: number;
  minZ: number;
  maxZ: number;
}

export function boundsOf(points: GroundPoint[], pad = 0.75): Bounds {
  if (points.length === 0) {
    return { minX: -2 - pad, maxX: 2 + pad, minZ: -2 - pad, maxZ: 2 + pad };
  }
  let minX = Infinity, maxX = -Infinity, minZ = Infinity, maxZ = -Infinity;
  for (const p of points) {
    minX = Math.min(minX, p.x);
    maxX = Math.max(maxX, p.x);
    minZ = Math.min(minZ, p.z);
    maxZ = Math.max(maxZ, p.z);
  }
  return { minX: minX - pad, maxX: maxX + pad, minZ: minZ - pad, maxZ: maxZ + pad };
}

export function fitMap(bounds: Bounds, width: number, height: number): AffineMap {
  const spanX = Math.max(bounds.maxX - bounds.minX, 1e-6);
  const spanZ = Math.max(bounds.maxZ - bounds.minZ, 1e-6);
  const scale = Math.min(width / spanX, height / spanZ);
  // centre the fitted span in the canvas; z is inverted (larger z -> higher)
  const offsetX = (width - scale * spanX) / 2 - scale * bounds.minX;
  const offsetY = (height - scale * spanZ) / 2 + scale * bounds.maxZ;
  return { scale, offsetX, offsetY };
}

export function worldToScreen(map: AffineMap, p: GroundPoint): ScreenPoint {
  return { sx: map.offsetX + map.scale * p.x, sy: map.offsetY - map.scale * p.z };
}

export function screenToWorld(map: AffineMap, p: ScreenPoint): GroundPoint {
  return { x: (p.sx - map.offsetX) / map.scale, z: (map.offsetY - p.sy) / map.scale };
}
