import { describe, expect, it } from "vitest";

import { boundsOf, fitMap, worldToScreen } from "../src/mapping.js";
import type { SceneObject, SceneStateMsg } from "../src/protocol.js";
import { SceneView, glyphColor, objectGlyph } from "../src/sceneView.js";

function obj(id: string, kind: string, x: number, z: number, extra: Partial<SceneObject> = {}): SceneObject {
  return {
    id,
    kind,
    attributes: [],
    position: [x, 0, z],
    graspable: true,
    held_by: null,
    ...extra,
  };
}

const MAP = fitMap(boundsOf([{ x: -1, z: 0 }, { x: 1, z: 2 }]), 640, 520);

function stateMsg(objects: SceneObject[]): SceneStateMsg {
  return { seq: 1, type: "scene_state", objects };
}

describe("scene view", () => {
  it("draws one glyph per object at the mapped position", () => {
    const view = new SceneView(MAP);
    view.applySceneState(stateMsg([
      obj("knife1", "knife", -0.6, 1.0),
      obj("cup_blue", "cup", 0.15, 1.45, { attributes: ["blue"] }),
      obj("plate1", "plate", 0.6, 1.2),
    ]));
    const glyphs = view.glyphs();
    expect(glyphs).toHaveLength(3);
    const cup = glyphs.find((g) => g.id === "cup_blue")!;
    const expected = worldToScreen(MAP, { x: 0.15, z: 1.45 });
    expect(cup.sx).toBeCloseTo(expected.sx, 9);
    expect(cup.sy).toBeCloseTo(expected.sy, 9);
    expect(view.warnings).toEqual([]);
  });

  it("moves the glyph when the object moves", () => {
    const view = new SceneView(MAP);
    view.applySceneState(stateMsg([obj("plate1", "plate", 0.6, 1.2)]));
    const before = view.glyphs()[0]!;
    view.applySceneState(stateMsg([obj("plate1", "plate", 0.0, 1.5)]));
    const after = view.glyphs()[0]!;
    expect(after.sx).not.toBeCloseTo(before.sx, 3);
  });

  it("marks held objects", () => {
    const view = new SceneView(MAP);
    view.applySceneState(stateMsg([obj("cup1", "cup", 0, 1, { held_by: "agent" })]));
    expect(view.glyphs()[0]!.held).toBe(true);
  });

  it("falls back with a warning on an unknown kind", () => {
    const { glyph, warning } = objectGlyph(obj("mystery1", "gizmo", 0, 0), MAP);
    expect(glyph.shape).toBe("fallback");
    expect(warning).toMatch(/unknown object kind/);
  });

  it("colors from the first known attribute", () => {
    expect(glyphColor(["blue"])).not.toBe(glyphColor(["red"]));
    expect(glyphColor(["shiny"])).toBe(glyphColor([]));
  });

  it("tracks the optimistic marker until resolution arrives", () => {
    const view = new SceneView(MAP);
    view.placeLocalMarker({ x: 0.1, z: 1.4 });
    expect(view.marker).toEqual({ world: { x: 0.1, z: 1.4 }, resolved: false });
    view.resolveMarker({ x: 0.1, z: 1.4 });
    expect(view.marker!.resolved).toBe(true);
  });

  it("hit-tests the nearest glyph within radius", () => {
    const view = new SceneView(MAP);
    view.applySceneState(stateMsg([
      obj("a", "cup", 0.0, 1.0),
      obj("b", "cup", 0.2, 1.0),
    ]));
    const at = worldToScreen(MAP, { x: 0.0, z: 1.0 });
    expect(view.hitTest(at.sx + 2, at.sy)!.id).toBe("a");
    expect(view.hitTest(at.sx - 300, at.sy)).toBeNull();
  });
});
