// Wire protocol of the session service. Mirrors docs/formats.md exactly;
// this client speaks nothing else.

export interface SceneObject {
  id: string;
  kind: string;
  attributes: string[];
  position: [number, number, number];
  graspable: boolean;
  held_by: string | null;
}

export interface SceneStateMsg {
  seq: number;
  type: "scene_state";
  objects: SceneObject[];
}

export interface ActionRecord {
  head: string;
  args: unknown[];
}

export interface AgentMoveMsg {
  seq: number;
  type: "agent_move";
  kind: "ack" | "question" | "action" | "confusion";
  text: string;
  action_record?: ActionRecord;
  named_candidate?: string | [number, number, number];
}

export interface StackDebugMsg {
  seq: number;
  type: "stack_debug";
  state: string;
  frames: Array<{
    indicated: [number, number, number] | null;
    held: string[];
    candidates: unknown[];
    pending_form: string | null;
    focus: string | null;
    origin_state: string;
  }>;
}

export interface ErrorMsg {
  seq: number;
  type: "error";
  message: string;
}

export type ServiceMessage = SceneStateMsg | AgentMoveMsg | StackDebugMsg | ErrorMsg;

export function parseServiceMessage(raw: string): ServiceMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;
  if (typeof msg.seq !== "number" || typeof msg.type !== "string") return null;
  switch (msg.type) {
    case "scene_state":
      return Array.isArray(msg.objects) ? (msg as unknown as SceneStateMsg) : null;
    case "agent_move":
      return typeof msg.text === "string" ? (msg as unknown as AgentMoveMsg) : null;
    case "stack_debug":
      return Array.isArray(msg.frames) ? (msg as unknown as StackDebugMsg) : null;
    case "error":
      return typeof msg.message === "string" ? (msg as unknown as ErrorMsg) : null;
    default:
      return null;
  }
}

export type GestureKind = "head" | "iconic_static" | "iconic_dynamic";

export interface ClientMessages {
  utterance: { text: string };
  deixis_click: { x: number; z: number };
  gesture:
    | { kind: "head"; polarity: boolean }
    | { kind: "iconic_static"; shape_id: string }
    | { kind: "iconic_dynamic"; motion_id: string };
  learn_gesture: { shape_id: string };
  reset: Record<string, never>;
}

// Builders stamp the client-side monotone sequence number.
export class MessageFactory {
  private seq = 0;

  next(): number {
    this.seq += 1;
    return this.seq;
  }

  utterance(text: string): string {
    return JSON.stringify({ seq: this.next(), type: "utterance", text });
  }

  deixisClick(x: number, z: number): string {
    return JSON.stringify({ seq: this.next(), type: "deixis_click", x, z });
  }

  headGesture(polarity: boolean): string {
    return JSON.stringify({ seq: this.next(), type: "gesture", kind: "head", polarity });
  }

  shapeGesture(shapeId: string): string {
    return JSON.stringify({
      seq: this.next(),
      type: "gesture",
      kind: "iconic_static",
      shape_id: shapeId,
    });
  }

  motionGesture(motionId: string): string {
    return JSON.stringify({
      seq: this.next(),
      type: "gesture",
      kind: "iconic_dynamic",
      motion_id: motionId,
    });
  }

  learnGesture(shapeId: string): string {
    return JSON.stringify({ seq: this.next(), type: "learn_gesture", shape_id: shapeId });
  }

  reset(): string {
    return JSON.stringify({ seq: this.next(), type: "reset" });
  }
}
