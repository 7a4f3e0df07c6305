// Wires the page together: canvas clicks are pointing gestures, the text
// box is speech, buttons are head/iconic gestures, and the transcript pane
// streams the agent's moves.

import { drawScene } from "./canvas.js";
import { SessionClient } from "./client.js";
import { boundsOf, fitMap, screenToWorld, type AffineMap } from "./mapping.js";
import type { ServiceMessage } from "./protocol.js";
import { SceneView } from "./sceneView.js";
import { Transcript } from "./transcript.js";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const transcriptEl = document.getElementById("transcript")!;
const bannerEl = document.getElementById("banner")!;
const sayForm = document.getElementById("say-form") as HTMLFormElement;
const sayInput = document.getElementById("say-input") as HTMLInputElement;
const gestureForm = document.getElementById("gesture-form") as HTMLFormElement;
const gestureInput = document.getElementById("gesture-id") as HTMLInputElement;

let view: SceneView | null = null;
let map: AffineMap | null = null;
const transcript = new Transcript();

function redraw(): void {
  if (!view || !map) return;
  const glyphs = view.glyphs();
  for (const warning of view.warnings) console.warn(warning);
  drawScene(ctx, canvas.width, canvas.height, glyphs, view.marker, map);
}

function renderTranscript(): void {
  transcriptEl.innerHTML = "";
  for (const entry of transcript.entries) {
    const row = document.createElement("div");
    row.className = `turn ${entry.who} ${entry.kind}`;
    const seq = entry.seq !== null ? `#${entry.seq} ` : "";
    row.textContent = `${seq}${entry.who === "you" ? "you" : "agent"}: ${entry.text}`;
    if (entry.record) {
      const rec = document.createElement("span");
      rec.className = "record";
      rec.textContent = " " + JSON.stringify(entry.record);
      row.appendChild(rec);
    }
    transcriptEl.appendChild(row);
  }
  if (!transcript.gapFree) {
    const warn = document.createElement("div");
    warn.className = "turn gap";
    warn.textContent = `!! transcript has ${transcript.gapCount} sequence gap(s)`;
    transcriptEl.appendChild(warn);
  }
  transcriptEl.scrollTop = transcriptEl.scrollHeight;
}

function onServiceMessage(msg: ServiceMessage): void {
  transcript.noteSeq(msg.seq);
  switch (msg.type) {
    case "scene_state": {
      if (map === null) {
        const points = msg.objects.map((o) => ({ x: o.position[0], z: o.position[2] }));
        map = fitMap(boundsOf(points), canvas.width, canvas.height);
        view = new SceneView(map);
      }
      view!.applySceneState(msg);
      redraw();
      break;
    }
    case "agent_move": {
      transcript.addAgentMove(msg);
      renderTranscript();
      break;
    }
    case "stack_debug": {
      // reconcile the optimistic click marker with the engine's resolution
      const top = msg.frames[msg.frames.length - 1];
      if (top && top.indicated && view) {
        view.resolveMarker({ x: top.indicated[0], z: top.indicated[2] });
        redraw();
      }
      break;
    }
    case "error": {
      transcript.addLocal(`service error: ${msg.message}`, "error");
      renderTranscript();
      break;
    }
  }
}

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/session`;
const client = new SessionClient(
  wsUrl,
  {
    onMessage: onServiceMessage,
    onOpen: () => {
      bannerEl.classList.add("hidden");
      transcript.clear();
      map = null; // refit on the fresh scene
      view = null;
      renderTranscript();
    },
    onDisconnect: () => {
      bannerEl.classList.remove("hidden");
    },
  },
  WebSocket,
);
client.connect();

canvas.addEventListener("click", (ev) => {
  if (!map || !view) return;
  const rect = canvas.getBoundingClientRect();
  const sx = ev.clientX - rect.left;
  const sy = ev.clientY - rect.top;
  const world = screenToWorld(map, { sx, sy });
  view.placeLocalMarker(world);
  transcript.addLocal(`<points at (${world.x.toFixed(2)}, ${world.z.toFixed(2)})>`, "deixis");
  renderTranscript();
  redraw();
  client.sendClick(world.x, world.z);
});

sayForm.addEventListener("submit", (ev) => {
  ev.preventDefault();
  const text = sayInput.value.trim();
  if (!text) return;
  transcript.addLocal(text);
  renderTranscript();
  client.sendUtterance(text);
  sayInput.value = "";
});

sayInput.addEventListener("input", () => {
  (document.getElementById("say-send") as HTMLButtonElement).disabled =
    sayInput.value.trim() === "";
});

document.getElementById("btn-yes")!.addEventListener("click", () => {
  transcript.addLocal("<nods>", "head");
  renderTranscript();
  client.sendHead(true);
});

document.getElementById("btn-no")!.addEventListener("click", () => {
  transcript.addLocal("<shakes head>", "head");
  renderTranscript();
  client.sendHead(false);
});

document.getElementById("btn-reset")!.addEventListener("click", () => {
  transcript.clear();
  view?.marker && (view.marker = null);
  renderTranscript();
  client.sendReset();
});

gestureForm.addEventListener("submit", (ev) => {
  ev.preventDefault();
  const id = gestureInput.value.trim();
  if (!id) return;
  const action = (ev.submitter as HTMLButtonElement | null)?.dataset.action ?? "shape";
  if (action === "shape") {
    transcript.addLocal(`<gesture ${id}>`, "gesture");
    client.sendShape(id);
  } else if (action === "motion") {
    transcript.addLocal(`<motion ${id}>`, "gesture");
    client.sendMotion(id);
  } else {
    transcript.addLocal(`<teaches gesture ${id}>`, "gesture");
    client.sendLearn(id);
  }
  renderTranscript();
});
