"""Live session service: one engine session per websocket connection.

The wire protocol is JSON messages; every outbound message carries the
session's monotone sequence number.  Sessions are fully isolated: each
connection loads its own copy of the scene.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from ..dialogue import DialogueSession
from ..errors import GestureError, StacktalkError
from ..scene import load_scene
from .trace import event_from_wire


class _Connection:
    def __init__(self, scene_text: str, seed: int, debug_stack: bool, lexicon_path=None):
        self.scene_text = scene_text
        self.seed = seed
        self.debug_stack = debug_stack
        self.lexicon_path = lexicon_path
        self.out_seq = 0
        self.last_client_seq = None
        self.session = self._fresh_session()

    def _fresh_session(self) -> DialogueSession:
        session = DialogueSession(load_scene(self.scene_text), seed=self.seed)
        if self.lexicon_path:
            session.load_gestures(self.lexicon_path)
        return session

    def stamp(self, message: dict) -> dict:
        self.out_seq += 1
        return {"seq": self.out_seq, **message}

    def handle(self, payload: dict) -> list[dict]:
        out: list[dict] = []
        client_seq = payload.get("seq")
        if client_seq is not None:
            if self.last_client_seq is not None and client_seq <= self.last_client_seq:
                return [self.stamp({"type": "error", "message": "non-monotone client seq"})]
            self.last_client_seq = client_seq

        kind = payload.get("type")
        if kind == "reset":
            gestures = self.session.gestures
            self.session = self._fresh_session()
            self.session.gestures.update(gestures)
            out.append(self.stamp({"type": "scene_state", **self.session.scene_snapshot()}))
            return out

        if kind == "learn_gesture":
            try:
                self.session.learn_gesture(str(payload["shape_id"]))
                out.append(
                    self.stamp(
                        {"type": "agent_move", "kind": "ack", "text": "Okay, I'll remember that."}
                    )
                )
            except (GestureError, KeyError) as exc:
                out.append(
                    self.stamp({"type": "agent_move", "kind": "confusion", "text": str(exc)})
                )
            return out

        event = event_from_wire(self.session, payload)
        moves = self.session.submit(event)
        for move in moves:
            out.append(self.stamp({"type": "agent_move", **move.to_wire()}))
        out.append(self.stamp({"type": "scene_state", **self.session.scene_snapshot()}))
        if self.debug_stack:
            out.append(self.stamp({"type": "stack_debug", **self.session.stack_debug()}))
        return out


def create_app(
    scene_text: str,
    seed: int = 0,
    debug_stack: bool = False,
    frontend_dir: str | None = None,
    lexicon_path=None,
) -> FastAPI:
    app = FastAPI(title="stacktalk session service")

    @app.get("/healthz")
    def healthz():
        return {"ok": True}

    @app.websocket("/session")
    async def session_endpoint(ws: WebSocket):
        await ws.accept()
        conn = _Connection(scene_text, seed, debug_stack, lexicon_path)
        await ws.send_json(conn.stamp({"type": "scene_state", **conn.session.scene_snapshot()}))
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    payload = json.loads(raw)
                    if not isinstance(payload, dict):
                        raise ValueError("message must be a JSON object")
                    responses = conn.handle(payload)
                except (ValueError, KeyError, TypeError, StacktalkError) as exc:
                    responses = [conn.stamp({"type": "error", "message": str(exc)})]
                for message in responses:
                    await ws.send_json(message)
        except WebSocketDisconnect:
            return

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")
    return app


def serve(
    port: int,
    scene_text: str,
    host: str = "127.0.0.1",
    seed: int = 0,
    debug_stack: bool = False,
    frontend_dir: str | None = None,
    lexicon_path=None,
) -> None:
    import uvicorn

    app = create_app(
        scene_text,
        seed=seed,
        debug_stack=debug_stack,
        frontend_dir=frontend_dir,
        lexicon_path=lexicon_path,
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")
