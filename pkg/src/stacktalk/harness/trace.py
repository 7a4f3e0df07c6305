"""Trace files: scripted human events with optional expected agent moves.

A trace is line-delimited JSON; each line carries either an event to replay
or an expectation to check against the next emitted move.  Replay is
deterministic in deterministic mode, so traces double as regression pins.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from ..dialogue import AgentMove, DialogueSession
from ..errors import TraceError
from ..grammar import (
    DeixisGesture,
    HeadGesture,
    IconicDynamicGesture,
    IconicStaticGesture,
    InputEvent,
    Utterance,
)
from ..scene import load_scene_file
from ..semantics import LocationValue, ObjectRef, RegionEntity

FLOAT_TOL = 1e-9


@dataclass
class TraceRecord:
    """One replayed turn: an incoming event or an outgoing agent move."""

    time: int
    direction: str  # "human" | "agent"
    payload: dict
    config_digest: str | None = None


@dataclass
class TraceResult:
    records: list[TraceRecord]
    exit_status: int
    diagnostics: list[str] = field(default_factory=list)

    @property
    def moves(self) -> list[dict]:
        return [r.payload for r in self.records if r.direction == "agent"]


def load_trace(text: str) -> list[tuple[str, dict]]:
    """Parse a trace file into (kind, payload) entries; kind is event/expect."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceError(f"line {lineno}: not valid JSON: {exc}") from exc
        if not isinstance(doc, dict) or len(doc) != 1:
            raise TraceError(f"line {lineno}: expected one of 'event'/'expect'")
        kind, payload = next(iter(doc.items()))
        if kind not in ("event", "expect") or not isinstance(payload, dict):
            raise TraceError(f"line {lineno}: expected one of 'event'/'expect'")
        entries.append((kind, payload))
    return entries


def event_from_wire(session: DialogueSession, payload: dict) -> InputEvent | str:
    """Build an InputEvent from its wire form; returns a command name for
    the non-event messages (learn_gesture, reset)."""
    kind = payload.get("type")
    time = session.next_event_time()
    if kind == "utterance":
        return InputEvent(time, Utterance(str(payload["text"])))
    if kind == "deixis":
        return InputEvent(
            time, DeixisGesture(tuple(payload["origin"]), tuple(payload["direction"]))
        )
    if kind == "deixis_click":
        vp = session.scene.human_viewpoint
        target = (float(payload["x"]), session.scene.ground_plane_height, float(payload["z"]))
        direction = tuple(t - v for t, v in zip(target, vp))
        return InputEvent(time, DeixisGesture(vp, direction))
    if kind == "gesture":
        gk = payload.get("kind")
        if gk == "iconic_static":
            return InputEvent(time, IconicStaticGesture(str(payload["shape_id"])))
        if gk == "iconic_dynamic":
            return InputEvent(time, IconicDynamicGesture(str(payload["motion_id"])))
        if gk == "head":
            return InputEvent(time, HeadGesture(bool(payload["polarity"])))
        raise TraceError(f"unknown gesture kind {gk!r}")
    if kind == "learn_gesture":
        return "learn_gesture"
    if kind == "reset":
        return "reset"
    raise TraceError(f"unknown event type {kind!r}")


def _numbers_close(a, b) -> bool:
    return abs(float(a) - float(b)) <= FLOAT_TOL


def _match_args(expected, actual) -> bool:
    if isinstance(expected, (int, float)) and isinstance(actual, (int, float)):
        return _numbers_close(expected, actual)
    if isinstance(expected, str):
        return expected == actual
    if isinstance(expected, list):
        if not isinstance(actual, list) or len(expected) != len(actual):
            return False
        return all(_match_args(e, a) for e, a in zip(expected, actual))
    if isinstance(expected, dict):
        if not isinstance(actual, dict):
            return False
        if "head" in expected and expected["head"] != actual.get("head"):
            return False
        if "args" in expected:
            return _match_args(expected["args"], actual.get("args"))
        return True
    return expected == actual


def _normalize_text(text: str) -> str:
    return " ".join(text.split())


def match_move(expect: dict, move: AgentMove) -> str | None:
    """Return None on match, otherwise a human-readable mismatch reason."""
    if expect.get("kind") and expect["kind"] != move.kind:
        return f"expected kind {expect['kind']!r}, got {move.kind!r} ({move.text})"
    if "text" in expect and _normalize_text(expect["text"]) != _normalize_text(move.text):
        return f"expected text {expect['text']!r}, got {move.text!r}"
    if "head" in expect or "args" in expect:
        if move.action_record is None:
            return "expected an action record, move has none"
        record = move.action_record.to_record()
        probe = {k: v for k, v in expect.items() if k in ("head", "args")}
        if not _match_args(probe, record):
            return f"action record mismatch: expected {probe}, got {record}"
    if "candidate" in expect:
        cand = move.named_candidate
        wanted = expect["candidate"]
        if isinstance(wanted, str):
            if not (isinstance(cand, ObjectRef) and cand.obj_id == wanted):
                return f"expected candidate {wanted!r}, got {cand!r}"
        elif isinstance(wanted, list):
            coords = None
            if isinstance(cand, LocationValue):
                coords = cand.coords
            elif isinstance(cand, RegionEntity):
                coords = cand.location
            if coords is None or not all(_numbers_close(w, c) for w, c in zip(wanted, coords)):
                return f"expected candidate at {wanted}, got {cand!r}"
    return None


def config_digest(session: DialogueSession) -> str:
    blob = json.dumps(session.stack_debug(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def replay(session: DialogueSession, entries) -> TraceResult:
    """Feed a loaded trace through a session, checking expectations in order.

    Exit status 0 means: every expectation matched and no confusion moves
    were emitted.
    """
    records: list[TraceRecord] = []
    diagnostics: list[str] = []
    pending_moves: list[AgentMove] = []
    time = 0
    confusions = 0

    def emit_moves(moves):
        nonlocal time
        for move in moves:
            time += 1
            records.append(
                TraceRecord(
                    time=time,
                    direction="agent",
                    payload=move.to_wire(),
                    config_digest=config_digest(session),
                )
            )
            pending_moves.append(move)

    for kind, payload in entries:
        if kind == "event":
            time += 1
            records.append(TraceRecord(time=time, direction="human", payload=payload))
            command = event_from_wire(session, payload)
            if command == "reset":
                session.reset()
                continue
            if command == "learn_gesture":
                try:
                    session.learn_gesture(str(payload["shape_id"]))
                except Exception as exc:
                    diagnostics.append(f"learn_gesture failed: {exc}")
                continue
            emit_moves(session.submit(command))
        else:
            if not pending_moves:
                diagnostics.append(f"expectation {payload} had no move to match")
                continue
            move = pending_moves.pop(0)
            reason = match_move(payload, move)
            if reason is not None:
                diagnostics.append(reason)

    confusions = sum(1 for r in records if r.direction == "agent" and r.payload["kind"] == "confusion")
    if confusions:
        diagnostics.append(f"{confusions} confusion move(s) emitted")
    exit_status = 0 if not diagnostics else 1
    return TraceResult(records=records, exit_status=exit_status, diagnostics=diagnostics)


def run_trace(
    scene_path,
    trace_path,
    mode=None,
    seed: int = 0,
    load_lexicon=None,
    save_lexicon=None,
) -> TraceResult:
    """Replay a trace file against a scene file."""
    scene = load_scene_file(scene_path)
    session = DialogueSession(scene, seed=seed, mode=mode)
    if load_lexicon:
        session.load_gestures(load_lexicon)
    with open(trace_path, "r", encoding="utf-8") as fh:
        entries = load_trace(fh.read())
    result = replay(session, entries)
    if save_lexicon:
        session.save_gestures(save_lexicon)
    return result
