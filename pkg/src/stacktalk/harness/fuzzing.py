"""Grammar-driven fuzzing: sampled move sequences replayed as concrete events.

Every sampled sequence is grammatical, so the engine should consume it
without dead-input errors, and the stack invariants must hold after every
event.  The report is deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..dialogue import DialogueSession, GestureLexiconEntry
from ..grammar import (
    DeixisGesture,
    HeadGesture,
    IconicDynamicGesture,
    IconicStaticGesture,
    InputEvent,
    Terminal,
    Utterance,
    generate,
)
from ..scene import load_scene
from ..semantics import ObjectRef, make_form

FUZZ_SHAPE = "fuzz_grip"


@dataclass
class FuzzReport:
    sequences: int
    events: int
    dead_inputs: int
    invariant_violations: int
    confusions: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.dead_inputs == 0 and self.invariant_violations == 0

    def to_text(self) -> str:
        lines = [
            f"sequences: {self.sequences}",
            f"events: {self.events}",
            f"dead_inputs: {self.dead_inputs}",
            f"invariant_violations: {self.invariant_violations}",
            f"confusions: {self.confusions}",
            f"status: {'ok' if self.ok else 'FAIL'}",
        ]
        lines.extend(self.failures)
        return "\n".join(lines) + "\n"


def _canonical_events(session: DialogueSession, sequence) -> list[InputEvent]:
    """Concrete events for a terminal sequence: canonical lexicon items and a
    deixis ray aimed at the scene's first object."""
    scene = session.scene
    first = scene.ordered_objects()[0]
    vp = scene.human_viewpoint
    target = (first.position[0], scene.ground_plane_height, first.position[2])
    ray = tuple(t - v for t, v in zip(target, vp))
    motion = sorted(session.lexicon.motions)[0] if session.lexicon.motions else "place"

    events = []
    for terminal in sequence:
        time = session.next_event_time()
        if terminal is Terminal.NOUN:
            events.append(InputEvent(time, Utterance(f"the {first.kind}")))
        elif terminal is Terminal.VERB:
            events.append(InputEvent(time, Utterance("put it there")))
        elif terminal is Terminal.PREP:
            events.append(InputEvent(time, Utterance(f"on the {first.kind}")))
        elif terminal is Terminal.DEIXIS:
            events.append(InputEvent(time, DeixisGesture(vp, ray)))
        elif terminal is Terminal.ICONIC_STATIC:
            events.append(InputEvent(time, IconicStaticGesture(FUZZ_SHAPE)))
        elif terminal is Terminal.ICONIC_DYNAMIC:
            events.append(InputEvent(time, IconicDynamicGesture(motion)))
        elif terminal is Terminal.YES:
            events.append(InputEvent(time, HeadGesture(True)))
        elif terminal is Terminal.NO:
            events.append(InputEvent(time, HeadGesture(False)))
    return events


def _check_invariants(session: DialogueSession) -> list[str]:
    problems = []
    config = session.config
    if len(config.stack) < 1:
        problems.append("stack emptied")
    if config.state == "disamb_target" and not config.top.candidates:
        problems.append("disambiguation state with empty candidate list")
    return problems


def fuzz(max_len: int, count: int, seed: int, scene_text: str | None = None) -> FuzzReport:
    """Sample `count` grammatical sequences and replay each on a fresh session."""
    if scene_text is None:
        from ..dialogue import default_scene_text

        scene_text = default_scene_text()

    sequences = generate(max_len, count, seed)
    dead = violations = confusions = events_total = 0
    failures: list[str] = []
    base_scene = load_scene(scene_text)

    for idx, sequence in enumerate(sequences):
        session = DialogueSession(base_scene.copy(), seed=seed)
        first = session.scene.ordered_objects()[0]
        session.gestures[FUZZ_SHAPE] = GestureLexiconEntry(
            shape_id=FUZZ_SHAPE,
            bound_form=make_form(session.table, "grasp", ObjectRef(first.id)),
            learned_at=0,
        )
        for event in _canonical_events(session, sequence):
            events_total += 1
            moves = session.submit(event)
            confusions += sum(1 for m in moves if m.kind == "confusion")
            for problem in _check_invariants(session):
                violations += 1
                failures.append(f"seq {idx} {''.join(t.value for t in sequence)}: {problem}")
        for err_kind, message in session.error_log:
            if err_kind == "dead-input":
                dead += 1
                failures.append(
                    f"seq {idx} {''.join(t.value for t in sequence)}: dead input: {message}"
                )

    return FuzzReport(
        sequences=len(sequences),
        events=events_total,
        dead_inputs=dead,
        invariant_violations=violations,
        confusions=confusions,
        failures=sorted(failures),
    )
