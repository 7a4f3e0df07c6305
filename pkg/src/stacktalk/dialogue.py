"""The concrete interaction machine and the per-session dialogue engine.

Wires the pieces together: classified events drive the pushdown automaton,
composition functions fold scene-resolved content into context frames, and
emit templates turn frames into agent moves (acknowledgments, candidate
questions, executed actions, confusion signals).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources

import yaml

from .automaton import (
    ClassifiedInput,
    ContextFrame,
    Machine,
    Mode,
    EPSILON_BUDGET,
    _epsilon_available,
    initial_configuration,
    machine_from_dict,
    machine_from_yaml,
    restrict,
    step,
)
from .errors import (
    ComposeError,
    CompositionError,
    DeadInputError,
    GestureError,
    PreconditionError,
    SchemaError,
    StacktalkError,
    UnknownInputError,
    ValidationError,
)
from .grammar import (
    DeixisGesture,
    HeadGesture,
    IconicDynamicGesture,
    IconicStaticGesture,
    InputEvent,
    Lexicon,
    NounPhrase,
    PrepPhrase,
    Utterance,
    VerbPhrase,
    classify_event,
    default_lexicon,
)
from .scene import (
    DeixisTarget,
    Scene,
    Vec3,
    filter_by_description,
    grasp_object,
    put_object,
    resolve_deixis,
)
from .semantics import (
    ActionTable,
    AgentRef,
    BaseType,
    Hole,
    LocationValue,
    ObjectRef,
    RegionEntity,
    SemanticForm,
    cps_apply,
    default_action_table,
    is_saturated,
    make_form,
    satisfy_precondition,
    set_active_table,
)

AGENT_ID = "agent"
FRONT_OFFSET = 0.5  # metres from the agent toward the human for "in front of you"


@dataclass
class AgentMove:
    """One agent turn: text plus, where applicable, an action or a candidate."""

    kind: str  # ack | question | action | confusion
    text: str
    action_record: SemanticForm | None = None
    named_candidate: object | None = None

    def __post_init__(self):
        if self.kind not in {"ack", "question", "action", "confusion"}:
            raise ValidationError(f"unknown move kind {self.kind!r}")
        if self.kind == "action":
            if self.action_record is None or not is_saturated(self.action_record):
                raise ValidationError("action moves need a saturated action record")

    def to_wire(self) -> dict:
        out: dict = {"kind": self.kind, "text": self.text}
        if self.action_record is not None:
            out["action_record"] = self.action_record.to_record()
        if self.named_candidate is not None:
            out["named_candidate"] = _value_to_wire(self.named_candidate)
        return out


def _value_to_wire(value):
    if isinstance(value, ObjectRef):
        return value.obj_id
    if isinstance(value, AgentRef):
        return value.agent_id
    if isinstance(value, (LocationValue, RegionEntity)):
        coords = value.coords if isinstance(value, LocationValue) else value.location
        return list(coords)
    if isinstance(value, SemanticForm):
        return value.to_record()
    return str(value)


class Templates:
    """Surface strings for agent moves, loaded from a resource file."""

    def __init__(self, entries: dict[str, str]):
        self.entries = dict(entries)

    @staticmethod
    def from_yaml(text: str) -> "Templates":
        doc = yaml.safe_load(text)
        if not isinstance(doc, dict):
            raise SchemaError("templates file must be a mapping")
        return Templates({str(k): str(v) for k, v in doc.items()})

    def render(self, key: str, **kw) -> str:
        try:
            return self.entries[key].format(**kw)
        except KeyError as exc:
            raise SchemaError(f"missing template or placeholder for {key!r}: {exc}") from exc


@lru_cache(maxsize=1)
def default_templates() -> Templates:
    text = resources.files("stacktalk.data").joinpath("templates.yaml").read_text("utf-8")
    return Templates.from_yaml(text)


def default_machine_doc() -> str:
    return resources.files("stacktalk.data").joinpath("machine.yaml").read_text("utf-8")


@lru_cache(maxsize=1)
def _default_machine_dict() -> dict:
    return yaml.safe_load(default_machine_doc())


def default_scene_text() -> str:
    return (
        resources.files("stacktalk.data")
        .joinpath("scenes/table_scene.yaml")
        .read_text("utf-8")
    )


@dataclass(frozen=True)
class GestureLexiconEntry:
    """A learned iconic gesture bound to a grounded action form."""

    shape_id: str
    bound_form: SemanticForm
    learned_at: int


# ---------------------------------------------------------------------------
# Rendering helpers
# ---------------------------------------------------------------------------


def _fmt_location(coords) -> str:
    return "(" + ", ".join(f"{c:.2f}" for c in coords) + ")"


def describe_object(scene: Scene, obj_id: str) -> str:
    obj = scene.objects.get(obj_id)
    if obj is None:
        return obj_id
    attrs = " ".join(sorted(obj.attributes))
    return f"the {attrs} {obj.kind}" if attrs else f"the {obj.kind}"


def describe_value(value, scene: Scene) -> str:
    if isinstance(value, ObjectRef):
        return describe_object(scene, value.obj_id)
    if isinstance(value, AgentRef):
        return "you"
    if isinstance(value, LocationValue):
        return _fmt_location(value.coords)
    if isinstance(value, RegionEntity):
        return _fmt_location(value.location)
    if isinstance(value, SemanticForm):
        return str(value)
    return str(value)


_RELATION_WORDS = {"front_of": "in front of", "at": "at"}


def _relation_word(form: SemanticForm) -> str:
    dest = _destination_arg(form)
    if isinstance(dest, SemanticForm):
        return _RELATION_WORDS.get(dest.head, dest.head)
    return "at"


def _destination_arg(form: SemanticForm):
    table = _table_for(form)
    for slot, arg in zip(table[form.head].slots, form.args):
        if slot.name == "destination":
            return arg
    return None


def _theme_arg(form: SemanticForm):
    table = _table_for(form)
    for slot, arg in zip(table[form.head].slots, form.args):
        if slot.name == "theme":
            return arg
    return None


_TABLE_FALLBACK: ActionTable | None = None


def _table_for(form: SemanticForm) -> ActionTable:
    global _TABLE_FALLBACK
    if _TABLE_FALLBACK is None:
        _TABLE_FALLBACK = default_action_table()
    return _TABLE_FALLBACK


# ---------------------------------------------------------------------------
# Module-level dialogue operations
# ---------------------------------------------------------------------------


def propose_candidate(
    frame: ContextFrame,
    scene: Scene,
    table: ActionTable | None = None,
    templates: Templates | None = None,
) -> AgentMove:
    """Build the question naming the head of the frame's candidate list.

    With a pending form the question is phrased from the tentative
    composition of that candidate; without one it is a bare object check.
    The frame itself is never mutated.
    """
    if not frame.candidates:
        raise StacktalkError("propose_candidate on an empty candidate list")
    table = table or default_action_table()
    templates = templates or default_templates()
    head = frame.candidates[0]
    candidate_text = describe_value(head, scene)

    if frame.pending_form is None:
        text = templates.render("question_object", candidate=candidate_text)
        return AgentMove(kind="question", text=text, named_candidate=head)

    pending = frame.pending_form
    verb = pending.head
    if verb == "put":
        theme = _theme_arg(pending)
        theme_text = "it" if theme is None or isinstance(theme, Hole) else describe_value(theme, scene)
        text = templates.render(
            "question_put",
            theme=theme_text,
            relation=_relation_word(pending),
            candidate=candidate_text,
        )
    elif verb == "grasp":
        text = templates.render("question_grasp", candidate=candidate_text)
    elif verb == "reach":
        text = templates.render("question_reach", candidate=candidate_text)
    else:
        text = templates.render("question_generic", verb=verb, candidate=candidate_text)
    return AgentMove(kind="question", text=text, named_candidate=head)


def resolve_location(slot, scene: Scene) -> Vec3:
    """Reduce a destination value to concrete coordinates in the scene."""
    if isinstance(slot, LocationValue):
        return slot.coords
    if isinstance(slot, RegionEntity):
        return slot.location
    if isinstance(slot, ObjectRef):
        return scene.objects[slot.obj_id].position
    if isinstance(slot, SemanticForm):
        if slot.head == "at":
            return resolve_location(slot.args[0], scene)
        if slot.head == "front_of":
            anchor = slot.args[0]
            base = (
                scene.agent_origin
                if isinstance(anchor, AgentRef)
                else resolve_location(anchor, scene)
            )
            dx = scene.human_viewpoint[0] - base[0]
            dz = scene.human_viewpoint[2] - base[2]
            norm = math.hypot(dx, dz) or 1.0
            return (
                base[0] + FRONT_OFFSET * dx / norm,
                scene.ground_plane_height,
                base[2] + FRONT_OFFSET * dz / norm,
            )
        if slot.head in ("on", "in", "near"):
            return resolve_location(slot.args[0], scene)
    raise CompositionError(f"cannot resolve {slot!r} to a location")


def execute_action(
    form: SemanticForm,
    scene: Scene,
    table: ActionTable | None = None,
    templates: Templates | None = None,
) -> AgentMove:
    """Apply a saturated action to the scene and report the move.

    put moves its theme (grasping it first when not already held) and
    releases it; grasp adds to the held set; reach only marks attention.
    Refusals (ungraspable theme, out-of-bounds target) leave the scene
    untouched.
    """
    table = table or default_action_table()
    templates = templates or default_templates()
    if not is_saturated(form):
        raise CompositionError(f"cannot execute unsaturated form {form}")

    if form.head == "put":
        theme, dest = form.args[0], form.args[1]
        if not isinstance(theme, ObjectRef):
            raise CompositionError("put needs an object theme")
        obj = scene.objects.get(theme.obj_id)
        if obj is None:
            raise CompositionError(f"unknown object {theme.obj_id!r}")
        location = resolve_location(dest, scene)
        if not scene.in_bounds(location):
            return AgentMove(kind="confusion", text=templates.render("refusal_out_of_bounds"))
        if obj.held_by != AGENT_ID:
            if not obj.graspable:
                thing = describe_object(scene, theme.obj_id)
                return AgentMove(
                    kind="confusion", text=templates.render("refusal_ungraspable", thing=thing)
                )
            grasp_object(scene, theme.obj_id, AGENT_ID)
        put_object(scene, theme.obj_id, location)
        return AgentMove(kind="action", text=templates.render("ack_done"), action_record=form)

    if form.head == "grasp":
        theme = form.args[0]
        if not isinstance(theme, ObjectRef):
            raise CompositionError("grasp needs an object theme")
        obj = scene.objects.get(theme.obj_id)
        if obj is None:
            raise CompositionError(f"unknown object {theme.obj_id!r}")
        if not obj.graspable:
            thing = describe_object(scene, theme.obj_id)
            return AgentMove(
                kind="confusion", text=templates.render("refusal_ungraspable", thing=thing)
            )
        grasp_object(scene, theme.obj_id, AGENT_ID)
        return AgentMove(kind="action", text=templates.render("ack_done"), action_record=form)

    if form.head == "reach":
        return AgentMove(kind="action", text=templates.render("ack_done"), action_record=form)

    raise CompositionError(f"not an executable action: {form.head}")


# ---------------------------------------------------------------------------
# The interaction machine: composes and emits
# ---------------------------------------------------------------------------


class _InteractionContext:
    """Everything the machine's compose/emit functions close over."""

    def __init__(self, scene, lexicon, table, templates, gestures, buffer):
        self.scene = scene
        self.lexicon = lexicon
        self.table = table
        self.templates = templates
        self.gestures = gestures  # shape_id -> GestureLexiconEntry
        self.buffer = buffer  # moves produced inside composes (execution)

    # -- helpers ------------------------------------------------------------

    def _match_description(self, frame: ContextFrame, np: NounPhrase) -> list[ObjectRef]:
        if np.pronoun:
            return [ObjectRef(frame.focus)] if frame.focus else []
        if np.demonstrative:
            if frame.indicated is None:
                return []
            return [ObjectRef(oid) for oid in frame.indicated.objects_in_region]
        scene_ids = [obj.id for obj in self.scene.ordered_objects()]
        if frame.indicated is not None:
            scoped = filter_by_description(
                list(frame.indicated.objects_in_region), self.scene, np.noun, np.attributes
            )
            if scoped:
                return [ObjectRef(oid) for oid in scoped]
        ids = filter_by_description(scene_ids, self.scene, np.noun, np.attributes)
        return [ObjectRef(oid) for oid in ids]

    def _build_destination(self, frame: ContextFrame, destination):
        """Return (slot value or None for a hole, candidate list)."""
        if destination is None:
            return None, []
        if isinstance(destination, str):  # "there" / "here"
            if frame.indicated is not None:
                return LocationValue(frame.indicated.location), []
            return None, []
        pp: PrepPhrase = destination
        if pp.relative_to_agent:
            return make_form(self.table, pp.prep, AgentRef()), []
        inner = pp.inner
        if inner is not None and inner.demonstrative:
            cands: list = []
            if frame.indicated is not None:
                cands = [ObjectRef(oid) for oid in frame.indicated.objects_in_region]
                cands.append(LocationValue(frame.indicated.location))
            return make_form(self.table, pp.prep, None), cands
        if inner is not None and inner.pronoun:
            if frame.focus:
                return make_form(self.table, pp.prep, ObjectRef(frame.focus)), []
            return make_form(self.table, pp.prep, None), []
        matches = self._match_description(frame, inner) if inner else []
        if len(matches) == 1:
            return make_form(self.table, pp.prep, matches[0]), []
        return make_form(self.table, pp.prep, None), matches

    def _build_action(self, frame: ContextFrame, vp: VerbPhrase) -> ContextFrame:
        if vp.verb not in self.table:
            raise ComposeError(self.templates.render("confusion_generic"))
        slots = self.table[vp.verb].slots
        slot_names = [s.name for s in slots]

        theme_value = None
        theme_cands: list = []
        if vp.theme is not None:
            if vp.theme.pronoun:
                if frame.focus:
                    theme_value = ObjectRef(frame.focus)
                elif frame.indicated is not None:
                    theme_cands = [ObjectRef(oid) for oid in frame.indicated.objects_in_region]
            else:
                matches = self._match_description(frame, vp.theme)
                if len(matches) == 1:
                    theme_value = matches[0]
                else:
                    theme_cands = matches

        values: list = []
        dest_cands: list = []
        for name in slot_names:
            if name == "theme":
                values.append(theme_value)
            elif name == "destination":
                dest_value, dest_cands = self._build_destination(frame, vp.destination)
                values.append(dest_value)
            else:
                values.append(None)
        form = make_form(self.table, vp.verb, *values)

        if theme_value is None and "theme" in slot_names:
            candidates = tuple(theme_cands)
        elif form.lambda_order:
            candidates = tuple(dest_cands)
        else:
            candidates = ()
        return replace(frame, pending_form=form, candidates=candidates)

    def _held_ids(self) -> frozenset[str]:
        return frozenset(
            obj.id for obj in self.scene.objects.values() if obj.held_by == AGENT_ID
        )

    def _apply_candidate(self, pending: SemanticForm, candidate) -> SemanticForm:
        try:
            return cps_apply(pending, candidate)
        except CompositionError:
            # An object offered for a location hole stands for "on it".
            hole = pending.outermost_hole()
            if isinstance(candidate, ObjectRef) and hole is not None and hole.type is BaseType.LOCATION:
                return cps_apply(pending, make_form(self.table, "on", candidate))
            raise

    # -- composes: (frame, content) -> frame ---------------------------------

    def resolve_object_description(self, frame: ContextFrame, content) -> ContextFrame:
        if not isinstance(content, NounPhrase):
            raise ComposeError(self.templates.render("confusion_generic"))
        return replace(frame, candidates=tuple(self._match_description(frame, content)))

    def confirm_focus(self, frame: ContextFrame, content) -> ContextFrame:
        head = frame.candidates[0]
        if not isinstance(head, ObjectRef):
            raise ComposeError(self.templates.render("confusion_generic"))
        return replace(frame, focus=head.obj_id, candidates=(), indicated=None)

    confirm_candidate_focus = confirm_focus

    def clear_candidates(self, frame: ContextFrame, content) -> ContextFrame:
        return replace(frame, candidates=())

    def store_indicated(self, frame: ContextFrame, content) -> ContextFrame:
        target = self._resolve_ray(content)
        return replace(frame, indicated=target)

    def _resolve_ray(self, content) -> DeixisTarget:
        if not isinstance(content, DeixisGesture):
            raise ComposeError(self.templates.render("confusion_generic"))
        try:
            return resolve_deixis(self.scene, content.origin, content.direction)
        except StacktalkError:
            raise ComposeError(self.templates.render("confusion_no_target")) from None

    def interpret_deixis(self, frame: ContextFrame, content) -> ContextFrame:
        target = self._resolve_ray(content)
        pending = frame.pending_form
        objects = [ObjectRef(oid) for oid in target.objects_in_region]
        if pending is None or not pending.lambda_order:
            if not objects:
                raise ComposeError(self.templates.render("confusion_no_match"))
            return replace(frame, indicated=target, candidates=tuple(objects))
        hole = pending.outermost_hole()
        role = pending.hole_roles().get(hole.name)
        if hole.type is BaseType.LOCATION:
            candidates: list = [LocationValue(target.location)]
        elif role == "theme":
            if not objects:
                raise ComposeError(self.templates.render("confusion_no_match"))
            candidates = objects
        else:
            candidates = objects + [LocationValue(target.location)]
        return replace(frame, indicated=target, candidates=tuple(candidates))

    def build_action_form(self, frame: ContextFrame, content) -> ContextFrame:
        if not isinstance(content, VerbPhrase):
            raise ComposeError(self.templates.render("confusion_generic"))
        return self._build_action(frame, content)

    def build_implied_put(self, frame: ContextFrame, content) -> ContextFrame:
        if not isinstance(content, PrepPhrase):
            raise ComposeError(self.templates.render("confusion_generic"))
        if "put" not in self.table:
            raise ComposeError(self.templates.render("confusion_generic"))
        vp = VerbPhrase(verb="put", theme=NounPhrase(pronoun=True), destination=content)
        return self._build_action(frame, vp)

    def build_action_from_motion(self, frame: ContextFrame, content) -> ContextFrame:
        if not isinstance(content, IconicDynamicGesture):
            raise ComposeError(self.templates.render("confusion_generic"))
        verb = self.lexicon.motions.get(content.motion_id)
        if verb is None:
            raise ComposeError(self.templates.render("confusion_gesture_unknown"))
        vp = VerbPhrase(verb=verb, theme=NounPhrase(pronoun=True), destination=None)
        return self._build_action(frame, vp)

    def apply_iconic_gesture(self, frame: ContextFrame, content) -> ContextFrame:
        if not isinstance(content, IconicStaticGesture):
            raise ComposeError(self.templates.render("confusion_generic"))
        entry = self.gestures.get(content.shape_id)
        if entry is None:
            raise ComposeError(self.templates.render("confusion_gesture_unknown"))
        bound = entry.bound_form
        pending = frame.pending_form
        if pending is None:
            return replace(frame, pending_form=bound, candidates=())
        holes_before = len(pending.lambda_order)
        try:
            new_form = satisfy_precondition(pending, bound, self.table)
        except PreconditionError:
            try:
                new_form = cps_apply(pending, bound)
            except CompositionError:
                raise ComposeError(self.templates.render("confusion_compose")) from None
        if len(new_form.lambda_order) < holes_before:
            return replace(frame, pending_form=new_form, candidates=())
        return replace(frame, pending_form=new_form)

    def resolve_theme_description(self, frame: ContextFrame, content) -> ContextFrame:
        if not isinstance(content, NounPhrase):
            raise ComposeError(self.templates.render("confusion_generic"))
        pending = frame.pending_form
        if pending is None or not pending.lambda_order:
            raise ComposeError(self.templates.render("confusion_generic"))
        matches = self._match_description(frame, content)
        if len(matches) == 1:
            try:
                new_form = cps_apply(pending, matches[0])
            except CompositionError:
                raise ComposeError(self.templates.render("confusion_compose")) from None
            return replace(frame, pending_form=new_form, candidates=())
        return replace(frame, candidates=tuple(matches))

    def resolve_destination_description(self, frame: ContextFrame, content) -> ContextFrame:
        if not isinstance(content, NounPhrase):
            raise ComposeError(self.templates.render("confusion_generic"))
        pending = frame.pending_form
        if pending is None or not pending.lambda_order:
            raise ComposeError(self.templates.render("confusion_generic"))
        matches = self._match_description(frame, content)
        if not matches:
            raise ComposeError(self.templates.render("confusion_no_match"))
        if len(matches) > 1:
            return replace(frame, candidates=tuple(matches))
        try:
            new_form = self._apply_candidate(pending, matches[0])
        except CompositionError:
            raise ComposeError(self.templates.render("confusion_compose")) from None
        return replace(frame, pending_form=new_form, candidates=())

    def attach_destination_prep(self, frame: ContextFrame, content) -> ContextFrame:
        if not isinstance(content, PrepPhrase):
            raise ComposeError(self.templates.render("confusion_generic"))
        pending = frame.pending_form
        if pending is None:
            raise ComposeError(self.templates.render("confusion_generic"))
        spec = self.table[pending.head]
        slot_names = [s.name for s in spec.slots]
        if "destination" not in slot_names:
            raise ComposeError(self.templates.render("confusion_compose"))
        dest_value, dest_cands = self._build_destination(frame, content)
        values = []
        for name, arg in zip(slot_names, pending.args):
            if name == "destination":
                values.append(dest_value)
            else:
                values.append(None if isinstance(arg, Hole) else arg)
        new_form = make_form(self.table, pending.head, *values, satisfied=pending.satisfied)
        roles = new_form.hole_roles()
        if new_form.lambda_order and roles.get(new_form.lambda_order[0]) == "destination":
            candidates = tuple(dest_cands)
        else:
            candidates = frame.candidates
        return replace(frame, pending_form=new_form, candidates=candidates)

    def advance_candidate(self, frame: ContextFrame, content) -> ContextFrame:
        return replace(frame, candidates=frame.candidates[1:])

    def apply_head_candidate(self, frame: ContextFrame, content) -> ContextFrame:
        pending = frame.pending_form
        if pending is None or not frame.candidates:
            raise ComposeError(self.templates.render("confusion_generic"))
        try:
            new_form = self._apply_candidate(pending, frame.candidates[0])
        except CompositionError:
            raise ComposeError(self.templates.render("confusion_compose")) from None
        return replace(frame, pending_form=new_form, candidates=(), indicated=None)

    apply_sole_candidate = apply_head_candidate

    def filter_candidates(self, frame: ContextFrame, content) -> ContextFrame:
        if not isinstance(content, NounPhrase) or content.pronoun or content.demonstrative:
            return frame
        refs = [c for c in frame.candidates if isinstance(c, ObjectRef)]
        ids = filter_by_description(
            [r.obj_id for r in refs], self.scene, content.noun, content.attributes
        )
        if not ids:
            return frame
        return replace(frame, candidates=tuple(ObjectRef(oid) for oid in ids))

    def filter_candidates_prep(self, frame: ContextFrame, content) -> ContextFrame:
        if not isinstance(content, PrepPhrase) or content.inner is None:
            return frame
        return self.filter_candidates(frame, content.inner)

    def perform_pending_action(self, frame: ContextFrame, content) -> ContextFrame:
        form = frame.pending_form
        if form is None or not is_saturated(form):
            raise ComposeError(self.templates.render("confusion_generic"))
        move = execute_action(form, self.scene, self.table, self.templates)
        self.buffer.append(move)
        return replace(
            frame,
            held=self._held_ids(),
            pending_form=None,
            candidates=(),
            indicated=None,
        )

    # -- emits: (frame_before, frame_after, content) -> move(s) --------------

    def emit_propose(self, before, after, content):
        return propose_candidate(after, self.scene, self.table, self.templates)

    def emit_reach_ack(self, before, after, content):
        if after.focus is None:
            return None
        record = make_form(self.table, "reach", ObjectRef(after.focus))
        return AgentMove(
            kind="action", text=self.templates.render("ack_go_on"), action_record=record
        )

    def emit_ask_theme(self, before, after, content):
        verb = after.pending_form.head if after.pending_form else "do"
        return AgentMove(kind="question", text=self.templates.render("ask_theme", verb=verb))

    def emit_ask_where(self, before, after, content):
        pending = after.pending_form
        verb = pending.head if pending else "put"
        theme = _theme_arg(pending) if pending else None
        theme_text = "it" if theme is None or isinstance(theme, Hole) else describe_value(theme, self.scene)
        return AgentMove(
            kind="question", text=self.templates.render("ask_where", verb=verb, theme=theme_text)
        )

    def _static(self, key: str, kind: str):
        def emit(before, after, content):
            return AgentMove(kind=kind, text=self.templates.render(key))

        return emit

    def registry(self) -> dict:
        names = [
            "resolve_object_description",
            "confirm_focus",
            "confirm_candidate_focus",
            "clear_candidates",
            "store_indicated",
            "interpret_deixis",
            "build_action_form",
            "build_implied_put",
            "build_action_from_motion",
            "apply_iconic_gesture",
            "resolve_theme_description",
            "resolve_destination_description",
            "attach_destination_prep",
            "advance_candidate",
            "apply_head_candidate",
            "apply_sole_candidate",
            "filter_candidates",
            "filter_candidates_prep",
            "perform_pending_action",
        ]
        return {name: getattr(self, name) for name in names}

    def emits(self) -> dict:
        return {
            "propose": self.emit_propose,
            "reach_ack": self.emit_reach_ack,
            "ask_theme": self.emit_ask_theme,
            "ask_where": self.emit_ask_where,
            "ack_plain": self._static("ack_plain", "ack"),
            "ack_done": self._static("ack_done", "ack"),
            "confusion_no_match": self._static("confusion_no_match", "confusion"),
            "confusion_exhausted": self._static("confusion_exhausted", "confusion"),
        }


def build_interaction_machine(
    scene: Scene,
    lexicon: Lexicon | None = None,
    table: ActionTable | None = None,
    templates: Templates | None = None,
    gestures: dict | None = None,
    buffer: list | None = None,
    machine_text: str | None = None,
) -> Machine:
    """Instantiate the shipped interaction machine bound to a scene.

    The machine definition itself lives in a data file; this binds its
    compose/emit names to functions closing over the scene and session
    resources.
    """
    lexicon = lexicon or default_lexicon()
    table = table or default_action_table()
    templates = templates or default_templates()
    for verb in lexicon.verbs:
        if verb not in table:
            raise SchemaError(f"lexicon verb {verb!r} has no predicate entry")
    ctx = _InteractionContext(
        scene=scene,
        lexicon=lexicon,
        table=table,
        templates=templates,
        gestures=gestures if gestures is not None else {},
        buffer=buffer if buffer is not None else [],
    )
    if machine_text is None:
        machine = machine_from_dict(_default_machine_dict(), ctx.registry(), ctx.emits())
    else:
        machine = machine_from_yaml(machine_text, ctx.registry(), ctx.emits())
    machine.context = ctx
    return machine


# ---------------------------------------------------------------------------
# Session
# ---------------------------------------------------------------------------


class DialogueSession:
    """One human/agent exchange: owns a scene, a machine, and a configuration.

    Events go in (speech or gesture), agent moves come out.  Errors surface
    as confusion moves and never unseat the configuration.
    """

    def __init__(
        self,
        scene: Scene,
        lexicon: Lexicon | None = None,
        table: ActionTable | None = None,
        templates: Templates | None = None,
        seed: int = 0,
        mode: Mode | None = None,
        machine_text: str | None = None,
    ):
        self.scene = scene
        self.lexicon = lexicon or default_lexicon()
        self.table = table or default_action_table()
        self.templates = templates or default_templates()
        set_active_table(self.table)
        self.gestures: dict[str, GestureLexiconEntry] = {}
        self._buffer: list[AgentMove] = []
        self.machine = build_interaction_machine(
            scene,
            lexicon=self.lexicon,
            table=self.table,
            templates=self.templates,
            gestures=self.gestures,
            buffer=self._buffer,
            machine_text=machine_text,
        )
        if mode is not None:
            restrict(self.machine, mode)
        self.machine.seed(seed)
        self.config = initial_configuration(self.machine.start)
        self.clock = 0
        self.error_log: list[tuple[str, str]] = []

    # -- event intake ---------------------------------------------------------

    def next_event_time(self) -> int:
        self.clock += 1
        return self.clock

    def submit(self, event: InputEvent) -> list[AgentMove]:
        try:
            classified = classify_event(event, self.lexicon)
        except UnknownInputError as exc:
            self.error_log.append(("unknown-input", str(exc)))
            return [
                AgentMove(kind="confusion", text=self.templates.render("confusion_unknown_input"))
            ]
        moves: list[AgentMove] = []
        for terminal, content in classified:
            moves.extend(self.submit_classified(ClassifiedInput(terminal, content)))
        return moves

    def submit_classified(self, ci: ClassifiedInput) -> list[AgentMove]:
        moves = self._one_step(ci)
        moves.extend(self._settle())
        return moves

    def _one_step(self, ci: ClassifiedInput) -> list[AgentMove]:
        try:
            result = step(self.machine, self.config, ci)
        except DeadInputError as exc:
            self.error_log.append(("dead-input", str(exc)))
            self._buffer.clear()
            return [AgentMove(kind="confusion", text=self.templates.render("confusion_generic"))]
        except ComposeError as exc:
            self.error_log.append(("compose", str(exc)))
            self._buffer.clear()
            return [AgentMove(kind="confusion", text=str(exc))]
        self.config = result.config
        moves = list(self._buffer)
        self._buffer.clear()
        moves.extend(result.moves)
        return moves

    def _settle(self) -> list[AgentMove]:
        moves: list[AgentMove] = []
        for _ in range(EPSILON_BUDGET):
            if not _epsilon_available(self.machine, self.config):
                return moves
            moves.extend(self._one_step(ClassifiedInput(None)))
        if _epsilon_available(self.machine, self.config):
            self.error_log.append(("epsilon-budget", self.config.state))
            moves.append(
                AgentMove(kind="confusion", text=self.templates.render("confusion_generic"))
            )
        return moves

    # -- convenience event constructors ---------------------------------------

    def say(self, text: str) -> list[AgentMove]:
        return self.submit(InputEvent(self.next_event_time(), Utterance(text)))

    def point(self, origin=None, direction=None) -> list[AgentMove]:
        gesture = DeixisGesture(tuple(origin), tuple(direction))
        return self.submit(InputEvent(self.next_event_time(), gesture))

    def point_at_ground(self, x: float, z: float) -> list[AgentMove]:
        """Cast the deixis ray from the human viewpoint through a ground point."""
        vp = self.scene.human_viewpoint
        target = (x, self.scene.ground_plane_height, z)
        direction = tuple(t - v for t, v in zip(target, vp))
        return self.point(vp, direction)

    def shape_gesture(self, shape_id: str) -> list[AgentMove]:
        return self.submit(InputEvent(self.next_event_time(), IconicStaticGesture(shape_id)))

    def motion_gesture(self, motion_id: str) -> list[AgentMove]:
        return self.submit(InputEvent(self.next_event_time(), IconicDynamicGesture(motion_id)))

    def nod(self, polarity: bool) -> list[AgentMove]:
        return self.submit(InputEvent(self.next_event_time(), HeadGesture(polarity)))

    # -- one-shot gesture learning ---------------------------------------------

    def learn_gesture(self, shape_id: str, demonstration=None) -> GestureLexiconEntry:
        """Bind a new iconic gesture to grasping the currently grounded object.

        The demonstration (optional event sequence, fed through the session)
        must leave an object in focus or under discussion; the gesture then
        stands for grasping that specific object.
        """
        if shape_id in self.gestures:
            raise GestureError(f"gesture {shape_id!r} is already bound; unlearn it first")
        if demonstration:
            for event in demonstration:
                self.submit(event)
        referent = self._current_referent()
        if referent is None:
            raise GestureError("demonstration does not ground an object to grasp")
        bound = make_form(self.table, "grasp", ObjectRef(referent))
        entry = GestureLexiconEntry(shape_id=shape_id, bound_form=bound, learned_at=self.clock)
        self.gestures[shape_id] = entry
        return entry

    def _current_referent(self) -> str | None:
        frame = self.config.top
        if frame.focus:
            return frame.focus
        for candidate in frame.candidates:
            if isinstance(candidate, ObjectRef):
                return candidate.obj_id
        if frame.pending_form is not None:
            theme = _theme_arg(frame.pending_form)
            if isinstance(theme, ObjectRef):
                return theme.obj_id
        if frame.indicated is not None and frame.indicated.objects_in_region:
            return frame.indicated.objects_in_region[0]
        return None

    def unlearn_gesture(self, shape_id: str) -> None:
        if shape_id not in self.gestures:
            raise GestureError(f"gesture {shape_id!r} is not bound")
        del self.gestures[shape_id]

    def save_gestures(self, path) -> None:
        entries = [
            {
                "shape_id": e.shape_id,
                "head": e.bound_form.head,
                "object": e.bound_form.args[0].obj_id,
                "learned_at": e.learned_at,
            }
            for e in sorted(self.gestures.values(), key=lambda e: e.shape_id)
        ]
        with open(path, "w", encoding="utf-8") as fh:
            yaml.safe_dump({"gestures": entries}, fh, sort_keys=False)

    def load_gestures(self, path) -> None:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
        for raw in (doc or {}).get("gestures", []):
            head = str(raw["head"])
            if head not in self.table:
                raise SchemaError(f"gesture {raw['shape_id']!r} binds unknown predicate {head!r}")
            form = make_form(self.table, head, ObjectRef(str(raw["object"])))
            self.gestures[str(raw["shape_id"])] = GestureLexiconEntry(
                shape_id=str(raw["shape_id"]),
                bound_form=form,
                learned_at=int(raw.get("learned_at", 0)),
            )

    # -- introspection ----------------------------------------------------------

    def reset(self) -> None:
        """Start a fresh dialogue on the same scene; learned gestures persist."""
        self.config = initial_configuration(self.machine.start)
        self._buffer.clear()

    def scene_snapshot(self) -> dict:
        objects = []
        for obj in self.scene.ordered_objects():
            objects.append(
                {
                    "id": obj.id,
                    "kind": obj.kind,
                    "attributes": sorted(obj.attributes),
                    "position": list(obj.position),
                    "graspable": obj.graspable,
                    "held_by": obj.held_by,
                }
            )
        return {"objects": objects}

    def stack_debug(self) -> dict:
        frames = []
        for frame in self.config.stack:
            frames.append(
                {
                    "indicated": list(frame.indicated.location) if frame.indicated else None,
                    "held": sorted(frame.held),
                    "candidates": [_value_to_wire(c) for c in frame.candidates],
                    "pending_form": str(frame.pending_form) if frame.pending_form else None,
                    "focus": frame.focus,
                    "origin_state": frame.origin_state,
                }
            )
        return {"state": self.config.state, "frames": frames}
