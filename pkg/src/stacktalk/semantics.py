"""Partially specified actions as typed forms with named holes.

A form like put(theme, destination) starts with holes for whatever the
dialogue has not yet supplied.  Composition is application: each incoming
value fills the outermost compatible hole, possibly after a sanctioned type
coercion, until the form is saturated (no holes, truth-typed) and can be
executed against the scene.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from importlib import resources

import yaml

from .errors import ArityError, CompositionError, PreconditionError, RaisingError, SchemaError
from .scene import DeixisTarget, Vec3


class BaseType(Enum):
    ENTITY = "entity"
    LOCATION = "location"
    TRUTH = "truth"

    def __repr__(self):
        return f"BaseType.{self.name}"


@dataclass(frozen=True)
class Arrow:
    """Function type; arrows associate to the right."""

    src: "SemType"
    dst: "SemType"


SemType = BaseType | Arrow


def format_type(t: SemType) -> str:
    if isinstance(t, BaseType):
        return t.value
    src = format_type(t.src)
    if isinstance(t.src, Arrow):
        src = f"({src})"
    return f"{src} -> {format_type(t.dst)}"


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObjectRef:
    """An entity known by scene id."""

    obj_id: str
    # Evidence that produced this value (e.g. a grasp demonstration);
    # bookkeeping only, excluded from structural equality.
    evidence: "SemanticForm | None" = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AgentRef:
    """The agent itself, for relations like front_of(you)."""

    agent_id: str = "agent"


@dataclass(frozen=True)
class LocationValue:
    coords: Vec3

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))


@dataclass(frozen=True)
class RegionEntity:
    """A bare location coerced to entity: 'the spot at (x, y, z)'."""

    location: Vec3

    def __post_init__(self):
        object.__setattr__(self, "location", tuple(float(c) for c in self.location))


@dataclass(frozen=True)
class Hole:
    name: str
    type: BaseType


Value = ObjectRef | AgentRef | LocationValue | RegionEntity


def value_type(v) -> SemType:
    if isinstance(v, (ObjectRef, AgentRef, RegionEntity)):
        return BaseType.ENTITY
    if isinstance(v, LocationValue):
        return BaseType.LOCATION
    if isinstance(v, SemanticForm):
        return v.type
    if isinstance(v, Hole):
        return v.type
    raise CompositionError(f"not a semantic value: {v!r}")


# ---------------------------------------------------------------------------
# Action table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlotSpec:
    name: str
    type: BaseType


@dataclass(frozen=True)
class PreconditionSpec:
    head: str
    binds: str  # slot name the evidence argument fills


@dataclass(frozen=True)
class ActionSpec:
    head: str
    result: BaseType
    slots: tuple[SlotSpec, ...]
    preconditions: tuple[PreconditionSpec, ...] = ()


@dataclass(frozen=True)
class ActionTable:
    entries: dict[str, ActionSpec]

    def __getitem__(self, head: str) -> ActionSpec:
        try:
            return self.entries[head]
        except KeyError:
            raise SchemaError(f"unknown predicate {head!r}") from None

    def __contains__(self, head: str) -> bool:
        return head in self.entries

    @staticmethod
    def from_yaml(text: str) -> "ActionTable":
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise SchemaError(f"action table is not valid YAML: {exc}") from exc
        if not isinstance(doc, dict) or "predicates" not in doc:
            raise SchemaError("action table must be a mapping with a 'predicates' section")
        entries = {}
        for head, spec in doc["predicates"].items():
            slots = tuple(
                SlotSpec(name=str(s["name"]), type=BaseType(s["type"]))
                for s in spec.get("slots") or ()
            )
            preconditions = tuple(
                PreconditionSpec(head=str(p["head"]), binds=str(p["binds"]))
                for p in spec.get("preconditions") or ()
            )
            slot_names = {s.name for s in slots}
            for p in preconditions:
                if p.binds not in slot_names:
                    raise SchemaError(f"{head}: precondition binds unknown slot {p.binds!r}")
            entries[str(head)] = ActionSpec(
                head=str(head),
                result=BaseType(spec.get("result", "truth")),
                slots=slots,
                preconditions=preconditions,
            )
        return ActionTable(entries=entries)


@lru_cache(maxsize=1)
def default_action_table() -> ActionTable:
    text = resources.files("stacktalk.data").joinpath("actions.yaml").read_text("utf-8")
    return ActionTable.from_yaml(text)


# ---------------------------------------------------------------------------
# Forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SemanticForm:
    """head(args...) with holes; type folds remaining hole types into arrows."""

    head: str
    args: tuple = ()
    result_type: BaseType = BaseType.TRUTH
    lambda_order: tuple[str, ...] = ()
    # Heads of precondition schemas already discharged; bookkeeping only.
    satisfied: frozenset[str] = field(default=frozenset(), compare=False, repr=False)

    def __post_init__(self):
        found = self._collect_holes()
        names = [h.name for h in found]
        if len(names) != len(set(names)):
            raise CompositionError(f"duplicate hole names in {self.head}: {names}")
        if set(self.lambda_order) != set(names):
            raise CompositionError(
                f"{self.head}: lambda_order {self.lambda_order} does not cover holes {names}"
            )

    def _collect_holes(self, args=None) -> list[Hole]:
        out = []
        for slot in self.args if args is None else args:
            if isinstance(slot, Hole):
                out.append(slot)
            elif isinstance(slot, SemanticForm):
                out.extend(slot._collect_holes())
        return out

    def holes(self) -> dict[str, Hole]:
        return {h.name: h for h in self._collect_holes()}

    @property
    def type(self) -> SemType:
        t: SemType = self.result_type
        hole_types = self.holes()
        for name in reversed(self.lambda_order):
            t = Arrow(hole_types[name].type, t)
        return t

    def outermost_hole(self) -> Hole | None:
        if not self.lambda_order:
            return None
        return self.holes()[self.lambda_order[0]]

    def hole_roles(self) -> dict[str, str]:
        """Map hole name -> name of the top-level slot it sits under."""
        spec = _slot_names_for(self)
        roles = {}
        for slot, slot_name in zip(self.args, spec):
            if isinstance(slot, Hole):
                roles[slot.name] = slot_name
            elif isinstance(slot, SemanticForm):
                for h in slot._collect_holes():
                    roles[h.name] = slot_name
        return roles

    def substitute(self, name: str, value) -> "SemanticForm":
        def sub(slot):
            if isinstance(slot, Hole) and slot.name == name:
                return value
            if isinstance(slot, SemanticForm):
                return replace(slot, args=tuple(sub(s) for s in slot.args),
                               lambda_order=tuple(x for x in slot.lambda_order if x != name))
            return slot

        return replace(
            self,
            args=tuple(sub(s) for s in self.args),
            lambda_order=tuple(x for x in self.lambda_order if x != name),
        )

    def to_record(self):
        """Plain-data rendering for traces and the wire."""
        def render(slot):
            if isinstance(slot, ObjectRef):
                return slot.obj_id
            if isinstance(slot, AgentRef):
                return slot.agent_id
            if isinstance(slot, LocationValue):
                return list(slot.coords)
            if isinstance(slot, RegionEntity):
                return list(slot.location)
            if isinstance(slot, Hole):
                return {"hole": slot.name, "type": slot.type.value}
            if isinstance(slot, SemanticForm):
                return slot.to_record()
            raise CompositionError(f"cannot render {slot!r}")

        return {"head": self.head, "args": [render(s) for s in self.args]}

    def _body_str(self) -> str:
        def render(slot):
            if isinstance(slot, ObjectRef):
                return slot.obj_id
            if isinstance(slot, AgentRef):
                return slot.agent_id
            if isinstance(slot, LocationValue):
                return "(" + ", ".join(f"{c:g}" for c in slot.coords) + ")"
            if isinstance(slot, RegionEntity):
                return "(" + ", ".join(f"{c:g}" for c in slot.location) + ")"
            if isinstance(slot, Hole):
                return slot.name
            if isinstance(slot, SemanticForm):
                return slot._body_str()  # the outer form owns the lambda prefix
            return str(slot)

        return f"{self.head}({', '.join(render(a) for a in self.args)})"

    def __str__(self):
        prefix = "".join(f"λ{name}." for name in self.lambda_order)
        return prefix + self._body_str()


_ACTIVE_TABLE: ActionTable | None = None


def _slot_names_for(form: SemanticForm) -> tuple[str, ...]:
    table = _ACTIVE_TABLE or default_action_table()
    if form.head in table:
        return tuple(s.name for s in table[form.head].slots)
    return tuple(f"arg{i}" for i in range(len(form.args)))


def set_active_table(table: ActionTable) -> None:
    """Install the table used for slot-role lookups on loose forms."""
    global _ACTIVE_TABLE
    _ACTIVE_TABLE = table


def make_form(table: ActionTable, head: str, *slot_values, satisfied=frozenset()) -> SemanticForm:
    """Build a form from the table's slot signature.

    Each positional value is a Value, a nested SemanticForm, or None for an
    unfilled slot (which becomes a hole named after the slot).  The lambda
    order is the in-order traversal of the holes: slot order, depth first.
    """
    spec = table[head]
    if len(slot_values) != len(spec.slots):
        raise CompositionError(
            f"{head} takes {len(spec.slots)} slots, got {len(slot_values)}"
        )
    args = []
    order: list[str] = []
    for slot_spec, value in zip(spec.slots, slot_values):
        if value is None:
            hole = Hole(name=slot_spec.name, type=slot_spec.type)
            args.append(hole)
            order.append(hole.name)
        elif isinstance(value, Hole):
            args.append(value)
            order.append(value.name)
        elif isinstance(value, SemanticForm):
            if value.type != slot_spec.type and value.result_type != slot_spec.type:
                raise CompositionError(
                    f"{head}.{slot_spec.name} expects {slot_spec.type.value}, "
                    f"nested form {value.head} yields {format_type(value.type)}"
                )
            args.append(value)
            order.extend(value.lambda_order)
        else:
            coerced = raise_type(value, slot_spec.type)
            args.append(coerced)
    return SemanticForm(
        head=head,
        args=tuple(args),
        result_type=spec.result,
        lambda_order=tuple(order),
        satisfied=frozenset(satisfied),
    )


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def raise_type(arg, target: BaseType):
    """Coerce a value to a required base type via the sanctioned coercions."""
    if isinstance(arg, DeixisTarget):
        if target is BaseType.LOCATION:
            return LocationValue(arg.location)
        if target is BaseType.ENTITY:
            if not arg.objects_in_region:
                raise RaisingError("deixis target has no objects to take as entity")
            return ObjectRef(arg.objects_in_region[0])
        raise RaisingError(f"no coercion from deixis target to {target.value}")

    t = value_type(arg)
    if t == target:
        return arg
    if isinstance(arg, LocationValue) and target is BaseType.ENTITY:
        return RegionEntity(arg.coords)
    if (
        isinstance(arg, SemanticForm)
        and target is BaseType.ENTITY
        and arg.head == "grasp"
        and not arg.lambda_order
    ):
        theme = arg.args[0]
        if not isinstance(theme, ObjectRef):
            raise RaisingError("grasp evidence must name an object")
        return ObjectRef(theme.obj_id, evidence=arg)
    raise RaisingError(f"no sanctioned coercion from {format_type(t)} to {target.value}")


def cps_apply(fn: SemanticForm, arg) -> SemanticForm:
    """Fill the outermost compatible hole of fn with arg.

    The outermost hole is tried first; if the value cannot be raised to its
    type, a later hole of a *different* base type may take it instead.
    Same-typed holes always fill in order, so arguments never swap silently.
    """
    if not isinstance(fn, SemanticForm):
        raise CompositionError("can only apply to a semantic form")
    if not fn.lambda_order:
        raise ArityError(f"{fn} is saturated; nothing left to apply")

    hole_map = fn.holes()
    first = hole_map[fn.lambda_order[0]]
    candidates = [first]
    for name in fn.lambda_order[1:]:
        hole = hole_map[name]
        if hole.type != first.type:
            candidates.append(hole)

    def finish(hole: Hole, value) -> SemanticForm:
        result = fn.substitute(hole.name, value)
        if isinstance(value, ObjectRef) and value.evidence is not None:
            result = _mark_satisfied(result, value.evidence.head)
        return result

    # Exact type matches win over coercions, so a location never squeezes
    # into an entity hole while a location hole is still waiting.
    try:
        arg_type = value_type(arg)
    except CompositionError:
        arg_type = None
    for hole in candidates:
        if arg_type == hole.type:
            return finish(hole, arg)

    last_error = None
    for hole in candidates:
        try:
            coerced = raise_type(arg, hole.type)
        except RaisingError as exc:
            last_error = exc
            continue
        return finish(hole, coerced)
    raise CompositionError(
        f"cannot compose {arg!r} into {fn}: {last_error or 'no matching hole'}"
    )


def _mark_satisfied(form: SemanticForm, head: str) -> SemanticForm:
    return replace(form, satisfied=form.satisfied | {head})


def satisfy_precondition(action: SemanticForm, evidence: SemanticForm, table: ActionTable) -> SemanticForm:
    """Discharge a declared precondition of action with a matching evidence form.

    If the evidence binds an open slot (grasping an object fills the theme of
    a pending put), the bound argument is applied as well.  Idempotent when
    the precondition is already satisfied.
    """
    spec = table[action.head]
    matching = [p for p in spec.preconditions if p.head == evidence.head]
    if not matching:
        declared = [p.head for p in spec.preconditions] or ["none"]
        raise PreconditionError(
            f"{action.head} declares preconditions {declared}, not {evidence.head!r}"
        )
    if evidence.lambda_order:
        raise PreconditionError("evidence form must be saturated")

    precondition = matching[0]
    bound_slot = precondition.binds
    roles = action.hole_roles()
    open_hole = next(
        (name for name in action.lambda_order if roles.get(name) == bound_slot), None
    )
    if open_hole is not None:
        value = raise_type(evidence, action.holes()[open_hole].type)
        action = action.substitute(open_hole, value)
    return _mark_satisfied(action, evidence.head)


def is_saturated(form: SemanticForm) -> bool:
    """Executable iff no holes remain and the form denotes a proposition."""
    return not form.holes() and form.type is BaseType.TRUTH
