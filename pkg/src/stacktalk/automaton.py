"""Extended nondeterministic pushdown automaton over context frames.

The stack symbol is a frame of situational context (indicated target, held
objects, disambiguation candidates, the pending semantic form).  Transitions
carry guards over the top frame, weights, one of six stack operations, and an
attached composition function: the continuation that folds the event into
the frame.  Restriction modes recover a deterministic PDA, an NFA, or a DFA.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from enum import Enum

import yaml

from .errors import (
    ComposeError,
    DeadInputError,
    ModeError,
    SchemaError,
    StackUnderflowError,
)
from .grammar import Terminal, terminal_from_symbol
from .scene import DeixisTarget
from .semantics import BaseType, SemanticForm, is_saturated


@dataclass(frozen=True)
class ContextFrame:
    """One stack symbol: everything the dialogue currently holds in reserve."""

    indicated: DeixisTarget | None = None
    held: frozenset[str] = frozenset()
    candidates: tuple = ()
    pending_form: SemanticForm | None = None
    focus: str | None = None
    origin_state: str = "idle"

    def __post_init__(self):
        object.__setattr__(self, "held", frozenset(self.held))
        object.__setattr__(self, "candidates", tuple(self.candidates))


@dataclass(frozen=True)
class Configuration:
    """Machine state plus the frame stack; top of stack is the last element."""

    state: str
    stack: tuple[ContextFrame, ...]
    history: tuple[tuple[str, ContextFrame], ...] = ()

    def __post_init__(self):
        if not self.stack:
            raise StackUnderflowError("a configuration always keeps a bottom frame")

    @property
    def top(self) -> ContextFrame:
        return self.stack[-1]


def initial_configuration(start_state: str, frame: ContextFrame | None = None) -> Configuration:
    bottom = frame if frame is not None else ContextFrame(origin_state=start_state)
    return Configuration(state=start_state, stack=(bottom,), history=((start_state, bottom),))


# ---------------------------------------------------------------------------
# Stack operations
# ---------------------------------------------------------------------------


class StackOpKind(Enum):
    PUSH = "push"
    POP = "pop"
    REWRITE = "rewrite"
    FLUSH = "flush"
    POP_UNTIL = "pop_until"
    NONE = "none"


@dataclass(frozen=True)
class StackOp:
    kind: StackOpKind
    frame: ContextFrame | None = None  # push/rewrite payload
    state: str | None = None  # pop_until target


def _flush(config: Configuration) -> Configuration:
    held = frozenset().union(*(f.held for f in config.stack))
    bottom = ContextFrame(held=held, origin_state=config.stack[0].origin_state)
    # A flush ends the dialogue episode; history starts over.
    return replace(config, stack=(bottom,), history=())


def exec_stack_op(config: Configuration, op: StackOp) -> Configuration:
    """Apply one stack operation, keeping the stack non-empty.

    Flush collapses to a single bottom frame that keeps only the held set
    (what the agent physically holds survives a context reset).  PopUntil
    rewinds to the frame recorded when the named state was last entered and
    degenerates to Flush when that state never occurred.
    """
    if op.kind is StackOpKind.NONE:
        return config

    if op.kind is StackOpKind.PUSH:
        if op.frame is None:
            raise SchemaError("push needs a frame")
        return replace(config, stack=config.stack + (op.frame,))

    if op.kind is StackOpKind.REWRITE:
        if op.frame is None:
            raise SchemaError("rewrite needs a frame")
        return replace(config, stack=config.stack[:-1] + (op.frame,))

    if op.kind is StackOpKind.POP:
        if len(config.stack) >= 2:
            return replace(config, stack=config.stack[:-1])
        top = config.top
        if top.candidates:
            # Lone bottom frame: popping advances the candidate list instead.
            return replace(config, stack=(replace(top, candidates=top.candidates[1:]),))
        raise StackUnderflowError("pop on a lone bottom frame with no candidates")

    if op.kind is StackOpKind.FLUSH:
        return _flush(config)

    if op.kind is StackOpKind.POP_UNTIL:
        if op.state is None:
            raise SchemaError("pop_until needs a state name")
        snapshot = None
        for state, frame in reversed(config.history):
            if state == op.state:
                snapshot = frame
                break
        if snapshot is None:
            return _flush(config)
        stack = list(config.stack)
        while stack and stack[-1] != snapshot:
            stack.pop()
        if not stack:
            # The snapshot is gone (frames were rewritten since); treat as
            # a full context reset rather than dying.
            return _flush(config)
        return replace(config, stack=tuple(stack))

    raise SchemaError(f"unknown stack op {op.kind!r}")


# ---------------------------------------------------------------------------
# Guards: a closed predicate library, with declared exclusivity
# ---------------------------------------------------------------------------

GuardSpec = tuple[str, tuple]


def _next_hole(frame: ContextFrame):
    form = frame.pending_form
    if form is None or not form.lambda_order:
        return None
    return form.outermost_hole()


def _next_hole_role(frame: ContextFrame):
    form = frame.pending_form
    if form is None or not form.lambda_order:
        return None
    return form.hole_roles().get(form.lambda_order[0])


GUARDS = {
    "always": lambda frame, content: True,
    "candidates_gt": lambda frame, content, n: len(frame.candidates) > n,
    "candidates_eq": lambda frame, content, n: len(frame.candidates) == n,
    "has_indicated": lambda frame, content: frame.indicated is not None,
    "no_indicated": lambda frame, content: frame.indicated is None,
    "has_pending": lambda frame, content: frame.pending_form is not None,
    "no_pending": lambda frame, content: frame.pending_form is None,
    "pending_saturated": lambda frame, content: frame.pending_form is not None
    and is_saturated(frame.pending_form),
    "pending_unsaturated": lambda frame, content: frame.pending_form is not None
    and not is_saturated(frame.pending_form),
    "has_focus": lambda frame, content: frame.focus is not None,
    "no_focus": lambda frame, content: frame.focus is None,
    "next_hole_entity": lambda frame, content: (h := _next_hole(frame)) is not None
    and h.type is BaseType.ENTITY,
    "next_hole_location": lambda frame, content: (h := _next_hole(frame)) is not None
    and h.type is BaseType.LOCATION,
    "next_hole_theme": lambda frame, content: _next_hole_role(frame) == "theme",
    "next_hole_destination": lambda frame, content: _next_hole_role(frame) == "destination",
    "indicated_within": lambda frame, content, x, z, radius: frame.indicated is not None
    and ((frame.indicated.location[0] - x) ** 2 + (frame.indicated.location[2] - z) ** 2)
    <= radius**2,
}

# Pairs of predicates that can never both hold on one frame.  Two guard
# conjunctions are exclusive when any pair of their conjuncts appears here;
# this is what makes determinism checkable without solving guards.
_EXCLUSIVE_NAMES = {
    frozenset({"has_indicated", "no_indicated"}),
    frozenset({"has_pending", "no_pending"}),
    frozenset({"pending_saturated", "pending_unsaturated"}),
    frozenset({"no_pending", "pending_saturated"}),
    frozenset({"no_pending", "pending_unsaturated"}),
    frozenset({"has_focus", "no_focus"}),
    frozenset({"next_hole_entity", "next_hole_location"}),
    frozenset({"next_hole_theme", "next_hole_destination"}),
}


def _conjunct_exclusive(a: GuardSpec, b: GuardSpec) -> bool:
    (name_a, args_a), (name_b, args_b) = a, b
    if frozenset({name_a, name_b}) in _EXCLUSIVE_NAMES:
        return True
    if name_a == "candidates_eq" and name_b == "candidates_eq":
        return args_a[0] != args_b[0]
    if {name_a, name_b} == {"candidates_eq", "candidates_gt"}:
        eq = args_a[0] if name_a == "candidates_eq" else args_b[0]
        gt = args_a[0] if name_a == "candidates_gt" else args_b[0]
        return eq <= gt
    return False


def guards_exclusive(guard_a: tuple[GuardSpec, ...], guard_b: tuple[GuardSpec, ...]) -> bool:
    return any(_conjunct_exclusive(ca, cb) for ca in guard_a for cb in guard_b)


def eval_guard(guard: tuple[GuardSpec, ...], frame: ContextFrame, content) -> bool:
    for name, args in guard:
        try:
            predicate = GUARDS[name]
        except KeyError:
            raise SchemaError(f"unknown guard {name!r}") from None
        if not predicate(frame, content, *args):
            return False
    return True


ALWAYS: tuple[GuardSpec, ...] = (("always", ()),)


# ---------------------------------------------------------------------------
# Transition rules and machines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransitionRule:
    from_state: str
    input_class: Terminal | None  # None = epsilon
    to_state: str
    guard: tuple[GuardSpec, ...] = ALWAYS
    weight: float = 1.0
    stack_op: StackOpKind = StackOpKind.NONE
    pop_until_state: str | None = None
    emit: tuple[str, ...] = ()
    compose: str | None = None

    def __post_init__(self):
        if not (0.0 < self.weight <= 1.0):
            raise SchemaError(f"weight must be in (0, 1], got {self.weight}")
        if self.stack_op is StackOpKind.POP_UNTIL and not self.pop_until_state:
            raise SchemaError("pop_until transition needs pop_until_state")

    def describe(self) -> str:
        symbol = self.input_class.value if self.input_class else "ε"
        return f"{self.from_state} --{symbol}--> {self.to_state}"


class Mode(Enum):
    NPDA = "npda"
    DPDA = "dpda"
    NFA = "nfa"
    DFA = "dfa"


EPSILON_BUDGET = 32


@dataclass
class Machine:
    """Transition system plus the registries its rules reference by name.

    compose functions map (frame, content) -> frame; emit functions map
    (frame_before, frame_after, content) -> a move (or a list of moves, or
    None).  The machine itself never inspects what an emit returns.
    """

    states: frozenset[str]
    start: str
    rules: tuple[TransitionRule, ...]
    mode: Mode = Mode.NPDA
    registry: dict = field(default_factory=dict)
    emits: dict = field(default_factory=dict)
    rng: random.Random = field(default_factory=lambda: random.Random(0))

    def __post_init__(self):
        for rule in self.rules:
            if rule.from_state not in self.states or rule.to_state not in self.states:
                raise SchemaError(f"rule references unknown state: {rule.describe()}")
            if rule.compose is not None and rule.compose not in self.registry:
                raise SchemaError(f"unknown compose function {rule.compose!r}")
            for emit in rule.emit:
                if emit not in self.emits:
                    raise SchemaError(f"unknown emit template {emit!r}")
        if self.start not in self.states:
            raise SchemaError(f"unknown start state {self.start!r}")

    @property
    def deterministic(self) -> bool:
        return self.mode in (Mode.DPDA, Mode.DFA) or all(r.weight == 1.0 for r in self.rules)

    def seed(self, seed: int) -> "Machine":
        self.rng = random.Random(seed)
        return self

    def rules_from(self, state: str, input_class: Terminal | None):
        return [r for r in self.rules if r.from_state == state and r.input_class == input_class]


@dataclass(frozen=True)
class ClassifiedInput:
    """An input event reduced to its terminal plus phrase/gesture content."""

    terminal: Terminal | None  # None = epsilon tick
    content: object = None


@dataclass
class StepResult:
    config: Configuration
    moves: list
    rule: TransitionRule | None = None


def step(machine: Machine, config: Configuration, event: ClassifiedInput) -> StepResult:
    """Consume one classified event (or an epsilon tick).

    Among the transitions leaving the current state on this input class,
    those whose guards pass compete by weight: deterministic machines take
    the heaviest (declaration order breaks ties), nondeterministic ones
    sample from the machine's seeded RNG.  The chosen rule's composition
    runs first, then its stack operation, then its emits.
    """
    terminal = event.terminal if event is not None else None
    content = event.content if event is not None else None
    rules = machine.rules_from(config.state, terminal)
    passing = [r for r in rules if eval_guard(r.guard, config.top, content)]
    if not passing:
        symbol = terminal.value if terminal else "ε"
        raise DeadInputError(f"no transition from {config.state!r} accepts {symbol}")

    if len(passing) == 1 or machine.deterministic:
        rule = max(passing, key=lambda r: r.weight)  # max is stable: first of ties
    else:
        weights = [r.weight for r in passing]
        rule = machine.rng.choices(passing, weights=weights, k=1)[0]

    before = config.top
    frame = before
    if rule.compose is not None:
        fn = machine.registry[rule.compose]
        try:
            frame = fn(before, content)
        except ComposeError:
            raise
        except Exception as exc:  # a compose bug must not kill the session
            raise ComposeError(f"compose {rule.compose!r} failed: {exc}") from exc

    # Push keeps the pre-composition frame beneath the composed one; rewrite
    # (and a compose with no declared op) replaces the top.  Before a
    # destructive op the composed frame is rewritten in place, so flush's
    # held-union and pop_until's comparisons see what composition produced.
    if rule.stack_op is StackOpKind.PUSH:
        op = StackOp(StackOpKind.PUSH, frame=frame)
    elif rule.stack_op is StackOpKind.REWRITE or (
        rule.stack_op is StackOpKind.NONE and rule.compose is not None
    ):
        op = StackOp(StackOpKind.REWRITE, frame=frame)
    else:
        if rule.compose is not None and frame != before:
            config = exec_stack_op(config, StackOp(StackOpKind.REWRITE, frame=frame))
        if rule.stack_op is StackOpKind.POP_UNTIL:
            op = StackOp(rule.stack_op, state=rule.pop_until_state)
        else:
            op = StackOp(rule.stack_op)

    next_config = exec_stack_op(config, op)
    next_config = replace(
        next_config,
        state=rule.to_state,
        history=next_config.history + ((rule.to_state, next_config.top),),
    )

    moves = []
    for emit_name in rule.emit:
        emitted = machine.emits[emit_name](before, next_config.top, content)
        if emitted is None:
            continue
        if isinstance(emitted, list):
            moves.extend(emitted)
        else:
            moves.append(emitted)
    return StepResult(config=next_config, moves=moves, rule=rule)


def _epsilon_available(machine: Machine, config: Configuration) -> bool:
    return any(
        eval_guard(r.guard, config.top, None) for r in machine.rules_from(config.state, None)
    )


def settle(machine: Machine, config: Configuration) -> tuple[Configuration, list, str | None]:
    """Take epsilon transitions to quiescence, bounded by the step budget."""
    moves: list = []
    for _ in range(EPSILON_BUDGET):
        if not _epsilon_available(machine, config):
            return config, moves, None
        result = step(machine, config, ClassifiedInput(None))
        config = result.config
        moves.extend(result.moves)
    if _epsilon_available(machine, config):
        return config, moves, "epsilon budget exhausted"
    return config, moves, None


@dataclass
class RunEntry:
    """One consumed event with everything the machine did in response."""

    event: ClassifiedInput | None
    moves: list
    error: str | None
    state: str


def run(machine: Machine, config: Configuration, events) -> tuple[Configuration, list[RunEntry]]:
    """Left-fold of step over the event list, settling epsilons after each.

    Errors become trace entries (the configuration stays put); the session
    never halts mid-stream.
    """
    trace: list[RunEntry] = []
    config, moves, eps_error = settle(machine, config)
    if moves or eps_error:
        trace.append(RunEntry(event=None, moves=moves, error=eps_error, state=config.state))
    for event in events:
        try:
            result = step(machine, config, event)
        except (DeadInputError, ComposeError) as exc:
            trace.append(RunEntry(event=event, moves=[], error=str(exc), state=config.state))
            continue
        config = result.config
        moves = list(result.moves)
        config, settle_moves, eps_error = settle(machine, config)
        moves.extend(settle_moves)
        trace.append(RunEntry(event=event, moves=moves, error=eps_error, state=config.state))
    return config, trace


# ---------------------------------------------------------------------------
# Restriction modes
# ---------------------------------------------------------------------------


def restrict(machine: Machine, mode: Mode) -> Machine:
    """Validate the machine against a restriction mode and adopt it.

    DPDA requires unit weights and pairwise guard exclusivity on every
    (state, input) group.  NFA/DFA require frame-free machines: no stack
    operations, no composes, no frame-reading guards or emits.
    """
    offenders: list[str] = []

    if mode in (Mode.DPDA, Mode.DFA):
        for rule in machine.rules:
            if rule.weight != 1.0:
                offenders.append(f"{rule.describe()} has weight {rule.weight}")

    if mode is Mode.DPDA:
        groups: dict[tuple[str, Terminal | None], list[TransitionRule]] = {}
        for rule in machine.rules:
            groups.setdefault((rule.from_state, rule.input_class), []).append(rule)
        for (_, _), rules in groups.items():
            for i, a in enumerate(rules):
                for b in rules[i + 1 :]:
                    if not guards_exclusive(a.guard, b.guard):
                        offenders.append(
                            f"{a.describe()} and {b.describe()} are not guard-exclusive"
                        )

    if mode in (Mode.NFA, Mode.DFA):
        for rule in machine.rules:
            if rule.stack_op is not StackOpKind.NONE:
                offenders.append(f"{rule.describe()} uses stack op {rule.stack_op.value}")
            if rule.compose is not None:
                offenders.append(f"{rule.describe()} has a compose function")
            if rule.emit:
                offenders.append(f"{rule.describe()} emits (reads frames)")
            if rule.guard != ALWAYS:
                offenders.append(f"{rule.describe()} has a frame guard")

    if mode is Mode.DFA:
        seen: dict[tuple[str, Terminal | None], TransitionRule] = {}
        for rule in machine.rules:
            if rule.input_class is None:
                offenders.append(f"{rule.describe()} is an epsilon transition")
                continue
            key = (rule.from_state, rule.input_class)
            if key in seen:
                offenders.append(f"{rule.describe()} duplicates {seen[key].describe()}")
            else:
                seen[key] = rule

    if offenders:
        raise ModeError(f"machine violates {mode.value} restrictions: " + "; ".join(offenders))
    machine.mode = mode
    return machine


def epsilon_closure(machine: Machine, states: frozenset[str]) -> frozenset[str]:
    closed = set(states)
    frontier = list(states)
    while frontier:
        state = frontier.pop()
        for rule in machine.rules_from(state, None):
            if rule.to_state not in closed:
                closed.add(rule.to_state)
                frontier.append(rule.to_state)
    return frozenset(closed)


def simulate_states(machine: Machine, terminals) -> list[frozenset[str]]:
    """Reachable state sets after each input, for frame-free machines."""
    current = epsilon_closure(machine, frozenset({machine.start}))
    out = [current]
    for terminal in terminals:
        moved = {
            rule.to_state
            for state in current
            for rule in machine.rules_from(state, terminal)
        }
        current = epsilon_closure(machine, frozenset(moved))
        out.append(current)
    return out


# ---------------------------------------------------------------------------
# Machine definition files
# ---------------------------------------------------------------------------


def _parse_guard(spec) -> tuple[GuardSpec, ...]:
    if spec in (None, "always"):
        return ALWAYS
    if isinstance(spec, str):
        return ((spec, ()),)
    guard = []
    for item in spec:
        if isinstance(item, str):
            guard.append((item, ()))
        else:
            name, *args = item
            guard.append((str(name), tuple(args)))
    return tuple(guard)


def machine_from_dict(doc: dict, registry: dict, emits: dict) -> Machine:
    """Instantiate a machine from its file form plus the named registries."""
    for key in doc:
        if key not in {"states", "start", "mode", "transitions"}:
            raise SchemaError(f"unknown machine field {key!r}")
    try:
        states = frozenset(str(s) for s in doc["states"])
        start = str(doc["start"])
        raw_rules = doc["transitions"]
    except KeyError as exc:
        raise SchemaError(f"machine definition missing field {exc}") from None

    rules = []
    for i, raw in enumerate(raw_rules):
        unknown = set(raw) - {
            "from", "input", "to", "guard", "weight", "stack_op", "pop_until", "emit", "compose",
        }
        if unknown:
            raise SchemaError(f"transitions[{i}]: unknown fields {sorted(unknown)}")
        input_class = raw.get("input")
        terminal = None
        if isinstance(input_class, bool):  # YAML 1.1 reads bare yes/no as bools
            terminal = Terminal.YES if input_class else Terminal.NO
        elif input_class not in (None, "epsilon", "ε"):
            terminal = terminal_from_symbol(str(input_class))
        emit = raw.get("emit") or ()
        if isinstance(emit, str):
            emit = (emit,)
        rules.append(
            TransitionRule(
                from_state=str(raw["from"]),
                input_class=terminal,
                to_state=str(raw["to"]),
                guard=_parse_guard(raw.get("guard")),
                weight=float(raw.get("weight", 1.0)),
                stack_op=StackOpKind(raw.get("stack_op", "none")),
                pop_until_state=raw.get("pop_until"),
                emit=tuple(emit),
                compose=raw.get("compose"),
            )
        )
    machine = Machine(
        states=states,
        start=start,
        rules=tuple(rules),
        registry=registry,
        emits=emits,
    )
    mode = doc.get("mode")
    if mode:
        restrict(machine, Mode(mode))
    return machine


def machine_from_yaml(text: str, registry: dict, emits: dict) -> Machine:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SchemaError(f"machine definition is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("machine definition must be a mapping")
    return machine_from_dict(doc, registry, emits)
