"""Multimodal dialogue engine on an extended pushdown automaton.

Speech and gesture events classify into an eight-terminal interaction
grammar; context (indicated regions, held objects, disambiguation
candidates, partially composed actions) lives on the automaton's stack
frames; semantic composition is hole-filling application with type raising.
"""

from .automaton import (
    ClassifiedInput,
    Configuration,
    ContextFrame,
    Machine,
    Mode,
    StackOp,
    StackOpKind,
    TransitionRule,
    exec_stack_op,
    initial_configuration,
    restrict,
    run,
    simulate_states,
    step,
)
from .dialogue import (
    AgentMove,
    DialogueSession,
    GestureLexiconEntry,
    build_interaction_machine,
    execute_action,
    propose_candidate,
)
from .grammar import (
    InputEvent,
    Lexicon,
    ParsedUtterance,
    Terminal,
    accepts,
    classify_event,
    generate,
    parse_utterance,
)
from .scene import (
    DeixisTarget,
    Scene,
    WorldObject,
    filter_by_description,
    load_scene,
    load_scene_file,
    resolve_deixis,
)
from .semantics import (
    ActionTable,
    BaseType,
    Hole,
    LocationValue,
    ObjectRef,
    SemanticForm,
    cps_apply,
    is_saturated,
    make_form,
    raise_type,
    satisfy_precondition,
)

__version__ = "0.1.0"

__all__ = [
    "AgentMove",
    "ActionTable",
    "BaseType",
    "ClassifiedInput",
    "Configuration",
    "ContextFrame",
    "DeixisTarget",
    "DialogueSession",
    "GestureLexiconEntry",
    "Hole",
    "InputEvent",
    "Lexicon",
    "LocationValue",
    "Machine",
    "Mode",
    "ObjectRef",
    "ParsedUtterance",
    "Scene",
    "SemanticForm",
    "StackOp",
    "StackOpKind",
    "Terminal",
    "TransitionRule",
    "WorldObject",
    "accepts",
    "build_interaction_machine",
    "classify_event",
    "cps_apply",
    "exec_stack_op",
    "execute_action",
    "filter_by_description",
    "generate",
    "initial_configuration",
    "is_saturated",
    "load_scene",
    "load_scene_file",
    "make_form",
    "parse_utterance",
    "propose_candidate",
    "raise_type",
    "resolve_deixis",
    "restrict",
    "run",
    "satisfy_precondition",
    "simulate_states",
    "step",
]
