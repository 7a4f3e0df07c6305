"""Exception hierarchy shared across the engine."""


class StacktalkError(Exception):
    """Base class for all engine errors."""


class SchemaError(StacktalkError):
    """A definition file (scene, lexicon, action table, machine) is malformed."""


class ValidationError(StacktalkError):
    """A loaded value violates an invariant (duplicate ids, bad geometry...)."""


class NoTargetError(StacktalkError):
    """A deictic ray does not hit the ground plane in the forward direction."""


class UnknownInputError(StacktalkError):
    """An utterance falls outside the closed vocabulary or grammar."""


class CompositionError(StacktalkError):
    """Semantic application failed: no hole accepts the supplied value."""


class ArityError(CompositionError):
    """Application to a form that has no holes left."""


class RaisingError(CompositionError):
    """No sanctioned coercion exists between the value and the target type."""


class PreconditionError(StacktalkError):
    """Evidence does not match any declared precondition of the action."""


class StackUnderflowError(StacktalkError):
    """Pop on a lone bottom frame that has no candidates to advance."""


class DeadInputError(StacktalkError):
    """No transition from the current state passes its guard for this input."""


class ComposeError(StacktalkError):
    """A transition's composition function rejected the event."""


class ModeError(StacktalkError):
    """A machine does not satisfy the requested restriction mode."""


class GestureError(StacktalkError):
    """Gesture lexicon problem: unknown shape, rebind, incomplete demonstration."""


class TraceError(StacktalkError):
    """A trace file is malformed or an expectation failed to match."""
