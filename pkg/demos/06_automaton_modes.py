"""Restriction modes: the nondeterministic PDA as the general case.

With unit weights and mutually exclusive guards the machine validates as a
deterministic PDA; with no stack use it validates as an NFA; with both it
is a plain DFA.  The shipped interaction machine is DPDA-valid; a machine
that touches frames cannot pass the finite-state modes.
"""

from stacktalk import (
    ClassifiedInput,
    Machine,
    Mode,
    Terminal,
    TransitionRule,
    build_interaction_machine,
    initial_configuration,
    load_scene,
    restrict,
    run,
    simulate_states,
)
from stacktalk.dialogue import default_scene_text
from stacktalk.errors import ModeError

interaction = build_interaction_machine(load_scene(default_scene_text()))
print("interaction machine as DPDA:", restrict(interaction, Mode.DPDA).mode.value)
try:
    restrict(interaction, Mode.NFA)
except ModeError as exc:
    print("as NFA:", str(exc)[:80], "...")

y, n = Terminal.YES, Terminal.NO
flat = Machine(
    states=frozenset({"a", "b", "c"}),
    start="a",
    rules=(
        TransitionRule(from_state="a", input_class=y, to_state="b"),
        TransitionRule(from_state="a", input_class=y, to_state="c"),
        TransitionRule(from_state="b", input_class=n, to_state="c"),
        TransitionRule(from_state="c", input_class=None, to_state="a"),
    ),
)
restrict(flat, Mode.NFA)
word = [y, n, y]
print("\nNFA reachable sets over", [t.value for t in word], "->")
for i, states in enumerate(simulate_states(flat, word)):
    print(f"  after {i} inputs: {sorted(states)}")

dfa = Machine(
    states=frozenset({"even", "odd"}),
    start="even",
    rules=(
        TransitionRule(from_state="even", input_class=y, to_state="odd"),
        TransitionRule(from_state="odd", input_class=y, to_state="even"),
        TransitionRule(from_state="even", input_class=n, to_state="even"),
        TransitionRule(from_state="odd", input_class=n, to_state="odd"),
    ),
)
restrict(dfa, Mode.DFA)
_, trace = run(dfa, initial_configuration("even"), [ClassifiedInput(t) for t in [y, y, n, y]])
print("\nDFA trajectory over y y n y:", ["even"] + [e.state for e in trace])
