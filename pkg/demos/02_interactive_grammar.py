"""The move grammar: eight terminals, two head moves, disambiguation chains.

A complete exchange is an object-defining move and an action-defining move
in either order; each may drag a chain of disambiguation moves behind it.
"""

from stacktalk import Terminal, accepts, classify_event, generate
from stacktalk.grammar import HeadGesture, InputEvent, Utterance

N, V, d, y = Terminal.NOUN, Terminal.VERB, Terminal.DEIXIS, Terminal.YES

print("N V          ->", accepts([N, V]))      # "The plate." / "Put it there."
print("V d N        ->", accepts([V, d, N]))   # action, point, then the noun
print("y            ->", accepts([y]))         # a lone yes is not an exchange

print("\nsampled exchanges (seed 7):")
for seq in generate(max_len=6, count=8, seed=7):
    print("  ", " ".join(t.value for t in seq))

print("\nclassifying concrete events:")
for event in [
    InputEvent(1, Utterance("Put the knife in the blue cup.")),
    InputEvent(2, Utterance("Yes, the plate.")),
    InputEvent(3, HeadGesture(False)),
]:
    terminals = [t.value for t, _ in classify_event(event)]
    print(f"  {event.payload!r:<55} -> {terminals}")
