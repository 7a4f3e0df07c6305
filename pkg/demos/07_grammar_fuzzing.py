"""Grammar-driven fuzzing: every grammatical sequence must be consumable.

Sampled move sequences are realized as concrete events (canonical lexicon
items, a deixis ray at the first object, a pre-bound iconic gesture) and
replayed on fresh sessions.  Dead inputs and stack-invariant violations are
engine bugs; confusion moves are just the agent saying so.
"""

from stacktalk.harness.fuzzing import fuzz

report = fuzz(max_len=6, count=500, seed=11)
print(report.to_text())
