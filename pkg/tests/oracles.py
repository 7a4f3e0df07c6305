"""Independent reference implementations used to cross-check the engine.

Nothing here reuses engine code paths: the grammar oracle re-declares the
production table and enumerates derivations breadth-first; the automaton
references are a table-driven DFA and an up-front subset construction.
"""

from __future__ import annotations

import math
from collections import deque

# ---------------------------------------------------------------------------
# Grammar: breadth-first derivation enumeration over the production table
# ---------------------------------------------------------------------------

ORACLE_PRODUCTIONS = {
    "S": (("O", "A"), ("A", "O")),
    "O": (("d",), ("d", "D"), ("w",), ("w", "D"), ("N",), ("N", "D")),
    "A": (("a",), ("a", "D"), ("V",), ("V", "D"), ("P",), ("P", "D")),
    "D": (
        ("d",), ("d", "D"),
        ("P",), ("P", "D"),
        ("N",), ("N", "D"),
        ("y",), ("y", "D"),
        ("n",), ("n", "D"),
    ),
}

NONTERMINALS = frozenset(ORACLE_PRODUCTIONS)

# ASCII oracle symbols for the engine's eight terminals.
ORACLE_SYMBOLS = ("d", "w", "a", "y", "n", "N", "V", "P")


def enumerate_language(max_len: int) -> set[tuple[str, ...]]:
    """All sentences of the interaction grammar with length <= max_len."""
    results: set[tuple[str, ...]] = set()
    seen: set[tuple[str, ...]] = set()
    queue: deque[tuple[str, ...]] = deque([("S",)])
    while queue:
        form = queue.popleft()
        if len(form) > max_len:  # every symbol derives at least one terminal
            continue
        idx = next((i for i, s in enumerate(form) if s in NONTERMINALS), None)
        if idx is None:
            results.add(form)
            continue
        for rhs in ORACLE_PRODUCTIONS[form[idx]]:
            expanded = form[:idx] + rhs + form[idx + 1 :]
            if expanded not in seen:
                seen.add(expanded)
                queue.append(expanded)
    return results


# ---------------------------------------------------------------------------
# Scene: brute-force region membership
# ---------------------------------------------------------------------------


def brute_force_region(objects: dict[str, tuple[float, float, float]], location, radius):
    """ids within horizontal distance `radius` of location, nearest-first."""
    members = []
    for oid, pos in objects.items():
        d = math.hypot(pos[0] - location[0], pos[2] - location[2])
        if d <= radius:
            members.append((d, oid))
    members.sort()
    return [oid for _, oid in members]


# ---------------------------------------------------------------------------
# Automata: table-driven DFA and subset-construction NFA references
# ---------------------------------------------------------------------------


class TableDFA:
    """Complete-table DFA simulator."""

    def __init__(self, start: str, table: dict[tuple[str, object], str]):
        self.start = start
        self.table = table

    def trajectory(self, symbols) -> list[str]:
        state = self.start
        out = [state]
        for symbol in symbols:
            state = self.table[(state, symbol)]
            out.append(state)
        return out


class SubsetNFA:
    """Determinizes an NFA up front, then runs the determinized machine.

    edges: (state, symbol) -> set of states; symbol None is an epsilon edge.
    """

    def __init__(self, start: str, edges: dict, alphabet=None):
        self.edges = edges
        self.start_set = self._closure({start})
        self._dfa: dict[tuple[frozenset, object], frozenset] = {}
        if alphabet is None:
            alphabet = {sym for (_, sym) in edges if sym is not None}
        self._symbols = set(alphabet)
        self._build()

    def _closure(self, states) -> frozenset:
        acc = set(states)
        stack = list(states)
        while stack:
            s = stack.pop()
            for t in self.edges.get((s, None), ()):
                if t not in acc:
                    acc.add(t)
                    stack.append(t)
        return frozenset(acc)

    def _move(self, states: frozenset, symbol) -> frozenset:
        out = set()
        for s in states:
            out.update(self.edges.get((s, symbol), ()))
        return self._closure(out)

    def _build(self):
        frontier = [self.start_set]
        visited = {self.start_set}
        while frontier:
            current = frontier.pop()
            for symbol in self._symbols:
                nxt = self._move(current, symbol)
                self._dfa[(current, symbol)] = nxt
                if nxt not in visited:
                    visited.add(nxt)
                    frontier.append(nxt)

    def trajectory(self, symbols) -> list[frozenset]:
        current = self.start_set
        out = [current]
        for symbol in symbols:
            current = self._dfa[(current, symbol)]
            out.append(current)
        return out
