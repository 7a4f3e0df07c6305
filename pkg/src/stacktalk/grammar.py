"""Terminal alphabet, utterance parsing, and the interactive grammar.

Every communicative move — spoken or gestured — is classified into one of
eight terminals.  The sequence of moves in a complete exchange belongs to a
small context-free language: an object-defining move and an action-defining
move in either order, each optionally followed by disambiguation moves.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources

import yaml

from .errors import SchemaError, UnknownInputError, ValidationError


class Terminal(Enum):
    DEIXIS = "δ"
    ICONIC_STATIC = "ω"
    ICONIC_DYNAMIC = "α"
    YES = "y"
    NO = "n"
    NOUN = "N"
    VERB = "V"
    PREP = "P"

    def __repr__(self):
        return f"Terminal({self.value})"


SYMBOL_TO_TERMINAL = {t.value: t for t in Terminal}
# ASCII aliases accepted in definition/trace files.
_TERMINAL_ALIASES = {
    "deixis": Terminal.DEIXIS,
    "delta": Terminal.DEIXIS,
    "iconic_static": Terminal.ICONIC_STATIC,
    "omega": Terminal.ICONIC_STATIC,
    "iconic_dynamic": Terminal.ICONIC_DYNAMIC,
    "alpha": Terminal.ICONIC_DYNAMIC,
    "y": Terminal.YES,
    "yes": Terminal.YES,
    "n": Terminal.NO,
    "no": Terminal.NO,
    "N": Terminal.NOUN,
    "noun": Terminal.NOUN,
    "V": Terminal.VERB,
    "verb": Terminal.VERB,
    "P": Terminal.PREP,
    "prep": Terminal.PREP,
}


def terminal_from_symbol(symbol: str) -> Terminal:
    if symbol in SYMBOL_TO_TERMINAL:
        return SYMBOL_TO_TERMINAL[symbol]
    if symbol in _TERMINAL_ALIASES:
        return _TERMINAL_ALIASES[symbol]
    raise SchemaError(f"unknown terminal symbol {symbol!r}")


# ---------------------------------------------------------------------------
# Input events
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Utterance:
    text: str


@dataclass(frozen=True)
class DeixisGesture:
    origin: tuple[float, float, float]
    direction: tuple[float, float, float]

    def __post_init__(self):
        o = tuple(float(c) for c in self.origin)
        d = tuple(float(c) for c in self.direction)
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "direction", d)
        if not all(math.isfinite(c) for c in o + d):
            raise ValidationError("deixis geometry must be finite")
        if d == (0.0, 0.0, 0.0):
            raise ValidationError("deixis direction must be non-zero")


@dataclass(frozen=True)
class IconicStaticGesture:
    shape_id: str


@dataclass(frozen=True)
class IconicDynamicGesture:
    motion_id: str


@dataclass(frozen=True)
class HeadGesture:
    polarity: bool  # True = yes-nod, False = no-shake


Payload = Utterance | DeixisGesture | IconicStaticGesture | IconicDynamicGesture | HeadGesture


@dataclass(frozen=True)
class InputEvent:
    """One multimodal move from the human, stamped with a sequence number."""

    time: int
    payload: Payload

    @property
    def modality(self) -> str:
        return "speech" if isinstance(self.payload, Utterance) else "gesture"


# ---------------------------------------------------------------------------
# Phrase content
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NounPhrase:
    """Content of an N move: '(the|a|that) blue cup', bare 'cup', 'that', 'it'."""

    noun: str | None = None
    attributes: frozenset[str] = frozenset()
    determiner: str | None = None
    demonstrative: bool = False  # bare "that"/"this": an object pointed at
    pronoun: bool = False  # "it": the object in focus

    def __post_init__(self):
        object.__setattr__(self, "attributes", frozenset(self.attributes))


@dataclass(frozen=True)
class PrepPhrase:
    """Content of a P move: 'in the blue cup', 'on that', 'in front of you'."""

    prep: str
    inner: NounPhrase | None = None
    relative_to_agent: bool = False  # "in front of you"


@dataclass(frozen=True)
class VerbPhrase:
    """Content of a V move: verb plus optional theme and destination."""

    verb: str
    theme: NounPhrase | None = None
    destination: PrepPhrase | str | None = None  # str is "there"/"here"


@dataclass(frozen=True)
class Polarity:
    positive: bool


PhraseContent = NounPhrase | PrepPhrase | VerbPhrase | Polarity


@dataclass(frozen=True)
class ParsedUtterance:
    terminals: tuple[Terminal, ...]
    content: tuple[PhraseContent, ...]

    def __post_init__(self):
        if len(self.terminals) != len(self.content):
            raise ValidationError("terminals and content must align 1:1")


# ---------------------------------------------------------------------------
# Lexicon
# ---------------------------------------------------------------------------

DETERMINERS = {"the", "a", "an", "that", "this"}
PRONOUNS = {"it"}
LOC_DEMONSTRATIVES = {"there", "here"}
AFFIRM_WORDS = {"yes", "ok", "okay", "yeah", "yep"}
NEGATE_WORDS = {"no", "nope"}


@dataclass(frozen=True)
class Lexicon:
    """Closed open-class vocabulary: nouns, attributes, verbs, prepositions.

    Verb slot signatures name the arguments the dialogue layer must fill;
    motions map dynamic iconic gesture ids onto verb lemmas.
    """

    nouns: frozenset[str]
    attributes: frozenset[str]
    verbs: dict[str, tuple[str, ...]]
    prepositions: frozenset[str]
    motions: dict[str, str] = field(default_factory=dict)

    @staticmethod
    def from_yaml(text: str) -> "Lexicon":
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise SchemaError(f"lexicon is not valid YAML: {exc}") from exc
        if not isinstance(doc, dict):
            raise SchemaError("lexicon must be a mapping")
        unknown = set(doc) - {"nouns", "attributes", "verbs", "prepositions", "motions"}
        if unknown:
            raise SchemaError(f"unknown lexicon sections: {sorted(unknown)}")
        verbs = {}
        for verb, entry in (doc.get("verbs") or {}).items():
            slots = entry.get("slots") if isinstance(entry, dict) else entry
            if not isinstance(slots, list):
                raise SchemaError(f"verb {verb!r}: expected a slot list")
            verbs[str(verb)] = tuple(str(s) for s in slots)
        motions = {str(k): str(v) for k, v in (doc.get("motions") or {}).items()}
        for motion, verb in motions.items():
            if verb not in verbs:
                raise SchemaError(f"motion {motion!r} maps to unknown verb {verb!r}")
        return Lexicon(
            nouns=frozenset(str(n) for n in doc.get("nouns") or ()),
            attributes=frozenset(str(a) for a in doc.get("attributes") or ()),
            verbs=verbs,
            prepositions=frozenset(str(p) for p in doc.get("prepositions") or ()),
            motions=motions,
        )


@lru_cache(maxsize=1)
def default_lexicon() -> Lexicon:
    text = resources.files("stacktalk.data").joinpath("lexicon.yaml").read_text("utf-8")
    return Lexicon.from_yaml(text)


# ---------------------------------------------------------------------------
# Utterance parsing (closed vocabulary, recursive descent)
# ---------------------------------------------------------------------------

_SENTENCE_SPLIT = re.compile(r"[.;!?]+")
_TOKEN_CLEAN = re.compile(r"[^a-z0-9_\-']+")


def _tokenize(clause: str) -> list[str]:
    tokens = []
    for raw in clause.lower().split():
        tok = _TOKEN_CLEAN.sub("", raw)
        if tok:
            tokens.append(tok)
    return tokens


class _ClauseParser:
    def __init__(self, tokens: list[str], lexicon: Lexicon):
        self.tokens = tokens
        self.pos = 0
        self.lex = lexicon

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def done(self) -> bool:
        return self.pos >= len(self.tokens)

    def fail(self, why: str):
        raise UnknownInputError(f"cannot parse {' '.join(self.tokens)!r}: {why}")

    def parse_clause(self) -> tuple[Terminal, PhraseContent]:
        tok = self.peek()
        if tok is None:
            self.fail("empty clause")
        if tok in AFFIRM_WORDS and len(self.tokens) == 1:
            self.take()
            return Terminal.YES, Polarity(True)
        if tok in NEGATE_WORDS and len(self.tokens) == 1:
            self.take()
            return Terminal.NO, Polarity(False)
        if tok in self.lex.verbs:
            vp = self.parse_vp()
            self.expect_end()
            return Terminal.VERB, vp
        if tok in self.lex.prepositions:
            pp = self.parse_pp()
            self.expect_end()
            return Terminal.PREP, pp
        np = self.parse_np()
        self.expect_end()
        return Terminal.NOUN, np

    def expect_end(self):
        if not self.done():
            self.fail(f"unexpected trailing words {' '.join(self.tokens[self.pos:])!r}")

    def parse_np(self) -> NounPhrase:
        tok = self.peek()
        if tok is None:
            self.fail("expected a noun phrase")
        if tok in PRONOUNS:
            self.take()
            return NounPhrase(pronoun=True)
        determiner = None
        if tok in DETERMINERS:
            determiner = self.take()
            tok = self.peek()
            # bare demonstrative: "that" / "this" with nothing after it
            if determiner in {"that", "this"} and (tok is None or tok not in self.lex.attributes and tok not in self.lex.nouns):
                return NounPhrase(determiner=determiner, demonstrative=True)
        attrs = []
        while (tok := self.peek()) is not None and tok in self.lex.attributes:
            attrs.append(self.take())
        tok = self.peek()
        if tok is None or tok not in self.lex.nouns:
            self.fail(f"expected a noun, got {tok!r}")
        noun = self.take()
        return NounPhrase(noun=noun, attributes=frozenset(attrs), determiner=determiner)

    def parse_pp(self) -> PrepPhrase:
        prep = self.take()
        # "in front of you" resolves to the region before the agent
        if prep == "in" and self.tokens[self.pos : self.pos + 3] == ["front", "of", "you"]:
            self.pos += 3
            return PrepPhrase(prep="front_of", relative_to_agent=True)
        inner = self.parse_np()
        return PrepPhrase(prep=prep, inner=inner)

    def parse_vp(self) -> VerbPhrase:
        verb = self.take()
        theme = None
        destination = None
        tok = self.peek()
        if tok is not None and tok not in self.lex.prepositions and tok not in LOC_DEMONSTRATIVES:
            theme = self.parse_np()
            tok = self.peek()
        if tok is not None:
            if tok in LOC_DEMONSTRATIVES:
                destination = self.take()
            elif tok in self.lex.prepositions:
                destination = self.parse_pp()
        return VerbPhrase(verb=verb, theme=theme, destination=destination)


def _clauses(text: str) -> list[list[str]]:
    out = []
    for sentence in _SENTENCE_SPLIT.split(text):
        if not sentence.strip():
            continue
        for clause in sentence.split(","):
            tokens = _tokenize(clause)
            if tokens:
                out.append(tokens)
    return out


def parse_utterance(text: str, lexicon: Lexicon | None = None) -> ParsedUtterance:
    """Parse an utterance into its move terminals plus phrase content.

    Sentences (and comma clauses) are parsed independently, in order, so
    "Yes, the plate." yields a y move followed by an N move.
    """
    lexicon = lexicon or default_lexicon()
    clauses = _clauses(text)
    if not clauses:
        raise UnknownInputError("empty utterance")
    terminals: list[Terminal] = []
    content: list[PhraseContent] = []
    for tokens in clauses:
        term, phrase = _ClauseParser(tokens, lexicon).parse_clause()
        terminals.append(term)
        content.append(phrase)
    return ParsedUtterance(terminals=tuple(terminals), content=tuple(content))


def classify_event(event: InputEvent, lexicon: Lexicon | None = None) -> list[tuple[Terminal, object]]:
    """Map a multimodal event to its terminal(s) with attached content.

    Gestures classify totally; speech goes through the utterance parser and
    may raise for out-of-vocabulary input.
    """
    p = event.payload
    if isinstance(p, DeixisGesture):
        return [(Terminal.DEIXIS, p)]
    if isinstance(p, IconicStaticGesture):
        return [(Terminal.ICONIC_STATIC, p)]
    if isinstance(p, IconicDynamicGesture):
        return [(Terminal.ICONIC_DYNAMIC, p)]
    if isinstance(p, HeadGesture):
        terminal = Terminal.YES if p.polarity else Terminal.NO
        return [(terminal, Polarity(p.polarity))]
    parsed = parse_utterance(p.text, lexicon)
    return list(zip(parsed.terminals, parsed.content))


# ---------------------------------------------------------------------------
# The interactive grammar: S -> OA | AO, with disambiguation chains
# ---------------------------------------------------------------------------

d, w, a, y, n, N, V, P = (
    Terminal.DEIXIS,
    Terminal.ICONIC_STATIC,
    Terminal.ICONIC_DYNAMIC,
    Terminal.YES,
    Terminal.NO,
    Terminal.NOUN,
    Terminal.VERB,
    Terminal.PREP,
)

START = "S"

PRODUCTIONS: dict[str, tuple[tuple, ...]] = {
    "S": (("O", "A"), ("A", "O")),
    "O": ((d,), (d, "D"), (w,), (w, "D"), (N,), (N, "D")),
    "A": ((a,), (a, "D"), (V,), (V, "D"), (P,), (P, "D")),
    "D": ((d,), (d, "D"), (P,), (P, "D"), (N,), (N, "D"), (y,), (y, "D"), (n,), (n, "D")),
}


class _CykTables:
    """Chomsky-normal-form tables with bitmask cells for fast membership."""

    def __init__(self, productions: dict, start: str):
        binary: list[tuple[str, object, object]] = []
        lexical: list[tuple[str, Terminal]] = []
        fresh = 0
        preterminal: dict[Terminal, str] = {}

        def wrap(symbol):
            nonlocal fresh
            if isinstance(symbol, Terminal):
                if symbol not in preterminal:
                    name = f"_T{symbol.value}"
                    preterminal[symbol] = name
                    lexical.append((name, symbol))
                return preterminal[symbol]
            return symbol

        for lhs, alternatives in productions.items():
            for rhs in alternatives:
                if len(rhs) == 1:
                    sym = rhs[0]
                    if isinstance(sym, Terminal):
                        lexical.append((lhs, sym))
                    else:
                        raise SchemaError("unit nonterminal productions are not supported")
                else:
                    parts = list(rhs)
                    while len(parts) > 2:
                        fresh += 1
                        name = f"_X{fresh}"
                        first = wrap(parts.pop(0))
                        second = wrap(parts.pop(0))
                        binary.append((name, first, second))
                        parts.insert(0, name)
                    binary.append((lhs, wrap(parts[0]), wrap(parts[1])))

        names = sorted({lhs for lhs, _, _ in binary} | {lhs for lhs, _ in lexical} | {start})
        self.index = {name: i for i, name in enumerate(names)}
        self.start_bit = 1 << self.index[start]
        self.lexical_mask: dict[Terminal, int] = {}
        for lhs, term in lexical:
            self.lexical_mask[term] = self.lexical_mask.get(term, 0) | (1 << self.index[lhs])
        # pair -> parent bitmask, keyed by (left index, right index)
        self.pair_mask: dict[tuple[int, int], int] = {}
        for lhs, left, right in binary:
            key = (self.index[left], self.index[right])
            self.pair_mask[key] = self.pair_mask.get(key, 0) | (1 << self.index[lhs])

    @staticmethod
    def _bits(mask: int):
        i = 0
        while mask:
            if mask & 1:
                yield i
            mask >>= 1
            i += 1

    def accepts(self, sequence) -> bool:
        length = len(sequence)
        if length == 0:
            return False
        cell = {}
        for i, term in enumerate(sequence):
            cell[(i, i + 1)] = self.lexical_mask.get(term, 0)
        pair_mask = self.pair_mask
        for span in range(2, length + 1):
            for i in range(length - span + 1):
                j = i + span
                acc = 0
                for k in range(i + 1, j):
                    left = cell[(i, k)]
                    right = cell[(k, j)]
                    if not left or not right:
                        continue
                    for li in self._bits(left):
                        for ri in self._bits(right):
                            parents = pair_mask.get((li, ri))
                            if parents:
                                acc |= parents
                cell[(i, j)] = acc
        return bool(cell[(0, length)] & self.start_bit)


_TABLES = _CykTables(PRODUCTIONS, START)

_MIN_LEN: dict[object, int] = {}


def _min_len(symbol) -> int:
    if isinstance(symbol, Terminal):
        return 1
    if symbol in _MIN_LEN:
        return _MIN_LEN[symbol]
    # Two-phase fixpoint: every nonterminal here has a terminal-only
    # alternative, so a single pass from the leaves suffices.
    _MIN_LEN[symbol] = min(
        sum(_min_len(part) for part in rhs)
        for rhs in PRODUCTIONS[symbol]
        if all(not isinstance(part, str) or part != symbol for part in rhs)
    )
    return _MIN_LEN[symbol]


def accepts(sequence) -> bool:
    """True iff the terminal sequence is a complete exchange of the grammar."""
    seq = tuple(sequence)
    for item in seq:
        if not isinstance(item, Terminal):
            raise ValidationError(f"not a terminal: {item!r}")
    return _TABLES.accepts(seq)


def generate(max_len: int, count: int, seed: int) -> list[tuple[Terminal, ...]]:
    """Sample grammatical move sequences, reproducibly.

    Uniform choice over the productions that can still complete within the
    length bound, with backtracking as a safety net.
    """
    import random

    if max_len < 2:
        raise ValidationError("no sentence of the interaction language is shorter than 2")
    if count < 1:
        raise ValidationError("count must be >= 1")
    rng = random.Random(seed)

    def expand(symbols: list, budget: int) -> list[Terminal] | None:
        idx = next((i for i, s in enumerate(symbols) if isinstance(s, str)), None)
        if idx is None:
            return list(symbols)
        rest_min = sum(_min_len(s) for i, s in enumerate(symbols) if i != idx)
        options = [
            rhs
            for rhs in PRODUCTIONS[symbols[idx]]
            if rest_min + sum(_min_len(p) for p in rhs) <= budget
        ]
        rng.shuffle(options)
        for rhs in options:
            candidate = symbols[:idx] + list(rhs) + symbols[idx + 1 :]
            result = expand(candidate, budget)
            if result is not None:
                return result
        return None

    out = []
    for _ in range(count):
        sequence = expand([START], max_len)
        if sequence is None:
            raise ValidationError(f"no sentence fits within max_len={max_len}")
        out.append(tuple(sequence))
    return out
