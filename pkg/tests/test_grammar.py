from __future__ import annotations

import itertools

import pytest

from stacktalk.errors import UnknownInputError, ValidationError
from stacktalk.grammar import (
    DeixisGesture,
    HeadGesture,
    IconicDynamicGesture,
    IconicStaticGesture,
    InputEvent,
    Terminal,
    Utterance,
    VerbPhrase,
    accepts,
    classify_event,
    generate,
    parse_utterance,
)

from oracles import ORACLE_SYMBOLS, enumerate_language

# Engine terminal <-> oracle symbol, in the fixed alphabet order.
TERMS = list(Terminal)
TO_ORACLE = dict(zip(TERMS, ORACLE_SYMBOLS))


Np = Terminal.NOUN
V = Terminal.VERB
P = Terminal.PREP
d = Terminal.DEIXIS
w = Terminal.ICONIC_STATIC
a = Terminal.ICONIC_DYNAMIC
y = Terminal.YES
n = Terminal.NO


class TestParseUtterance:
    def test_bare_noun_phrase(self):
        parsed = parse_utterance("The plate.")
        assert parsed.terminals == (Np,)
        np = parsed.content[0]
        assert np.noun == "plate" and np.determiner == "the"

    def test_put_it_in_front_of_you(self):
        parsed = parse_utterance("Put it in front of you.")
        assert parsed.terminals == (V,)
        vp = parsed.content[0]
        assert vp.verb == "put"
        assert vp.theme.pronoun
        assert vp.destination.prep == "front_of" and vp.destination.relative_to_agent

    def test_put_it_there(self):
        vp = parse_utterance("put it there").content[0]
        assert vp.verb == "put" and vp.theme.pronoun and vp.destination == "there"

    def test_full_np_pp(self):
        vp = parse_utterance("Put the knife in the blue cup.").content[0]
        assert vp.theme.noun == "knife"
        assert vp.destination.prep == "in"
        assert vp.destination.inner.noun == "cup"
        assert vp.destination.inner.attributes == {"blue"}

    def test_demonstrative_object(self):
        vp = parse_utterance("Put it on that.").content[0]
        assert vp.destination.inner.demonstrative

    def test_out_of_vocabulary(self):
        with pytest.raises(UnknownInputError):
            parse_utterance("flibber the wug")

    def test_empty_utterance(self):
        with pytest.raises(UnknownInputError):
            parse_utterance("  ...  ")

    def test_yes_and_clause_split(self):
        parsed = parse_utterance("Yes, the plate.")
        assert parsed.terminals == (y, Np)

    def test_two_sentences(self):
        parsed = parse_utterance("The plate. Put it there.")
        assert parsed.terminals == (Np, V)

    def test_ok_is_affirmative(self):
        assert parse_utterance("ok").terminals == (y,)

    def test_no_is_negative(self):
        assert parse_utterance("No.").terminals == (n,)

    def test_bare_preposition_phrase(self):
        parsed = parse_utterance("In the blue cup.")
        assert parsed.terminals == (P,)
        assert parsed.content[0].inner.attributes == {"blue"}


class TestClassifyEvent:
    def test_head_positive(self):
        moves = classify_event(InputEvent(1, HeadGesture(True)))
        assert [t for t, _ in moves] == [y]

    def test_head_negative(self):
        moves = classify_event(InputEvent(1, HeadGesture(False)))
        assert [t for t, _ in moves] == [n]

    def test_deixis(self):
        gesture = DeixisGesture((0, 1, 0), (0, -1, 1))
        moves = classify_event(InputEvent(1, gesture))
        assert moves == [(d, gesture)]

    def test_iconic_static(self):
        moves = classify_event(InputEvent(1, IconicStaticGesture("grip")))
        assert [t for t, _ in moves] == [w]

    def test_iconic_dynamic(self):
        moves = classify_event(InputEvent(1, IconicDynamicGesture("place")))
        assert [t for t, _ in moves] == [a]

    def test_speech_classifies_via_parser(self):
        moves = classify_event(InputEvent(1, Utterance("put it there")))
        assert [t for t, _ in moves] == [V]
        assert isinstance(moves[0][1], VerbPhrase)

    def test_speech_oov_raises(self):
        with pytest.raises(UnknownInputError):
            classify_event(InputEvent(1, Utterance("blorp")))

    def test_deixis_rejects_zero_direction(self):
        with pytest.raises(ValidationError):
            DeixisGesture((0, 1, 0), (0, 0, 0))


class TestAccepts:
    def test_object_then_action(self):
        assert accepts([Np, V]) is True

    def test_lone_affirmative_rejected(self):
        assert accepts([y]) is False

    def test_action_disambiguation_object(self):
        # derivable as S -> AO with A -> VD, D -> d, O -> N
        assert accepts([V, d, Np]) is True

    def test_every_single_terminal_rejected(self):
        for t in TERMS:
            assert accepts([t]) is False

    def test_empty_rejected(self):
        assert accepts([]) is False

    def test_rejects_non_terminals(self):
        with pytest.raises(ValidationError):
            accepts(["N"])

    @pytest.mark.parametrize("length", [1, 2, 3, 4])
    def test_agrees_with_enumeration_oracle(self, length):
        language = enumerate_language(length)
        for seq in itertools.product(TERMS, repeat=length):
            expected = tuple(TO_ORACLE[t] for t in seq) in language
            assert accepts(seq) is expected, seq


class TestGenerate:
    def test_max_len_one_is_an_error(self):
        with pytest.raises(ValidationError):
            generate(1, 5, 0)

    def test_count_must_be_positive(self):
        with pytest.raises(ValidationError):
            generate(4, 0, 0)

    def test_samples_all_accepted(self):
        for seq in generate(8, 500, 13):
            assert 2 <= len(seq) <= 8
            assert accepts(seq)

    def test_deterministic_for_seed(self):
        assert generate(6, 50, 7) == generate(6, 50, 7)

    def test_different_seeds_differ(self):
        assert generate(8, 50, 1) != generate(8, 50, 2)

    def test_length_two_samples_cover_language(self):
        sampled = set(generate(2, 400, 3))
        expected = {
            seq
            for seq in itertools.product(TERMS, repeat=2)
            if tuple(TO_ORACLE[t] for t in seq) in enumerate_language(2)
        }
        assert sampled == expected
