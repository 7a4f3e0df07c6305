from __future__ import annotations

import pytest

from stacktalk.automaton import ClassifiedInput, Configuration, ContextFrame, Mode, restrict
from stacktalk.dialogue import (
    AgentMove,
    build_interaction_machine,
    execute_action,
    propose_candidate,
)
from stacktalk.errors import GestureError, StacktalkError, ValidationError
from stacktalk.grammar import Polarity, Terminal
from stacktalk.scene import DeixisTarget, load_scene
from stacktalk.semantics import LocationValue, ObjectRef, make_form

from conftest import POINT_DIRECTION, POINT_ORIGIN, POINT_LOCATION, grid_scene, make_session

YES = ClassifiedInput(Terminal.YES, Polarity(True))
NO = ClassifiedInput(Terminal.NO, Polarity(False))


def action_moves(moves):
    return [m for m in moves if m.kind == "action"]


def questions(moves):
    return [m for m in moves if m.kind == "question"]


class TestMachineShape:
    def test_required_states_present(self, tabletop):
        machine = build_interaction_machine(tabletop)
        required = {"idle", "await_object", "await_action", "interp_deixis", "disamb_target", "execute"}
        assert required <= set(machine.states)

    def test_shipped_machine_is_dpda_valid(self, tabletop):
        machine = build_interaction_machine(tabletop)
        assert restrict(machine, Mode.DPDA).mode is Mode.DPDA

    def test_all_weights_unit(self, tabletop):
        machine = build_interaction_machine(tabletop)
        assert all(rule.weight == 1.0 for rule in machine.rules)


class TestLanguageOnlyDialogue:
    def test_reach_then_put_in_front(self, session):
        first = session.say("The plate.")
        assert [m.kind for m in first] == ["action"]
        assert first[0].action_record.to_record() == {"head": "reach", "args": ["plate1"]}
        assert first[0].text == "Okay, go on."

        second = session.say("Put it in front of you.")
        assert [m.kind for m in second] == ["action"]
        record = second[0].action_record.to_record()
        assert record["head"] == "put" and record["args"][0] == "plate1"
        assert record["args"][1] == {"head": "front_of", "args": ["agent"]}
        # the agent sits at (0,1,2.5); the human is toward -z, so "in front"
        # is half a metre toward the human
        assert session.scene.objects["plate1"].position == (0.0, 0.0, 2.0)
        assert session.config.state == "idle" and len(session.config.stack) == 1

    def test_no_confusions(self, session):
        moves = session.say("The plate.") + session.say("Put it in front of you.")
        assert not [m for m in moves if m.kind == "confusion"]


class TestPointAndPlaceDialogue:
    def test_demonstrative_takes_pointed_location(self, session):
        session.say("The plate.")
        assert session.point(POINT_ORIGIN, POINT_DIRECTION) == []
        moves = session.say("Put it there.")
        record = action_moves(moves)[0].action_record.to_record()
        assert record == {"head": "put", "args": ["plate1", list(POINT_LOCATION)]}
        assert session.scene.objects["plate1"].position == POINT_LOCATION

    def test_resolved_location_matches_closed_form(self, session):
        session.say("The plate.")
        origin, direction = (0.2, 1.7, -1.1), (-0.05, -1.7, 2.9)
        session.point(origin, direction)
        moves = session.say("Put it there.")
        t = (0.0 - origin[1]) / direction[1]
        expected = (origin[0] + t * direction[0], 0.0, origin[2] + t * direction[2])
        got = action_moves(moves)[0].action_record.args[1].coords
        assert all(abs(g - e) <= 1e-9 for g, e in zip(got, expected))


class TestDisambiguationWalkthrough:
    def drive(self, session):
        session.say("The knife.")
        session.say("Put it on that.")
        return session.point(POINT_ORIGIN, POINT_DIRECTION)

    def test_candidates_nearest_object_first_location_last(self, session):
        self.drive(session)
        cands = session.config.top.candidates
        assert [c.obj_id for c in cands[:2]] == ["cup_blue", "cup_red"]
        assert cands[2] == LocationValue(POINT_LOCATION)

    def test_question_sequence_and_final_form(self, session):
        q1 = self.drive(session)
        assert questions(q1)[0].named_candidate == ObjectRef("cup_blue")
        q2 = session.nod(False)
        assert questions(q2)[0].named_candidate == ObjectRef("cup_red")
        q3 = session.nod(False)
        assert questions(q3)[0].named_candidate == LocationValue(POINT_LOCATION)
        done = session.nod(True)
        record = action_moves(done)[0].action_record.to_record()
        assert record == {
            "head": "put",
            "args": ["knife1", {"head": "on", "args": [list(POINT_LOCATION)]}],
        }

    def test_stack_symbol_progression(self, session):
        self.drive(session)
        session.nod(False)
        session.nod(False)
        counts = [
            len(frame.candidates)
            for state, frame in session.config.history
            if state == "disamb_target"
        ]
        assert counts == [3, 2, 1]

    def test_exhaustion_recovers_for_a_repoint(self, session):
        self.drive(session)
        session.nod(False)
        session.nod(False)
        moves = session.nod(False)
        assert [m.kind for m in moves] == ["confusion"]
        assert session.config.state == "interp_deixis"
        # pending form survived the rewind; a fresh point restarts the loop
        assert session.config.top.pending_form is not None
        again = session.point(POINT_ORIGIN, POINT_DIRECTION)
        assert questions(again)[0].named_candidate == ObjectRef("cup_blue")

    def test_description_filters_candidates(self, session):
        self.drive(session)
        moves = session.say("The red cup.")
        assert questions(moves)[0].named_candidate == ObjectRef("cup_red")
        done = session.nod(True)
        record = action_moves(done)[0].action_record.to_record()
        assert record["args"][1] == {"head": "on", "args": ["cup_red"]}


def seeded_disamb_session(k: int):
    """A session parked in check_form with k object candidates and a pending
    one-hole put form, as if a deixis interpretation just happened."""
    scene = grid_scene(k + 1)
    session = make_session(scene)
    theme = ObjectRef("block0")
    cands = tuple(ObjectRef(f"block{i}") for i in range(1, k + 1))
    pending = make_form(session.table, "put", theme, make_form(session.table, "on", None))
    target = DeixisTarget(location=(0.0, 0.0, 1.0), objects_in_region=tuple(c.obj_id for c in cands))
    base = ContextFrame(pending_form=pending, origin_state="interp_deixis")
    top = ContextFrame(
        pending_form=pending, candidates=cands, indicated=target, origin_state="interp_deixis"
    )
    session.config = Configuration(
        state="check_form",
        stack=(base, top),
        history=(("interp_deixis", base), ("check_form", top)),
    )
    return session


class TestDisambiguationBounds:
    @pytest.mark.parametrize("k", [1, 2, 3, 7, 20])
    def test_resolution_asks_exactly_no_count_plus_one(self, k):
        for no_count in sorted({0, 1, k - 1} - {k}):
            session = seeded_disamb_session(k)
            asked = len(questions(session._settle()))
            for _ in range(no_count):
                asked += len(questions(session.submit_classified(NO)))
            final = session.submit_classified(YES)
            asked += len(questions(final))
            assert asked == min(no_count + 1, k)
            assert action_moves(final)

    @pytest.mark.parametrize("k", list(range(1, 21)))
    def test_exhaustion_after_k_nos(self, k):
        session = seeded_disamb_session(k)
        asked = len(questions(session._settle()))
        moves = []
        for _ in range(k):
            moves = session.submit_classified(NO)
            asked += len(questions(moves))
        assert asked == k
        assert [m.kind for m in moves] == ["confusion"]
        assert session.config.state == "interp_deixis"

    def test_questions_name_head_of_candidates(self):
        session = seeded_disamb_session(5)
        move = questions(session._settle())[0]
        assert move.named_candidate == session.config.top.candidates[0]
        for _ in range(3):
            move = questions(session.submit_classified(NO))[0]
            assert move.named_candidate == session.config.top.candidates[0]


class TestProposeCandidate:
    def test_pending_put_phrases_tentative_composition(self, tabletop):
        pending = make_form(
            make_session(tabletop).table, "put", ObjectRef("knife1"),
            make_form(make_session(tabletop).table, "on", None),
        )
        frame = ContextFrame(pending_form=pending, candidates=(ObjectRef("cup_blue"),))
        move = propose_candidate(frame, tabletop)
        assert move.kind == "question"
        assert move.named_candidate == ObjectRef("cup_blue")
        assert move.text == "Should I put the knife on the blue cup?"

    def test_bare_location_candidate(self, tabletop):
        session = make_session(tabletop)
        pending = make_form(
            session.table, "put", ObjectRef("knife1"), make_form(session.table, "on", None)
        )
        frame = ContextFrame(pending_form=pending, candidates=(LocationValue((0, 0, 1.5)),))
        move = propose_candidate(frame, tabletop)
        assert move.named_candidate == LocationValue((0, 0, 1.5))

    def test_object_confirmation_without_pending(self, tabletop):
        frame = ContextFrame(candidates=(ObjectRef("cup_blue"),))
        move = propose_candidate(frame, tabletop)
        assert move.text == "Do you mean the blue cup?"

    def test_empty_candidates_is_internal_error(self, tabletop):
        with pytest.raises(StacktalkError):
            propose_candidate(ContextFrame(), tabletop)


class TestExecuteAction:
    def test_put_moves_and_releases(self, tabletop):
        session = make_session(tabletop)
        form = make_form(session.table, "put", ObjectRef("plate1"), LocationValue((0, 0, 1.5)))
        move = execute_action(form, session.scene, session.table, session.templates)
        assert move.kind == "action"
        assert session.scene.objects["plate1"].position == (0.0, 0.0, 1.5)
        assert session.scene.objects["plate1"].held_by is None

    def test_grasp_marks_held(self, tabletop):
        session = make_session(tabletop)
        form = make_form(session.table, "grasp", ObjectRef("cup_blue"))
        execute_action(form, session.scene, session.table, session.templates)
        assert session.scene.objects["cup_blue"].held_by == "agent"

    def test_ungraspable_is_refused_scene_unchanged(self, tabletop):
        session = make_session(tabletop)
        before = session.scene.objects["lamp1"].position
        form = make_form(session.table, "put", ObjectRef("lamp1"), LocationValue((0, 0, 1)))
        move = execute_action(form, session.scene, session.table, session.templates)
        assert move.kind == "confusion"
        assert session.scene.objects["lamp1"].position == before

    def test_out_of_bounds_is_refused(self, tabletop):
        session = make_session(tabletop)
        form = make_form(session.table, "put", ObjectRef("plate1"), LocationValue((99, 0, 99)))
        move = execute_action(form, session.scene, session.table, session.templates)
        assert move.kind == "confusion"
        assert session.scene.objects["plate1"].position != (99.0, 0.0, 99.0)

    def test_action_move_invariant(self):
        with pytest.raises(ValidationError):
            AgentMove(kind="action", text="nope", action_record=None)


class TestOneShotLearning:
    def test_lone_gesture_executes_grasp(self, session):
        session.say("The blue cup.")
        entry = session.learn_gesture("mime-cup-hold")
        assert entry.bound_form.to_record() == {"head": "grasp", "args": ["cup_blue"]}
        session.say("No.")  # abandon the episode
        moves = session.shape_gesture("mime-cup-hold")
        record = action_moves(moves)[0].action_record.to_record()
        assert record == {"head": "grasp", "args": ["cup_blue"]}
        assert session.config.top.held == {"cup_blue"}  # survives the flush

    def test_gesture_fills_pending_theme(self, tabletop):
        teacher = make_session(tabletop)
        teacher.say("The blue cup.")
        entry = teacher.learn_gesture("mime-cup-hold")

        session = make_session(tabletop.copy())
        session.gestures[entry.shape_id] = entry
        session.say("Put it there.")  # theme and destination both open
        moves = session.shape_gesture("mime-cup-hold")
        assert questions(moves)  # now asks only for the destination
        pending = session.config.top.pending_form
        expected = make_form(session.table, "put", ObjectRef("cup_blue"), None)
        assert pending == expected
        assert "grasp" in pending.satisfied

    def test_unknown_gesture_is_confusion(self, session):
        moves = session.shape_gesture("never-seen")
        assert [m.kind for m in moves] == ["confusion"]
        assert moves[0].text == "I don't know that gesture."

    def test_rebind_requires_unlearn(self, session):
        session.say("The blue cup.")
        session.learn_gesture("grip")
        with pytest.raises(GestureError, match="already bound"):
            session.learn_gesture("grip")
        session.unlearn_gesture("grip")
        session.say("The red cup.")
        entry = session.learn_gesture("grip")
        assert entry.bound_form.args[0] == ObjectRef("cup_red")

    def test_learning_without_referent_fails(self, session):
        with pytest.raises(GestureError, match="does not ground"):
            session.learn_gesture("grip")

    def test_persistence_round_trip(self, session, tmp_path):
        session.say("The blue cup.")
        session.learn_gesture("grip")
        path = tmp_path / "gestures.yaml"
        session.save_gestures(path)
        fresh = make_session(load_scene(open("src/stacktalk/data/scenes/table_scene.yaml").read()))
        fresh.load_gestures(path)
        assert fresh.gestures["grip"].bound_form == session.gestures["grip"].bound_form


class TestPronounResolution:
    def test_pronoun_with_focus_resolves(self, session):
        session.say("The knife.")
        moves = session.say("Grasp it.")
        assert action_moves(moves)[0].action_record.to_record() == {
            "head": "grasp",
            "args": ["knife1"],
        }

    def test_pronoun_without_focus_never_acts(self, session):
        moves = session.say("Put it there.")
        assert not action_moves(moves)
        assert questions(moves)

    def test_pronoun_with_point_asks_before_acting(self, session):
        session.point(POINT_ORIGIN, POINT_DIRECTION)
        moves = session.say("Grasp it.")
        assert not action_moves(moves)
        assert questions(moves)[0].named_candidate == ObjectRef("cup_blue")
        done = session.nod(True)
        assert action_moves(done)[0].action_record.to_record() == {
            "head": "grasp",
            "args": ["cup_blue"],
        }


class TestOrderSymmetry:
    PAIRS = [
        ("the knife", "on the plate"),
        ("the blue cup", "near the knife"),
        ("the plate", "in front of you"),
        ("the red cup", "in the plate"),
    ]

    def final_record(self, scene, utterances):
        session = make_session(scene)
        record = None
        for text in utterances:
            for move in session.say(text):
                if move.kind == "action" and move.action_record.head != "reach":
                    record = move.action_record
        return record

    @pytest.mark.parametrize("theme,dest", PAIRS)
    def test_oa_equals_ao(self, tabletop, theme, dest):
        oa = self.final_record(tabletop.copy(), [f"{theme}.", f"put it {dest}."])
        ao = self.final_record(tabletop.copy(), [f"put it {dest}.", f"{theme}."])
        assert oa is not None and oa == ao


class TestSessionRobustness:
    def test_unknown_words_are_confusion(self, session):
        moves = session.say("frobnicate the quux")
        assert [m.kind for m in moves] == ["confusion"]

    def test_no_target_ray_is_confusion(self, session):
        moves = session.point((0, 1.5, 0), (1, 0, 0))
        assert [m.kind for m in moves] == ["confusion"]
        assert moves[0].text == "I can't tell where you're pointing."

    def test_ambiguous_description_asks(self, session):
        moves = session.say("The cup.")
        assert questions(moves)[0].kind == "question"
        done = session.nod(True)
        assert action_moves(done)[0].action_record.head == "reach"

    def test_reset_keeps_gestures(self, session):
        session.say("The blue cup.")
        session.learn_gesture("grip")
        session.reset()
        assert session.config.state == "idle"
        assert "grip" in session.gestures

    def test_implied_put_from_bare_prep(self, session):
        session.say("The knife.")
        moves = session.say("In the blue cup.")
        record = action_moves(moves)[0].action_record.to_record()
        assert record == {"head": "put", "args": ["knife1", {"head": "in", "args": ["cup_blue"]}]}

    def test_motion_gesture_builds_action(self, session):
        session.say("The knife.")
        moves = session.motion_gesture("grab")
        assert action_moves(moves)[0].action_record.to_record() == {
            "head": "grasp",
            "args": ["knife1"],
        }

    def test_unknown_motion_is_confusion(self, session):
        moves = session.motion_gesture("moonwalk")
        assert [m.kind for m in moves] == ["confusion"]
