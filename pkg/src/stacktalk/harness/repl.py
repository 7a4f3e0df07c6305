"""Interactive text-mode session: type utterances, slash-commands for gestures."""

from __future__ import annotations

import json

from ..dialogue import DialogueSession
from ..errors import StacktalkError

HELP = """\
Plain text is spoken to the agent.  Commands:
  /point X Z            point at ground coordinate (x, z)
  /ray OX OY OZ DX DY DZ  point with an explicit ray
  /yes  /no             head gestures
  /shape ID             static iconic gesture
  /motion ID            dynamic iconic gesture
  /learn ID             bind gesture ID to grasping the current object
  /unlearn ID           forget a learned gesture
  /save FILE  /load FILE  persist / restore learned gestures
  /scene  /stack        inspect the world / the frame stack
  /reset                start over (keeps learned gestures)
  /help  /quit
"""


def _print_moves(moves) -> None:
    for move in moves:
        line = f"agent[{move.kind}]: {move.text}"
        if move.action_record is not None:
            line += f"  {move.action_record}"
        print(line)


def repl(session: DialogueSession) -> None:
    print("stacktalk session; /help for commands")
    while True:
        try:
            line = input("you> ").strip()
        except (EOFError, KeyboardInterrupt):
            print()
            return
        if not line:
            continue
        if not line.startswith("/"):
            _print_moves(session.say(line))
            continue
        parts = line.split()
        command, args = parts[0], parts[1:]
        try:
            if command == "/quit":
                return
            elif command == "/help":
                print(HELP)
            elif command == "/point" and len(args) == 2:
                _print_moves(session.point_at_ground(float(args[0]), float(args[1])))
            elif command == "/ray" and len(args) == 6:
                values = [float(a) for a in args]
                _print_moves(session.point(values[:3], values[3:]))
            elif command == "/yes":
                _print_moves(session.nod(True))
            elif command == "/no":
                _print_moves(session.nod(False))
            elif command == "/shape" and len(args) == 1:
                _print_moves(session.shape_gesture(args[0]))
            elif command == "/motion" and len(args) == 1:
                _print_moves(session.motion_gesture(args[0]))
            elif command == "/learn" and len(args) == 1:
                entry = session.learn_gesture(args[0])
                print(f"learned {entry.shape_id} -> {entry.bound_form}")
            elif command == "/unlearn" and len(args) == 1:
                session.unlearn_gesture(args[0])
                print(f"forgot {args[0]}")
            elif command == "/save" and len(args) == 1:
                session.save_gestures(args[0])
                print(f"saved gestures to {args[0]}")
            elif command == "/load" and len(args) == 1:
                session.load_gestures(args[0])
                print(f"loaded gestures from {args[0]}")
            elif command == "/scene":
                print(json.dumps(session.scene_snapshot(), indent=2))
            elif command == "/stack":
                print(json.dumps(session.stack_debug(), indent=2))
            elif command == "/reset":
                session.reset()
                print("(reset)")
            else:
                print(f"unrecognized command {line!r}; /help for help")
        except StacktalkError as exc:
            print(f"error: {exc}")
