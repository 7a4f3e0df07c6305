"""A full dialogue with pointing into clutter.

The point lands between two cups, so the agent walks the candidate list
(nearest object, next object, then the bare location) on "no" answers and
executes on "yes".  One guarded state handles any number of candidates.
"""

from stacktalk import DialogueSession, load_scene
from stacktalk.dialogue import default_scene_text


def show(speaker, moves):
    for move in moves:
        extra = f"  [{move.action_record}]" if move.action_record else ""
        print(f"  {speaker:>5}: ({move.kind}) {move.text}{extra}")


session = DialogueSession(load_scene(default_scene_text()))

print("human: The knife.")
show("agent", session.say("The knife."))

print("human: Put it on that.")
show("agent", session.say("Put it on that."))

print("human: <points between the cups>")
show("agent", session.point((0, 1.6, -1.5), (0, -1.6, 3.0)))
print("        stack:", session.stack_debug()["state"],
      "candidates:", session.stack_debug()["frames"][-1]["candidates"])

print("human: <shakes head>")
show("agent", session.nod(False))

print("human: <shakes head>")
show("agent", session.nod(False))

print("human: <nods>")
show("agent", session.nod(True))

print("\nknife ended up at", session.scene.objects["knife1"].position)
print("context after the episode:", session.stack_debug())
