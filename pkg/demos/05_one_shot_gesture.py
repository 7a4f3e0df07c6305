"""One-shot gesture learning: a new iconic gesture bound from one demonstration.

After grounding "the blue cup" the human teaches a miming gesture; from then
on the lone gesture means grasp(cup_blue), and it can also fill the open
theme of a pending action through the grasp precondition.
"""

from stacktalk import DialogueSession, load_scene
from stacktalk.dialogue import default_scene_text

scene = load_scene(default_scene_text())
session = DialogueSession(scene)

session.say("The blue cup.")
entry = session.learn_gesture("mime-cup-hold")
print("learned:", entry.shape_id, "->", entry.bound_form)

session.say("No.")  # drop the current episode
moves = session.shape_gesture("mime-cup-hold")
print("\nlone gesture ->", [(m.kind, str(m.action_record)) for m in moves])
print("agent now holds:", sorted(session.config.top.held))

# The same gesture fills a gap in a pending action.
fresh = DialogueSession(scene.copy())
fresh.gestures.update(session.gestures)
print("\nhuman: Put it there.")
print("agent:", [m.text for m in fresh.say("Put it there.")])
print("human: <mime-cup-hold>")
print("agent:", [m.text for m in fresh.shape_gesture("mime-cup-hold")])
print("pending form is now:", fresh.config.top.pending_form)
