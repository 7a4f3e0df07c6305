"""Pointing rays: where they land and what they indicate.

A deictic gesture is an origin and a direction.  The target is the point
where the ray meets the ground plane; the indicated region is a disc around
it, and objects inside are listed nearest first.
"""

from stacktalk import load_scene, resolve_deixis
from stacktalk.dialogue import default_scene_text
from stacktalk.errors import NoTargetError

scene = load_scene(default_scene_text())
print("objects:", {oid: obj.position for oid, obj in scene.objects.items()})

# The human stands at the viewpoint and points between the two cups.
target = resolve_deixis(scene, origin=(0, 1.6, -1.5), direction=(0, -1.6, 3.0))
print("\npointing at", target.location)
print("in the region (nearest first):", target.objects_in_region)

# A shallower ray lands further away, near the plate.
target = resolve_deixis(scene, origin=(0, 1.6, -1.5), direction=(0.55, -1.5, 2.5))
print("\nshallower ray lands at", tuple(round(c, 3) for c in target.location))
print("in the region:", target.objects_in_region)

# Rays parallel to the ground (or pointing away from it) have no target.
try:
    resolve_deixis(scene, origin=(0, 1.6, -1.5), direction=(1, 0, 0))
except NoTargetError as exc:
    print("\nparallel ray:", exc)
