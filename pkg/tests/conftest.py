from __future__ import annotations

import pytest

from stacktalk.dialogue import DialogueSession, default_scene_text
from stacktalk.scene import Scene, WorldObject, load_scene

# The shipped tabletop: a point at (0, 0, 1.5) covers both cups but not the
# plate or knife; the human viewpoint ray through that point is (0,-1.6,3).
POINT_ORIGIN = (0.0, 1.6, -1.5)
POINT_DIRECTION = (0.0, -1.6, 3.0)
POINT_LOCATION = (0.0, 0.0, 1.5)


@pytest.fixture
def tabletop() -> Scene:
    return load_scene(default_scene_text())


@pytest.fixture
def session(tabletop) -> DialogueSession:
    return DialogueSession(tabletop)


def make_session(scene: Scene | None = None, **kw) -> DialogueSession:
    return DialogueSession(scene if scene is not None else load_scene(default_scene_text()), **kw)


def grid_scene(count: int, kind: str = "block", spacing: float = 2.0) -> Scene:
    """count distinct graspable objects, far enough apart not to share regions."""
    objects = {}
    for i in range(count):
        oid = f"{kind}{i}"
        objects[oid] = WorldObject(
            id=oid, kind=kind, position=(spacing * (i + 1), 0.0, 1.0), graspable=True
        )
    return Scene(objects=objects, agent_origin=(0.0, 1.0, 2.5), bounds_radius=1e6)
