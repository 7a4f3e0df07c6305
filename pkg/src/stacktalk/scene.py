"""Simulated shared world: objects with properties, and deixis resolution.

The scene is the ground truth both interlocutors talk about.  Deictic
gestures arrive as rays (origin + direction); the target is the point where
the ray meets the ground plane, and the indicated region is a disc of
configurable radius around that point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from .errors import NoTargetError, SchemaError, ValidationError

Vec3 = tuple[float, float, float]

# Plane-equation tolerance for resolved deixis locations.
PLANE_TOL = 1e-9

DEFAULT_REGION_RADIUS = 0.5
DEFAULT_HUMAN_VIEWPOINT = (0.0, 1.6, -2.0)
DEFAULT_BOUNDS_RADIUS = 10.0


def _as_vec3(value, where: str) -> Vec3:
    try:
        x, y, z = (float(c) for c in value)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: expected a 3-vector, got {value!r}") from exc
    if not all(math.isfinite(c) for c in (x, y, z)):
        raise ValidationError(f"{where}: components must be finite, got {value!r}")
    return (x, y, z)


@dataclass
class WorldObject:
    """One manipulable (or at least nameable) thing in the scene."""

    id: str
    kind: str
    attributes: frozenset[str] = frozenset()
    position: Vec3 = (0.0, 0.0, 0.0)
    graspable: bool = True
    held_by: str | None = None

    def __post_init__(self):
        self.attributes = frozenset(self.attributes)
        self.position = _as_vec3(self.position, f"object {self.id!r} position")
        if self.held_by is not None and not self.graspable:
            raise ValidationError(f"object {self.id!r}: held_by set but not graspable")

    def matches(self, noun: str | None, attributes=()) -> bool:
        if noun is not None and self.kind != noun:
            return False
        return frozenset(attributes) <= self.attributes


@dataclass
class Scene:
    """The shared world plus the handful of geometric session parameters."""

    objects: dict[str, WorldObject] = field(default_factory=dict)
    ground_plane_height: float = 0.0
    agent_origin: Vec3 = (0.0, 1.0, 2.0)
    deixis_region_radius: float = DEFAULT_REGION_RADIUS
    human_viewpoint: Vec3 = DEFAULT_HUMAN_VIEWPOINT
    bounds_radius: float = DEFAULT_BOUNDS_RADIUS

    def __post_init__(self):
        if self.deixis_region_radius <= 0:
            raise ValidationError("deixis_region_radius must be > 0")
        if self.agent_origin[1] <= self.ground_plane_height:
            raise ValidationError("agent_origin must lie above the ground plane")

    def object(self, obj_id: str) -> WorldObject:
        return self.objects[obj_id]

    def ordered_objects(self) -> list[WorldObject]:
        return list(self.objects.values())

    def in_bounds(self, location: Vec3) -> bool:
        dx = location[0] - self.agent_origin[0]
        dz = location[2] - self.agent_origin[2]
        return math.hypot(dx, dz) <= self.bounds_radius

    def copy(self) -> "Scene":
        """Independent scene sharing the object values.

        Safe because world effects replace objects in the map rather than
        mutating them in place.
        """
        return Scene(
            objects=dict(self.objects),
            ground_plane_height=self.ground_plane_height,
            agent_origin=self.agent_origin,
            deixis_region_radius=self.deixis_region_radius,
            human_viewpoint=self.human_viewpoint,
            bounds_radius=self.bounds_radius,
        )


@dataclass(frozen=True)
class DeixisTarget:
    """Where a pointing ray lands, and which objects sit in that region."""

    location: Vec3
    objects_in_region: tuple[str, ...]


_SCENE_FIELDS = {
    "ground_plane_height",
    "agent_origin",
    "deixis_region_radius",
    "human_viewpoint",
    "bounds_radius",
    "objects",
}
_OBJECT_FIELDS = {"id", "kind", "attributes", "position", "graspable"}


def load_scene(description: str) -> Scene:
    """Parse a scene document (YAML) into a validated Scene.

    Unknown fields are rejected so typos surface immediately instead of
    silently configuring nothing.
    """
    try:
        doc = yaml.safe_load(description)
    except yaml.YAMLError as exc:
        raise SchemaError(f"scene file is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("scene file must be a mapping at top level")

    unknown = set(doc) - _SCENE_FIELDS
    if unknown:
        raise SchemaError(f"unknown scene fields: {sorted(unknown)}")

    objects: dict[str, WorldObject] = {}
    for i, entry in enumerate(doc.get("objects") or []):
        if not isinstance(entry, dict):
            raise SchemaError(f"objects[{i}] must be a mapping")
        unknown = set(entry) - _OBJECT_FIELDS
        if unknown:
            raise SchemaError(f"objects[{i}]: unknown fields {sorted(unknown)}")
        for required in ("id", "kind", "position"):
            if required not in entry:
                raise SchemaError(f"objects[{i}]: missing field {required!r}")
        obj = WorldObject(
            id=str(entry["id"]),
            kind=str(entry["kind"]),
            attributes=frozenset(str(a) for a in entry.get("attributes") or ()),
            position=_as_vec3(entry["position"], f"objects[{i}] position"),
            graspable=bool(entry.get("graspable", True)),
        )
        if obj.id in objects:
            raise ValidationError(f"duplicate object id {obj.id!r}")
        objects[obj.id] = obj

    scene = Scene(
        objects=objects,
        ground_plane_height=float(doc.get("ground_plane_height", 0.0)),
        agent_origin=_as_vec3(doc.get("agent_origin", (0.0, 1.0, 2.0)), "agent_origin"),
        deixis_region_radius=float(doc.get("deixis_region_radius", DEFAULT_REGION_RADIUS)),
        human_viewpoint=_as_vec3(
            doc.get("human_viewpoint", DEFAULT_HUMAN_VIEWPOINT), "human_viewpoint"
        ),
        bounds_radius=float(doc.get("bounds_radius", DEFAULT_BOUNDS_RADIUS)),
    )
    return scene


def load_scene_file(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scene(fh.read())


def horizontal_distance(a: Vec3, b: Vec3) -> float:
    """Distance in the ground plane; the height axis is ignored."""
    return math.hypot(a[0] - b[0], a[2] - b[2])


def resolve_deixis(scene: Scene, origin, direction) -> DeixisTarget:
    """Intersect a pointing ray with the ground plane and bind the region.

    Objects whose horizontal distance to the intersection is at most the
    scene's region radius are listed nearest-first (ties by id).
    """
    o = np.asarray(origin, dtype=float)
    d = np.asarray(direction, dtype=float)
    if o.shape != (3,) or d.shape != (3,):
        raise ValidationError("origin and direction must be 3-vectors")
    if not np.all(np.isfinite(o)) or not np.all(np.isfinite(d)):
        raise ValidationError("origin and direction must be finite")
    if not np.any(d):
        raise NoTargetError("deixis direction is the zero vector")

    dy = float(d[1])
    if dy == 0.0:
        raise NoTargetError("pointing ray is parallel to the ground plane")
    t = (scene.ground_plane_height - float(o[1])) / dy
    if t <= 0.0:
        raise NoTargetError("pointing ray meets the ground plane behind the origin")

    hit = o + t * d
    # Pin the height component exactly; the parametric solve is already
    # within PLANE_TOL, this removes the residual rounding.
    location: Vec3 = (float(hit[0]), scene.ground_plane_height, float(hit[2]))

    members = [
        (horizontal_distance(obj.position, location), obj.id)
        for obj in scene.objects.values()
        if horizontal_distance(obj.position, location) <= scene.deixis_region_radius
    ]
    members.sort()
    return DeixisTarget(location=location, objects_in_region=tuple(oid for _, oid in members))


def filter_by_description(candidates, scene: Scene, noun=None, attributes=()) -> list[str]:
    """Keep the candidate ids matching a noun kind and all given attributes.

    Order is preserved; an empty result is legitimate (the dialogue layer
    decides what to do about it).
    """
    wanted = frozenset(attributes)
    out = []
    for oid in candidates:
        obj = scene.objects[oid]
        if obj.matches(noun, wanted):
            out.append(oid)
    return out


def put_object(scene: Scene, obj_id: str, location: Vec3) -> None:
    """World effect of a completed placement: move the object, release it."""
    obj = scene.objects[obj_id]
    scene.objects[obj_id] = replace(obj, position=location, held_by=None)


def grasp_object(scene: Scene, obj_id: str, agent: str = "agent") -> None:
    obj = scene.objects[obj_id]
    if not obj.graspable:
        raise ValidationError(f"object {obj_id!r} is not graspable")
    scene.objects[obj_id] = replace(obj, held_by=agent)
