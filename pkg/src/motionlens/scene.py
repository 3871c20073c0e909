"""Scene primitives used for blocking out the environment.

Objects are unit primitives (cube, sphere, plane, cylinder, cone)
placed by a translate-rotate-scale transform. Collision tests happen in
the object's local frame, so each primitive has a fixed canonical size
there; see spatial.path_collisions.
"""

from dataclasses import dataclass

import numpy as np

from . import quat
from .errors import ObjectDegenerate, ValidationError

KINDS = ("cube", "sphere", "plane", "cylinder", "cone")


@dataclass(frozen=True, eq=False)
class SceneObject:
    """A placed primitive.

    Canonical local-frame shapes (before the object's scale):
      cube     — axis-aligned box spanning [-0.5, 0.5] on each axis
      sphere   — radius 0.5 around the origin
      plane    — unit quad in the XZ plane at y=0, |x|,|z| <= 0.5
      cylinder — radius 0.5, axis +Y, y in [-0.5, 0.5], capped
      cone     — base radius 0.5 at y=-0.5, apex at y=+0.5
    """

    object_id: str
    kind: str
    position: np.ndarray
    rotation: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown primitive kind {self.kind!r}; expected one of {KINDS}")
        position = np.asarray(self.position, dtype=float)
        rotation = np.asarray(self.rotation, dtype=float)
        scale = np.asarray(self.scale, dtype=float)
        if position.shape != (3,):
            raise ValidationError("position must be a 3-vector")
        if scale.shape != (3,):
            raise ValidationError("scale must be a 3-vector")
        if rotation.shape != (4,):
            raise ValidationError("rotation must be a quaternion (w, x, y, z)")
        if abs(float(np.linalg.norm(rotation)) - 1.0) > 1e-6:
            raise ValidationError("rotation must be a unit quaternion")
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "scale", scale)


def world_to_local(obj, points):
    """Map world-space points into an object's canonical local frame.

    Inverts the object's translate-rotate-scale; raises
    ObjectDegenerate when the transform cannot be inverted.
    """
    if not np.all(np.isfinite(obj.scale)) or np.any(obj.scale == 0.0):
        raise ObjectDegenerate(obj.object_id)
    points = np.asarray(points, dtype=float)
    unrotated = quat.rotate(quat.conjugate(obj.rotation), points - obj.position)
    return unrotated / obj.scale
