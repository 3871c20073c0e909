"""Skeletons, animation clips, forward kinematics and pose features.

Conventions used throughout the package:

* joints are stored in topological order (every parent index is
  smaller than the child's own index, the root sits at index 0),
* rotations are unit quaternions in (w, x, y, z) order,
* positions are world-space 3-vectors in the clip's length units.
"""

from dataclasses import dataclass, field

import numpy as np

from . import quat
from .errors import ValidationError

_UP_AXES = ("Y", "Z")

# Forward direction of an unrotated root, per up axis. The heading of a
# pose is the yaw of this vector (rotated by the root's world rotation)
# projected onto the ground plane.
_FORWARD = {"Y": np.array([0.0, 0.0, 1.0]), "Z": np.array([0.0, 1.0, 0.0])}


def _frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Skeleton:
    """Joint hierarchy shared by one or more clips.

    Args:
        names: joint names, unique, root first.
        parents: parent index per joint; -1 for the root, otherwise a
            smaller index than the joint's own.
        offsets: (J, 3) rest offsets from the parent joint.
        up_axis: "Y" or "Z".
        chains: named groups of joint indices ("left arm", "spine", ...).
    """

    names: tuple
    parents: tuple
    offsets: np.ndarray
    up_axis: str = "Y"
    chains: dict = field(default_factory=dict)

    def __post_init__(self):
        names = tuple(self.names)
        parents = tuple(int(p) for p in self.parents)
        offsets = _frozen_array(self.offsets)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(
            self, "chains", {str(k): tuple(int(i) for i in v) for k, v in self.chains.items()}
        )
        j = len(names)
        if j == 0:
            raise ValidationError("skeleton has no joints")
        if len(set(names)) != j:
            raise ValidationError("duplicate joint names")
        if len(parents) != j:
            raise ValidationError(f"{j} joints but {len(parents)} parent entries")
        if offsets.shape != (j, 3):
            raise ValidationError(f"offsets must have shape ({j}, 3), got {offsets.shape}")
        if parents[0] != -1:
            raise ValidationError("joint 0 must be the root (parent -1)")
        for i, p in enumerate(parents[1:], start=1):
            if not 0 <= p < i:
                raise ValidationError(f"joint {i} ({names[i]!r}) has parent {p}; needs 0 <= parent < {i}")
        if self.up_axis not in _UP_AXES:
            raise ValidationError(f"up_axis must be one of {_UP_AXES}, got {self.up_axis!r}")
        for chain, indices in self.chains.items():
            for i in indices:
                if not 0 <= i < j:
                    raise ValidationError(f"chain {chain!r} references joint {i}, out of range")

    @property
    def num_joints(self):
        return len(self.names)

    def index_of(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"no joint named {name!r}") from None


@dataclass(frozen=True, eq=False)
class AnimationClip:
    """One animation: a skeleton plus T frames of local transforms.

    root_translations has shape (T, 3); rotations has shape (T, J, 4)
    with one unit quaternion per joint per frame.
    """

    name: str
    skeleton: Skeleton
    fps: float
    root_translations: np.ndarray
    rotations: np.ndarray

    def __post_init__(self):
        roots = _frozen_array(self.root_translations)
        rots = _frozen_array(self.rotations)
        object.__setattr__(self, "fps", float(self.fps))
        object.__setattr__(self, "root_translations", roots)
        object.__setattr__(self, "rotations", rots)
        if self.fps <= 0:
            raise ValidationError(f"fps must be positive, got {self.fps}")
        j = self.skeleton.num_joints
        if roots.ndim != 2 or roots.shape[1] != 3 or roots.shape[0] < 1:
            raise ValidationError(f"root_translations must be (T, 3) with T >= 1, got {roots.shape}")
        if rots.shape != (roots.shape[0], j, 4):
            raise ValidationError(
                f"rotations must be ({roots.shape[0]}, {j}, 4), got {rots.shape}"
            )
        norms = np.linalg.norm(rots, axis=-1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > 1e-6:
            raise ValidationError(f"rotations must be unit quaternions (worst deviation {worst:.2e})")

    @property
    def num_frames(self):
        return self.root_translations.shape[0]

    @property
    def duration(self):
        """Clip length in seconds."""
        return self.num_frames / self.fps


@dataclass(frozen=True, eq=False)
class GlobalPose:
    """World-space joint positions for one frame.

    root_rotation is the root joint's world rotation; it carries the
    pose's heading, which joint positions alone cannot recover.
    """

    positions: np.ndarray
    root_rotation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "positions", _frozen_array(self.positions))
        object.__setattr__(self, "root_rotation", _frozen_array(self.root_rotation))


def forward_kinematics(skeleton, root_translation, rotations):
    """Pose the skeleton from one frame of local transforms.

    Args:
        skeleton: the joint hierarchy.
        root_translation: world position of the root, 3-vector.
        rotations: (J, 4) local rotations, one per joint.

    Returns:
        GlobalPose with positions[i] = positions[parent] + the rest
        offset of joint i rotated by the parent chain's accumulated
        rotation.
    """
    rotations = np.asarray(rotations, dtype=float)
    if rotations.shape != (skeleton.num_joints, 4):
        raise ValidationError(
            f"expected ({skeleton.num_joints}, 4) rotations, got {rotations.shape}"
        )
    positions, world_rots = _fk_arrays(
        skeleton, np.asarray(root_translation, dtype=float)[None, :], rotations[None]
    )
    return GlobalPose(positions=positions[0], root_rotation=world_rots[0, 0])


def clip_poses(clip):
    """Forward kinematics over every frame of a clip.

    Returns (positions, root_rotations): arrays of shape (T, J, 3) and
    (T, 4).
    """
    positions, world_rots = _fk_arrays(clip.skeleton, clip.root_translations, clip.rotations)
    return positions, world_rots[:, 0]


def _fk_arrays(skeleton, root_translations, rotations):
    """Vectorised FK: (T, 3) roots + (T, J, 4) rotations -> positions and
    accumulated world rotations, shapes (T, J, 3) and (T, J, 4)."""
    t, j = rotations.shape[0], skeleton.num_joints
    positions = np.empty((t, j, 3))
    world_rots = np.empty((t, j, 4))
    positions[:, 0] = root_translations
    world_rots[:, 0] = rotations[:, 0]
    for i in range(1, j):
        p = skeleton.parents[i]
        positions[:, i] = positions[:, p] + quat.rotate(world_rots[:, p], skeleton.offsets[i])
        world_rots[:, i] = quat.multiply(world_rots[:, p], rotations[:, i])
    return positions, world_rots


def heading_angle(root_rotation, up_axis):
    """Yaw of the root's forward direction about the up axis, radians.

    Falls back to 0.0 when the rotated forward direction is parallel to
    the up axis (its ground projection vanishes), so every pose has a
    well-defined heading.
    """
    return float(_heading_angles(np.asarray(root_rotation, dtype=float)[None], up_axis)[0])


def _heading_angles(root_rotations, up_axis):
    forward = quat.rotate(root_rotations, _FORWARD[up_axis])
    if up_axis == "Y":
        # yaw theta about +Y sends +Z to (sin t, 0, cos t)
        x, z = forward[..., 0], forward[..., 2]
        angles = np.arctan2(x, z)
        flat = np.hypot(x, z) < 1e-12
    else:
        # yaw theta about +Z sends +Y to (-sin t, cos t, 0)
        x, y = forward[..., 0], forward[..., 1]
        angles = np.arctan2(-x, y)
        flat = np.hypot(x, y) < 1e-12
    return np.where(flat, 0.0, angles)


def pose_feature(skeleton, pose):
    """Flatten a pose into a location- and heading-invariant vector.

    Joint positions are expressed relative to the root and rotated by
    the inverse of the root's heading (yaw about the up axis), then
    flattened in joint order into a (3*J,) array. The root entry is
    exactly zero.
    """
    features = _feature_array(
        skeleton, pose.positions[None], pose.root_rotation[None]
    )
    return features[0]


def clip_features(clip):
    """Pose features for every frame of a clip, shape (T, 3*J)."""
    positions, root_rotations = clip_poses(clip)
    return _feature_array(clip.skeleton, positions, root_rotations)


def _feature_array(skeleton, positions, root_rotations):
    if positions.shape[1] != skeleton.num_joints:
        raise ValidationError(
            f"pose has {positions.shape[1]} joints, skeleton has {skeleton.num_joints}"
        )
    angles = _heading_angles(root_rotations, skeleton.up_axis)
    undo = quat.about_axis(skeleton.up_axis, -angles)
    relative = positions - positions[:, :1]
    rotated = quat.rotate(undo[:, None, :], relative)
    rotated[:, 0] = 0.0
    return rotated.reshape(positions.shape[0], -1)


def resample(clip, target_fps):
    """Re-time a clip to a new frame rate.

    The new frame count is round(T * target / source), at least 1. Each
    output frame i samples source time i * source / target (clamped to
    the clip); integral sample points copy the source frame exactly,
    fractional ones interpolate (linear for the root translation,
    spherical per joint rotation). The final output frame is pinned to
    the exact final source frame.
    """
    target_fps = float(target_fps)
    if target_fps <= 0:
        raise ValidationError(f"target fps must be positive, got {target_fps}")
    if target_fps == clip.fps:
        return clip
    t = clip.num_frames
    new_t = max(1, round(t * target_fps / clip.fps))
    step = clip.fps / target_fps
    roots = np.empty((new_t, 3))
    rots = np.empty((new_t, clip.skeleton.num_joints, 4))
    for i in range(new_t):
        s = min(i * step, t - 1.0)
        if i == new_t - 1:
            s = t - 1.0
        lo = int(np.floor(s))
        frac = s - lo
        if frac == 0.0:
            roots[i] = clip.root_translations[lo]
            rots[i] = clip.rotations[lo]
        else:
            hi = lo + 1
            roots[i] = (1.0 - frac) * clip.root_translations[lo] + frac * clip.root_translations[hi]
            rots[i] = quat.slerp(clip.rotations[lo], clip.rotations[hi], frac)
    return AnimationClip(
        name=clip.name,
        skeleton=clip.skeleton,
        fps=target_fps,
        root_translations=roots,
        rotations=rots,
    )
