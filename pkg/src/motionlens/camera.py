"""Camera projection, screen-space joint curves, and frame diffing.

The camera looks along its local -Z with +Y up. Projection produces
normalised device coordinates where the visible frustum maps to
[-1, 1] on both axes.
"""

from dataclasses import dataclass

import numpy as np

from . import quat
from .core import clip_poses, forward_kinematics
from .errors import FrameOutOfRange, NotFound, ValidationError

# stands in for non-finite NDC when a point sits exactly in the
# camera plane (z_cam == 0); sign follows the pre-divide numerator
OFFSCREEN = 1e6


@dataclass(frozen=True, eq=False)
class CameraSpec:
    """Static pinhole camera: position, orientation, vertical field of
    view (radians), aspect = width/height, near plane distance."""

    position: np.ndarray
    orientation: np.ndarray
    vertical_fov: float = np.pi / 3
    aspect: float = 16.0 / 9.0
    near: float = 0.1

    def __post_init__(self):
        position = np.asarray(self.position, dtype=float)
        orientation = np.asarray(self.orientation, dtype=float)
        if position.shape != (3,):
            raise ValidationError("camera position must be a 3-vector")
        if orientation.shape != (4,):
            raise ValidationError("camera orientation must be a quaternion (w, x, y, z)")
        if abs(float(np.linalg.norm(orientation)) - 1.0) > 1e-6:
            raise ValidationError("camera orientation must be a unit quaternion")
        if not 0.0 < self.vertical_fov < np.pi:
            raise ValidationError(f"vertical_fov must be in (0, pi), got {self.vertical_fov}")
        if self.aspect <= 0.0:
            raise ValidationError(f"aspect must be positive, got {self.aspect}")
        if self.near <= 0.0:
            raise ValidationError(f"near must be positive, got {self.near}")
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "orientation", orientation)
        object.__setattr__(self, "vertical_fov", float(self.vertical_fov))
        object.__setattr__(self, "aspect", float(self.aspect))
        object.__setattr__(self, "near", float(self.near))


@dataclass(frozen=True, eq=False)
class ProjectedSample:
    """One projected point: NDC, depth along the view axis, and whether
    it lands inside the frustum in front of the near plane."""

    ndc: np.ndarray
    depth: float
    in_view: bool
    frame: int = None


@dataclass(frozen=True, eq=False)
class ClipCurve:
    """Screen-space track of one joint over one clip."""

    clip_id: str
    frames: np.ndarray
    bar_x: np.ndarray
    bar_y: np.ndarray
    out_of_view: np.ndarray


@dataclass(frozen=True, eq=False)
class JointCurves:
    """Per-clip screen-space curves of one joint, normalised together.

    bar values are (ndc - min) / (max - min) with the extrema taken
    over every clip, then clamped to [0, 1]; a degenerate range maps to
    a flat 0.5. The extrema themselves are kept so callers can undo the
    normalisation.
    """

    joint: int
    clips: tuple
    min_x: float
    max_x: float
    min_y: float
    max_y: float


@dataclass(frozen=True, eq=False)
class DiffFrame:
    """Corresponding joint positions of two clips at one timeline frame."""

    frame: int
    clip_a: str
    clip_b: str
    positions_a: np.ndarray
    positions_b: np.ndarray
    distances: np.ndarray


def _project_points(camera, points):
    """Project (N, 3) world points -> (ndc (N, 2), depth (N,), in_view (N,))."""
    points = np.asarray(points, dtype=float)
    cam = quat.rotate(quat.conjugate(camera.orientation), points - camera.position)
    depth = -cam[..., 2]
    tan_half = np.tan(camera.vertical_fov / 2.0)
    numer_x = cam[..., 0] / (camera.aspect * tan_half)
    numer_y = cam[..., 1] / tan_half
    with np.errstate(divide="ignore", invalid="ignore"):
        ndc = np.stack([numer_x / depth, numer_y / depth], axis=-1)
    bad = ~np.isfinite(ndc)
    if np.any(bad):
        signs = np.sign(np.stack([numer_x, numer_y], axis=-1))
        ndc = np.where(bad, signs * OFFSCREEN, ndc)
    in_view = (depth >= camera.near) & (np.abs(ndc[..., 0]) <= 1.0) & (np.abs(ndc[..., 1]) <= 1.0)
    return ndc, depth, in_view


def project(camera, point):
    """Project one world-space point through the camera."""
    ndc, depth, in_view = _project_points(camera, np.asarray(point, dtype=float)[None])
    return ProjectedSample(ndc=ndc[0], depth=float(depth[0]), in_view=bool(in_view[0]))


def joint_curves(animation_set, camera, joint):
    """Track one joint's screen position across every clip of a set.

    Projects the joint's world position at every frame of every clip,
    then normalises x and y independently by the global extrema over
    all clips so the clips stay comparable.
    """
    skeleton = animation_set.skeleton
    if not 0 <= joint < skeleton.num_joints:
        raise ValidationError(f"joint {joint} out of range for {skeleton.num_joints} joints")
    raw = []
    for clip in animation_set.clips:
        positions, _ = clip_poses(clip)
        ndc, _, in_view = _project_points(camera, positions[:, joint])
        raw.append((clip.name, ndc, in_view))

    all_ndc = np.vstack([ndc for _, ndc, _ in raw])
    min_x, min_y = all_ndc.min(axis=0)
    max_x, max_y = all_ndc.max(axis=0)

    def normalise(values, lo, hi):
        if hi > lo:
            bar = (values - lo) / (hi - lo)
        else:
            bar = np.full_like(values, 0.5)
        return np.clip(bar, 0.0, 1.0)

    clips = tuple(
        ClipCurve(
            clip_id=name,
            frames=np.arange(ndc.shape[0]),
            bar_x=normalise(ndc[:, 0], min_x, max_x),
            bar_y=normalise(ndc[:, 1], min_y, max_y),
            out_of_view=~in_view,
        )
        for name, ndc, in_view in raw
    )
    return JointCurves(
        joint=joint,
        clips=clips,
        min_x=float(min_x),
        max_x=float(max_x),
        min_y=float(min_y),
        max_y=float(max_y),
    )


def diff_frames(animation_set, clip_a, clip_b, offsets, frame):
    """Compare two clips' joint positions at one global timeline frame.

    offsets maps clip name -> timeline offset in frames; each clip is
    sampled at frame - offset. Raises FrameOutOfRange naming the clip
    whose active range excludes the frame.
    """
    if clip_a == clip_b:
        raise ValidationError("diff needs two different clips")
    try:
        a = animation_set.clip(clip_a)
        b = animation_set.clip(clip_b)
    except KeyError as exc:
        raise NotFound(f"no clip named {exc.args[0]!r} in the set") from None

    locals_ = {}
    for clip in (a, b):
        local = frame - offsets.get(clip.name, 0)
        if not 0 <= local < clip.num_frames:
            raise FrameOutOfRange(
                f"frame {frame} falls outside clip {clip.name!r} "
                f"(local {local}, valid 0..{clip.num_frames - 1})"
            )
        locals_[clip.name] = local

    pose_a = forward_kinematics(a.skeleton, a.root_translations[locals_[a.name]], a.rotations[locals_[a.name]])
    pose_b = forward_kinematics(b.skeleton, b.root_translations[locals_[b.name]], b.rotations[locals_[b.name]])
    distances = np.linalg.norm(pose_a.positions - pose_b.positions, axis=1)
    return DiffFrame(
        frame=frame,
        clip_a=clip_a,
        clip_b=clip_b,
        positions_a=pose_a.positions,
        positions_b=pose_b.positions,
        distances=distances,
    )
