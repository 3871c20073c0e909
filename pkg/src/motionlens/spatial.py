"""In-scene views of a clip: keyposes, trace windows, joint paths and
their collisions with scene objects."""

from dataclasses import dataclass

import numpy as np

from .core import GlobalPose, clip_poses
from .errors import FrameOutOfRange, ValidationError
from .scene import world_to_local


@dataclass(frozen=True, eq=False)
class KeyposeSet:
    """The min(k, T) most shape-defining frames of a clip, ascending."""

    clip_id: str
    frames: tuple
    poses: tuple


@dataclass(frozen=True, eq=False)
class JointPath:
    """World-space position of one joint at every frame of a clip."""

    clip_id: str
    joint: int
    points: np.ndarray


@dataclass(frozen=True, eq=False)
class CollisionEvent:
    """Frames where a joint path runs through a scene object.

    frame_intervals are disjoint sorted [start, end) ranges.
    """

    clip_id: str
    joint: int
    object_id: str
    frame_intervals: tuple


def _segment_errors(positions, frames):
    """Squared reconstruction error per frame against piecewise-linear
    interpolation through the selected frames. Selected frames score -1
    so argmax never picks them."""
    t = positions.shape[0]
    errors = np.zeros(t)
    for a, b in zip(frames[:-1], frames[1:]):
        if b - a < 2:
            continue
        ts = np.arange(a + 1, b)
        w = ((ts - a) / (b - a))[:, None, None]
        interp = positions[a][None] * (1.0 - w) + positions[b][None] * w
        errors[ts] = np.sum((positions[ts] - interp) ** 2, axis=(1, 2))
    errors[list(frames)] = -1.0
    return errors


def _hat_design(t, knots):
    """(t, len(knots)) matrix of piecewise-linear basis weights: row i
    blends the two knots bracketing frame i."""
    design = np.zeros((t, len(knots)))
    for i, (a, b) in enumerate(zip(knots[:-1], knots[1:])):
        ts = np.arange(a, b)
        w = (ts - a) / (b - a)
        design[ts, i] = 1.0 - w
        design[ts, i + 1] = w
    design[knots[-1], len(knots) - 1] = 1.0
    return design


def reconstruction_error(clip, frames):
    """Total squared error of the best piecewise-linear reconstruction
    of the clip's joint positions with knots at the given frames.

    Knot times are fixed at the selected frames; knot values are fit by
    least squares. A larger frame set can only enlarge the space of
    reconstructions, so the error never increases as frames are added —
    a summary never gets worse by keeping more keyposes. Frames outside
    the selected range contribute nothing.
    """
    positions, _ = clip_poses(clip)
    frames = tuple(sorted({int(f) for f in frames}))
    if not frames:
        raise ValidationError("need at least one frame to reconstruct from")
    if frames[0] < 0 or frames[-1] >= positions.shape[0]:
        raise FrameOutOfRange(
            f"frames must lie in [0, {positions.shape[0]}), got {frames[0]}..{frames[-1]}"
        )
    window = positions[frames[0] : frames[-1] + 1]
    if len(frames) == window.shape[0]:
        return 0.0
    design = _hat_design(window.shape[0], np.asarray(frames) - frames[0])
    flat = window.reshape(window.shape[0], -1)
    coef, *_ = np.linalg.lstsq(design, flat, rcond=None)
    residual = design @ coef - flat
    return float(np.sum(residual * residual))


def extract_keyposes(clip, k):
    """Pick the min(k, T) frames that best summarise a clip.

    Greedy curve simplification: start with the first and last frames,
    then repeatedly add the frame deviating most from the current
    summary (sum over joints of squared distance between the actual
    global positions and linear interpolation between the bracketing
    selected frames). Ties go to the lowest frame index.
    """
    positions, root_rotations = clip_poses(clip)
    t = positions.shape[0]
    if t >= 2 and k < 2:
        raise ValidationError(f"need k >= 2 to bracket the clip, got {k}")
    if t == 1:
        frames = (0,)
    else:
        count = min(k, t)
        selected = [0, t - 1]
        while len(selected) < count:
            errors = _segment_errors(positions, tuple(sorted(selected)))
            selected.append(int(errors.argmax()))
        frames = tuple(sorted(selected))
    poses = tuple(GlobalPose(positions[f], root_rotations[f]) for f in frames)
    return KeyposeSet(clip_id=clip.name, frames=frames, poses=poses)


def trace_window(clip, frame, n):
    """Poses for the n frames around `frame`, clipped to the clip.

    Returns (frame index, GlobalPose) pairs for the inclusive window
    [max(0, frame-n), min(T-1, frame+n)], ascending.
    """
    t = clip.num_frames
    if not 0 <= frame < t:
        raise FrameOutOfRange(f"frame {frame} outside clip {clip.name!r} (0..{t - 1})")
    if n < 0:
        raise ValidationError(f"window size must be >= 0, got {n}")
    positions, root_rotations = clip_poses(clip)
    lo = max(0, frame - n)
    hi = min(t - 1, frame + n)
    return [(f, GlobalPose(positions[f], root_rotations[f])) for f in range(lo, hi + 1)]


def joint_path(clip, joint):
    """World-space path of one joint across the whole clip."""
    if not 0 <= joint < clip.skeleton.num_joints:
        raise ValidationError(f"joint {joint} out of range for {clip.skeleton.num_joints} joints")
    positions, _ = clip_poses(clip)
    return JointPath(clip_id=clip.name, joint=joint, points=positions[:, joint])


# ---------------------------------------------------------------------------
# Collision tests against canonical primitives, in the object local frame.
# Surfaces are closed: touching counts as a collision.


def _slab(p, d, lo, hi):
    """t-interval within [0,1] where the 1D point p + t*d lies in [lo, hi],
    or None."""
    if d == 0.0:
        return (0.0, 1.0) if lo <= p <= hi else None
    t0 = (lo - p) / d
    t1 = (hi - p) / d
    if t0 > t1:
        t0, t1 = t1, t0
    t0 = max(t0, 0.0)
    t1 = min(t1, 1.0)
    return (t0, t1) if t0 <= t1 else None


def _quadratic_reaches_zero(a, b, c, interval):
    """Does a*t^2 + b*t + c dip to <= 0 anywhere on the interval?"""
    lo, hi = interval
    candidates = [lo, hi]
    if a > 0.0:
        candidates.append(min(max(-b / (2.0 * a), lo), hi))
    return any(a * t * t + b * t + c <= 0.0 for t in candidates)


def _segment_hits_cube(p, q):
    interval = (0.0, 1.0)
    for axis in range(3):
        axis_interval = _slab(p[axis], q[axis] - p[axis], -0.5, 0.5)
        if axis_interval is None:
            return False
        interval = (max(interval[0], axis_interval[0]), min(interval[1], axis_interval[1]))
        if interval[0] > interval[1]:
            return False
    return True


def _segment_hits_sphere(p, q):
    d = q - p
    a = float(d @ d)
    b = 2.0 * float(p @ d)
    c = float(p @ p) - 0.25
    return _quadratic_reaches_zero(a, b, c, (0.0, 1.0))


def _segment_hits_plane(p, q):
    dy = q[1] - p[1]
    if dy == 0.0:
        if p[1] != 0.0:
            return False
        # coplanar: 2D segment vs the quad's square footprint
        interval = (0.0, 1.0)
        for axis in (0, 2):
            axis_interval = _slab(p[axis], q[axis] - p[axis], -0.5, 0.5)
            if axis_interval is None:
                return False
            interval = (max(interval[0], axis_interval[0]), min(interval[1], axis_interval[1]))
        return interval[0] <= interval[1]
    t = -p[1] / dy
    if not 0.0 <= t <= 1.0:
        return False
    x = p[0] + t * (q[0] - p[0])
    z = p[2] + t * (q[2] - p[2])
    return abs(x) <= 0.5 and abs(z) <= 0.5


def _segment_hits_cylinder(p, q):
    interval = _slab(p[1], q[1] - p[1], -0.5, 0.5)
    if interval is None:
        return False
    dx, dz = q[0] - p[0], q[2] - p[2]
    a = dx * dx + dz * dz
    b = 2.0 * (p[0] * dx + p[2] * dz)
    c = p[0] * p[0] + p[2] * p[2] - 0.25
    return _quadratic_reaches_zero(a, b, c, interval)


def _segment_hits_cone(p, q):
    # radius shrinks linearly from 0.5 at y=-0.5 to 0 at the apex y=+0.5:
    # inside <=> x^2 + z^2 <= ((0.5 - y) / 2)^2 within the y slab. The
    # slab also cuts away the mirror nappe above the apex.
    interval = _slab(p[1], q[1] - p[1], -0.5, 0.5)
    if interval is None:
        return False
    dx, dy, dz = q[0] - p[0], q[1] - p[1], q[2] - p[2]
    rp = (0.5 - p[1]) / 2.0
    rd = -dy / 2.0
    a = dx * dx + dz * dz - rd * rd
    b = 2.0 * (p[0] * dx + p[2] * dz - rp * rd)
    c = p[0] * p[0] + p[2] * p[2] - rp * rp
    return _quadratic_reaches_zero(a, b, c, interval)


_SEGMENT_TESTS = {
    "cube": _segment_hits_cube,
    "sphere": _segment_hits_sphere,
    "plane": _segment_hits_plane,
    "cylinder": _segment_hits_cylinder,
    "cone": _segment_hits_cone,
}


def _frames_to_intervals(frames):
    """Maximal runs of consecutive frames -> [start, end) pairs."""
    intervals = []
    run_start = None
    previous = None
    for f in frames:
        if run_start is None:
            run_start = f
        elif f != previous + 1:
            intervals.append((run_start, previous + 1))
            run_start = f
        previous = f
    if run_start is not None:
        intervals.append((run_start, previous + 1))
    return tuple(intervals)


def path_collisions(path, scene):
    """Find where a joint path intersects scene objects.

    Each polyline segment [i, i+1] is tested against every object in
    the object's own local frame; a colliding segment marks frames i
    and i+1, and consecutive marked frames merge into [start, end)
    intervals. Returns one CollisionEvent per object that is hit.
    """
    events = []
    t = path.points.shape[0]
    for obj in scene:
        local = world_to_local(obj, path.points)
        test = _SEGMENT_TESTS[obj.kind]
        frames = set()
        if t == 1:
            if test(local[0], local[0]):
                frames.add(0)
        for i in range(t - 1):
            if test(local[i], local[i + 1]):
                frames.add(i)
                frames.add(i + 1)
        if frames:
            events.append(
                CollisionEvent(
                    clip_id=path.clip_id,
                    joint=path.joint,
                    object_id=obj.object_id,
                    frame_intervals=_frames_to_intervals(sorted(frames)),
                )
            )
    return events
