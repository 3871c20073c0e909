"""Shared fixture builders for the test suite."""

import numpy as np
import pytest

from motionlens import AnimationClip, AnimationSet, Skeleton, quat


def make_skeleton(num_joints=3, up_axis="Y"):
    """Simple chain skeleton: root -> j1 -> j2 -> ..., 1 unit apart."""
    names = tuple(f"j{i}" if i else "root" for i in range(num_joints))
    parents = tuple(i - 1 for i in range(num_joints))
    offsets = np.zeros((num_joints, 3))
    offsets[1:, 1] = 1.0
    chains = {"tail": tuple(range(1, num_joints))} if num_joints > 1 else {}
    return Skeleton(names=names, parents=parents, offsets=offsets, up_axis=up_axis, chains=chains)


def make_random_clip(skeleton, frames=20, seed=0, name="clip", fps=24.0, drift=0.05, wobble=2.0):
    """Smooth random-walk clip: drifting root, wobbling joint rotations."""
    rng = np.random.default_rng(seed)
    j = skeleton.num_joints
    roots = np.cumsum(rng.normal(0.0, drift, (frames, 3)), axis=0)
    angles = np.cumsum(rng.normal(0.0, wobble, (frames, j, 3)), axis=0)
    rotations = quat.from_euler_degrees(("Z", "X", "Y"), angles.reshape(-1, 3)).reshape(
        frames, j, 4
    )
    return AnimationClip(
        name=name, skeleton=skeleton, fps=fps, root_translations=roots, rotations=rotations
    )


def make_constant_clip(skeleton, frames=20, name="still", fps=24.0, root=(0.0, 0.0, 0.0)):
    j = skeleton.num_joints
    roots = np.tile(np.asarray(root, dtype=float), (frames, 1))
    rotations = np.broadcast_to(quat.IDENTITY, (frames, j, 4)).copy()
    return AnimationClip(
        name=name, skeleton=skeleton, fps=fps, root_translations=roots, rotations=rotations
    )


def make_step_clip(skeleton, name, first_pose_deg, second_pose_deg, step_at, frames=20, fps=24.0):
    """Holds one arm pose, then snaps to another at step_at. Useful for
    clustering fixtures with a known segment boundary."""
    j = skeleton.num_joints
    roots = np.zeros((frames, 3))
    rotations = np.broadcast_to(quat.IDENTITY, (frames, j, 4)).copy()
    q_first = quat.from_euler_degrees(("Z",), np.array([[first_pose_deg]]))[0]
    q_second = quat.from_euler_degrees(("Z",), np.array([[second_pose_deg]]))[0]
    rotations[:step_at, 1] = q_first
    rotations[step_at:, 1] = q_second
    return AnimationClip(
        name=name, skeleton=skeleton, fps=fps, root_translations=roots, rotations=rotations
    )


def make_set(*clips, source_names=None):
    names = source_names or tuple(c.name for c in clips)
    return AnimationSet(skeleton=clips[0].skeleton, clips=tuple(clips), source_names=tuple(names))


@pytest.fixture
def chain3():
    return make_skeleton(3)


@pytest.fixture
def small_set(chain3):
    return make_set(
        make_random_clip(chain3, frames=16, seed=1, name="a"),
        make_random_clip(chain3, frames=20, seed=2, name="b"),
    )
