"""
Loading animation and inspecting poses
======================================

Parse a BVH file, run forward kinematics, look at pose features,
and round-trip a clip through the JSON format.
"""

import numpy as np

from motionlens import (
    clip_poses,
    emit_clip_json,
    forward_kinematics,
    parse_bvh,
    parse_clip_json,
    pose_feature,
    resample,
)

# A tiny two-joint rig: a hip that slides forward while the spine
# swings about Z. Channel layout is the common BVH arrangement.
BVH = """\
HIERARCHY
ROOT Hips
{
    OFFSET 0.0 0.9 0.0
    CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
    JOINT Spine
    {
        OFFSET 0.0 0.5 0.0
        CHANNELS 3 Zrotation Xrotation Yrotation
        End Site
        {
            OFFSET 0.0 0.4 0.0
        }
    }
}
MOTION
Frames: 4
Frame Time: 0.041667
0.0 0.0 0.0  0 0 0   0 0 0
0.0 0.0 0.1  0 0 0  30 0 0
0.0 0.0 0.2  0 0 0  60 0 0
0.0 0.0 0.3  0 0 0  90 0 0
"""

skeleton, clip = parse_bvh(BVH)
print(f"clip {clip.name!r}: {clip.num_frames} frames at {clip.fps:g} fps")
print(f"joints: {skeleton.names} (parents {skeleton.parents})")

# Forward kinematics turns local rotations into world positions.
# By frame 3 the spine has rotated 90 degrees about Z, so the end
# effector's offset (0, 0.4, 0) now points along -X.
pose = forward_kinematics(skeleton, clip.root_translations[3], clip.rotations[3])
for name, p in zip(skeleton.names, pose.positions):
    print(f"  frame 3  {name:10s} at ({p[0]:+.3f}, {p[1]:+.3f}, {p[2]:+.3f})")

# clip_poses gives every frame at once: (T, J, 3) positions plus the
# root's world rotation per frame.
positions, root_rotations = clip_poses(clip)
print(f"all poses: positions {positions.shape}, root rotations {root_rotations.shape}")

# Pose features are what the clustering works on: root-relative,
# heading-normalised joint positions. Two frames that differ only by
# where the character stands map to the same feature.
f0 = pose_feature(skeleton, pose)
print(f"pose feature ({f0.shape[0]} numbers): {np.round(f0, 3)}")

# Resampling changes the frame rate; first and last frames survive
# exactly.
slow = resample(clip, 12.0)
print(f"resampled to 12 fps: {slow.num_frames} frames")
assert np.array_equal(slow.root_translations[0], clip.root_translations[0])
assert np.array_equal(slow.root_translations[-1], clip.root_translations[-1])

# The JSON clip format round-trips without losing a bit.
text = emit_clip_json(clip)
_, again = parse_clip_json(text, name=clip.name)
assert np.array_equal(again.root_translations, clip.root_translations)
assert np.array_equal(again.rotations, clip.rotations)
print(f"JSON round trip: {len(text)} bytes, arrays identical")
