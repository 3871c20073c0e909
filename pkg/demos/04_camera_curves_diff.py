"""
Camera projection, joint curves and frame diffs
===============================================

Project world points through a pinhole camera, chart a joint's screen
position across clips, and measure how far two takes disagree at a
single frame.
"""

import numpy as np

from motionlens import (
    AnimationClip,
    AnimationSet,
    CameraSpec,
    Skeleton,
    diff_frames,
    joint_curves,
    project,
)

camera = CameraSpec(position=(0.0, 1.0, 6.0), orientation=(1.0, 0.0, 0.0, 0.0))

# The camera looks down -Z. A point straight ahead lands dead centre;
# points off to the side move toward the edge of the frame and points
# behind the near plane are flagged out of view.
for label, point in [
    ("straight ahead", (0.0, 1.0, 0.0)),
    ("up and right", (2.0, 3.0, 0.0)),
    ("behind camera", (0.0, 1.0, 7.0)),
]:
    s = project(camera, point)
    print(f"{label:15s} ndc ({s.ndc[0]:+.3f}, {s.ndc[1]:+.3f})  "
          f"depth {s.depth:+.2f}  in_view={s.in_view}")

# Two one-joint takes of the same bounce, the second one delayed.
skeleton = Skeleton(names=("root",), parents=(-1,), offsets=np.zeros((1, 3)))


def bounce(name, frames, phase):
    t = np.linspace(0.0, 2.0 * np.pi, frames) + phase
    roots = np.zeros((frames, 3))
    roots[:, 0] = np.linspace(-1.0, 1.0, frames)
    roots[:, 1] = 1.0 + 0.5 * np.abs(np.sin(t))
    rotations = np.zeros((frames, 1, 4))
    rotations[..., 0] = 1.0
    return AnimationClip(
        name=name, skeleton=skeleton, fps=24.0, root_translations=roots, rotations=rotations
    )


animation_set = AnimationSet(
    skeleton=skeleton,
    clips=(bounce("early", 30, 0.0), bounce("late", 30, 0.8)),
    source_names=("early", "late"),
)

# joint_curves projects the joint at every frame of every clip and
# normalises both axes by the shared extrema, so 0 and 1 mean the same
# screen position in every curve.
curves = joint_curves(animation_set, camera, joint=0)
print(f"\njoint curves over ndc x [{curves.min_x:+.3f}, {curves.max_x:+.3f}] "
      f"y [{curves.min_y:+.3f}, {curves.max_y:+.3f}]")
for curve in curves.clips:
    cells = "▁▂▃▄▅▆▇█"
    chart = "".join(cells[int(v * (len(cells) - 1))] for v in curve.bar_y)
    print(f"  {curve.clip_id:5s} y: {chart}")

# The diff lens compares two takes at one timeline frame. Shifting
# 'late' by its phase lag lines the bounces back up.
for offsets in ({}, {"late": -4}):
    diff = diff_frames(animation_set, "early", "late", offsets, frame=10)
    worst = int(diff.distances.argmax())
    print(f"\noffsets {offsets or '{}'} at frame {diff.frame}: "
          f"mean distance {diff.distances.mean():.3f} "
          f"(worst joint {worst}: {diff.distances[worst]:.3f})")
