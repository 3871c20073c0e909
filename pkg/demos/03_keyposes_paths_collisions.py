"""
Keyposes, joint paths and scene collisions
==========================================

Summarise a clip by its most shape-defining frames, follow one joint
through space, and find the frames where it passes through scenery.
"""

import numpy as np

from motionlens import (
    AnimationClip,
    SceneObject,
    Skeleton,
    extract_keyposes,
    joint_path,
    path_collisions,
    reconstruction_error,
    trace_window,
)

# A jump: the root rises on a parabola and lands again, drifting
# forward the whole time. One arm joint swings for asymmetry.
FRAMES = 40
skeleton = Skeleton(
    names=("root", "chest", "hand"),
    parents=(-1, 0, 1),
    offsets=np.array([[0.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.4, 0.0, 0.0]]),
)
t = np.linspace(0.0, 1.0, FRAMES)
roots = np.zeros((FRAMES, 3))
roots[:, 1] = 1.0 + 1.6 * 4.0 * t * (1.0 - t)  # up and back down
roots[:, 2] = 2.0 * t
rotations = np.zeros((FRAMES, 3, 4))
rotations[..., 0] = 1.0
clip = AnimationClip(
    name="jump", skeleton=skeleton, fps=24.0, root_translations=roots, rotations=rotations
)

# Keypose extraction keeps the first and last frames and greedily adds
# whichever frame the straight-line summary misses worst.
for k in (2, 4, 8):
    keyposes = extract_keyposes(clip, k)
    err = reconstruction_error(clip, keyposes.frames)
    print(f"k={k}: frames {keyposes.frames}  reconstruction error {err:.4f}")
print("(more keyposes never fit worse)")

# A trace window grabs the poses around one frame - what an onion-skin
# overlay would draw.
window = trace_window(clip, frame=20, n=2)
print(f"\ntrace around frame 20: frames {[f for f, _ in window]}")
apex = window[2][1]
print(f"  root height at apex: {apex.positions[0, 1]:.3f}")

# joint_path follows a single joint across every frame.
hand = joint_path(clip, skeleton.index_of("hand"))
heights = hand.points[:, 1]
print(f"\nhand path: {hand.points.shape[0]} points, "
      f"peak height {heights.max():.3f} at frame {heights.argmax()}")

# Drop a ceiling beam where the jump peaks: a stretched cube sitting
# at head height halfway along the run.
beam = SceneObject(
    object_id="beam",
    kind="cube",
    position=(0.0, 2.5, 1.0),
    rotation=(1.0, 0.0, 0.0, 0.0),
    scale=(4.0, 0.3, 0.3),
)
events = path_collisions(joint_path(clip, 0), [beam])
for event in events:
    intervals = ", ".join(f"[{a}, {b})" for a, b in event.frame_intervals)
    print(f"\nroot hits {event.object_id!r} during frames {intervals}")
if not events:
    print("\nno collisions - raise the jump or lower the beam")
