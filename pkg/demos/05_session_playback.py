"""
Sessions: timeline playback and cached analyses
===============================================

A Session owns the loaded set plus all mutable view state - timeline,
camera, scene, lens settings - and recomputes analyses only when their
inputs actually change.
"""

from dataclasses import replace

import numpy as np

from motionlens import (
    AnimationClip,
    AnimationSet,
    CameraSpec,
    ClipRow,
    SceneObject,
    Session,
    Skeleton,
    TimelineState,
    active_frames,
    timeline_extent,
)

skeleton = Skeleton(names=("root",), parents=(-1,), offsets=np.zeros((1, 3)))


def drift(name, frames, seed):
    rng = np.random.default_rng(seed)
    roots = np.cumsum(rng.normal(0.0, 0.05, (frames, 3)), axis=0)
    roots[:, 1] += 1.0
    rotations = np.zeros((frames, 1, 4))
    rotations[..., 0] = 1.0
    return AnimationClip(
        name=name, skeleton=skeleton, fps=24.0, root_translations=roots, rotations=rotations
    )


animation_set = AnimationSet(
    skeleton=skeleton,
    clips=(drift("take1", 24, 1), drift("take2", 36, 2)),
    source_names=("take1", "take2"),
)
session = Session(animation_set, seed=0)

# Put take2 six frames later on the timeline and press play.
session.set_timeline(
    replace(
        session.timeline,
        rows=(ClipRow(offset=0), ClipRow(offset=6)),
        playing=True,
    )
)
extent = timeline_extent(session.timeline, animation_set)
print(f"timeline extent: {extent} frames (take2 ends at 6 + 36)")

# Each wall-clock tick advances the frame counter by dt * fps * speed;
# fractions carry over so even tiny steps add up.
for _ in range(6):
    session.tick(1.0 / 8.0)  # 3 frames per tick at 24 fps
frames = active_frames(session.timeline, animation_set)
print(f"after 0.75 s: timeline frame {session.timeline.current_frame}, "
      f"local frames {frames}")

# Analyses come from recompute(). The second call recomputes nothing -
# every kernel's inputs are unchanged, so the memo serves it.
bundle = session.recompute()
print(f"\nclusters: {bundle.clustering.n_clusters}, "
      f"keypose sets: {len(bundle.keyposes)}, "
      f"paths: {len(bundle.paths)}")
session.recompute()
print(f"kernel run counts after two calls: {session.recompute_counts}")

# Moving the camera only invalidates the screen-space curves; the
# clustering, keyposes and paths stay cached.
session.set_camera(CameraSpec(position=(0.0, 2.0, 8.0), orientation=(1.0, 0.0, 0.0, 0.0)))
session.recompute()
print(f"after a camera move:           {session.recompute_counts}")

# Adding scenery only re-runs the collision pass.
session.add_object(
    SceneObject(
        object_id="floor",
        kind="cube",
        position=(0.0, -0.5, 0.0),
        rotation=(1.0, 0.0, 0.0, 0.0),
        scale=(20.0, 1.0, 20.0),
    )
)
session.recompute()
print(f"after adding a floor object:   {session.recompute_counts}")

# The whole session - set, timeline, scene, lens, cached results -
# serialises to one JSON-ready document and comes back identical.
document = session.to_document()
restored = Session.from_document(document)
assert restored.timeline.current_frame == session.timeline.current_frame
assert [c.name for c in restored.animation_set.clips] == ["take1", "take2"]
print(f"\ndocument round trip ok (version {document['version']}, "
      f"{len(document['clips'])} clips)")
