"""End-to-end checks of the package's headline guarantees.

One test per guarantee, each against an independent oracle or an
analytically known answer, so `pytest -v tests/test_acceptance.py`
reads as a checklist.
"""

import time

import numpy as np
import pytest
from fastapi.testclient import TestClient
from scipy.spatial.distance import cdist

from conftest import make_constant_clip, make_random_clip, make_set, make_skeleton
from oracles import dtw_cost_all_paths, path_collision_frames_sampled, to_local_frame
from motionlens import (
    AnimationClip,
    CameraSpec,
    JointPath,
    SceneObject,
    clip_features,
    cluster_poses,
    dba_average,
    dtw,
    emit_clip_json,
    extract_keyposes,
    forward_kinematics,
    joint_curves,
    parse_bvh,
    parse_clip_json,
    path_collisions,
    project,
    quat,
    reconstruction_error,
    xmeans,
)
from motionlens.config import DEFAULT_FPS, DEFAULT_KEYPOSE_K, DEFAULT_TRACE_N
from motionlens.server import ServerSettings, create_app

TWO_JOINT_BVH = """HIERARCHY
ROOT Hips
{
    OFFSET 0.0 0.0 0.0
    CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
    JOINT Spine
    {
        OFFSET 0.0 1.0 0.0
        CHANNELS 3 Zrotation Xrotation Yrotation
        End Site
        {
            OFFSET 0.0 0.5 0.0
        }
    }
}
MOTION
Frames: 1
Frame Time: 0.041667
0 0 0 90 0 0 0 0 0
"""


def upload_payload(files):
    return [("files", (name, text.encode(), "application/json")) for name, text in files]


def test_dtw_cost_matches_exhaustive_path_enumeration():
    # 200 random short pairs: the DP cost must equal a brute-force
    # minimum over every monotone path, bit for bit, in under 10 s.
    rng = np.random.default_rng(0)
    start = time.perf_counter()
    for _ in range(200):
        ta = int(rng.integers(2, 8))
        tb = int(rng.integers(2, 8))
        dim = int(rng.integers(1, 4))
        a = rng.normal(size=(ta, dim))
        b = rng.normal(size=(tb, dim))
        assert dtw(a, b).cost == dtw_cost_all_paths(cdist(a, b))
    assert time.perf_counter() - start < 10.0


def test_dba_average_properties():
    # (a) the summed alignment cost never increases between iterations
    rng = np.random.default_rng(1)
    for _ in range(50):
        seqs = [
            rng.normal(size=(int(rng.integers(4, 12)), 5))
            for _ in range(int(rng.integers(2, 5)))
        ]
        _, costs = dba_average(seqs, seed=int(rng.integers(1000)), return_costs=True)
        for earlier, later in zip(costs, costs[1:]):
            assert later <= earlier + 1e-9

    # (b) averaging m identical sequences returns that sequence
    features = clip_features(make_random_clip(make_skeleton(3), frames=10, seed=3))
    for m in (1, 2, 5):
        average = dba_average([features] * m, seed=0)
        assert np.max(np.abs(average - features)) <= 1e-9

    # (c) two equal-length constant sequences average to the midpoint
    average = dba_average([np.zeros((6, 4)), np.full((6, 4), 2.0)], seed=0)
    assert np.max(np.abs(average - 1.0)) <= 1e-9


def test_clustering_rigid_invariance_and_determinism():
    skeleton = make_skeleton(3)
    base = make_random_clip(skeleton, frames=24, seed=2, name="base")
    reference = cluster_poses(make_set(base), seed=1)

    # yaw + ground-plane shift of the whole clip must not change labels
    rng = np.random.default_rng(8)
    for _ in range(20):
        yaw = quat.about_axis("Y", float(rng.uniform(-np.pi, np.pi)))
        shift = np.array([rng.uniform(-10, 10), 0.0, rng.uniform(-10, 10)])
        moved_rotations = base.rotations.copy()
        moved_rotations[:, 0] = quat.multiply(yaw, moved_rotations[:, 0])
        moved = AnimationClip(
            name="base",
            skeleton=skeleton,
            fps=24.0,
            root_translations=quat.rotate(yaw, base.root_translations) + shift,
            rotations=moved_rotations,
        )
        transformed = cluster_poses(make_set(moved), seed=1)
        assert transformed.n_clusters == reference.n_clusters
        assert np.array_equal(transformed.labels[0], reference.labels[0])

    # same seed, same input -> byte-identical clustering
    clips = [make_random_clip(skeleton, frames=18, seed=i, name=f"c{i}") for i in range(3)]
    aset = make_set(*clips)
    first = cluster_poses(aset, seed=4)
    second = cluster_poses(aset, seed=4)
    assert first.n_clusters == second.n_clusters
    assert first.seed == second.seed
    assert first.centroids.tobytes() == second.centroids.tobytes()
    assert all(x.tobytes() == y.tobytes() for x, y in zip(first.labels, second.labels))
    flatten = lambda rows: [(s.cluster_id, s.start, s.end) for row in rows for s in row]
    assert flatten(first.segments) == flatten(second.segments)

    # segments tile [0, T) in every fixture used here
    for clustering, clip_list in ((reference, [base]), (first, clips)):
        for clip, segments in zip(clip_list, clustering.segments):
            assert segments[0].start == 0
            assert segments[-1].end == clip.num_frames
            for before, after in zip(segments, segments[1:]):
                assert before.end == after.start


def test_xmeans_blob_recovery_and_identical_points():
    rng = np.random.default_rng(5)
    sigma = 0.05
    centers = np.array([[0.0, 0.0, 0.0], [1.5, 0.0, 0.0]])  # 30x sigma apart
    blobs = [c + rng.normal(0.0, sigma, (60, 3)) for c in centers]
    centroids = xmeans(np.vstack(blobs), k_min=1, k_max=8, seed=0)
    assert centroids.shape[0] == 2
    blob_means = np.array([b.mean(axis=0) for b in blobs])
    distances = cdist(blob_means, centroids)
    assert distances.min(axis=1).max() <= 3 * sigma
    assert set(distances.argmin(axis=1)) == {0, 1}  # one centroid per blob

    same = np.tile([2.0, -1.0, 0.5], (40, 1))
    for k_min in (1, 3):
        assert xmeans(same, k_min=k_min, k_max=9, seed=0).shape[0] == k_min


def test_projection_geometry():
    camera = CameraSpec(position=(0.0, 0.0, 0.0), orientation=(1.0, 0.0, 0.0, 0.0))

    on_axis = project(camera, (0.0, 0.0, -5.0))
    assert tuple(on_axis.ndc) == (0.0, 0.0)

    half = camera.vertical_fov / 2.0
    top = project(camera, (0.0, np.tan(half) * 4.0, -4.0))
    assert abs(abs(top.ndc[1]) - 1.0) <= 1e-9
    right = project(camera, (np.tan(half) * camera.aspect * 4.0, 0.0, -4.0))
    assert abs(abs(right.ndc[0]) - 1.0) <= 1e-9

    rng = np.random.default_rng(6)
    for _ in range(100):
        x, y = rng.uniform(-3.0, 3.0, size=2)
        depth = rng.uniform(1.0, 50.0)
        close = project(camera, (x, y, -depth))
        far = project(camera, (x, y, -2.0 * depth))
        assert np.all(np.abs(2.0 * far.ndc - close.ndc) <= 1e-9)


def test_joint_curve_normalization():
    skeleton = make_skeleton(3)
    camera = CameraSpec(position=(0.0, 1.0, 25.0), orientation=(1.0, 0.0, 0.0, 0.0))

    clips = [
        make_random_clip(skeleton, frames=14, seed=i, name=f"c{i}", drift=0.1)
        for i in range(3)
    ]
    curves = joint_curves(make_set(*clips), camera, 1)
    assert not any(np.any(c.out_of_view) for c in curves.clips)  # nothing clamped
    xs = np.concatenate([c.bar_x for c in curves.clips])
    ys = np.concatenate([c.bar_y for c in curves.clips])
    for values in (xs, ys):
        assert abs(values.min()) <= 1e-12
        assert abs(values.max() - 1.0) <= 1e-12

    # a motionless fixture has no range to normalize: everything sits mid-bar
    still = [make_constant_clip(skeleton, frames=8, name=f"s{i}") for i in range(2)]
    flat = joint_curves(make_set(*still), camera, 1)
    for c in flat.clips:
        assert np.all(c.bar_x == 0.5)
        assert np.all(c.bar_y == 0.5)


def test_keypose_selection_properties():
    skeleton = make_skeleton(3)
    rng = np.random.default_rng(7)
    for case in range(20):
        frames = int(rng.integers(3, 40))
        clip = make_random_clip(skeleton, frames=frames, seed=100 + case)
        k = int(rng.integers(2, 18))
        keyposes = extract_keyposes(clip, k)
        assert len(keyposes.frames) == min(k, frames)
        assert keyposes.frames[0] == 0
        assert keyposes.frames[-1] == frames - 1
        assert all(a < b for a, b in zip(keyposes.frames, keyposes.frames[1:]))

        errors = [
            reconstruction_error(clip, extract_keyposes(clip, kk).frames)
            for kk in range(2, min(frames, 14))
        ]
        for earlier, later in zip(errors, errors[1:]):
            assert later <= earlier + 1e-12

    still = make_constant_clip(skeleton, frames=100, name="still")
    assert extract_keyposes(still, 15).frames == tuple(range(14)) + (99,)


def _frame_sets_agree(impl, oracle):
    """Equal up to one frame of slack at interval boundaries."""
    for f in impl - oracle:
        if not any(abs(f - g) <= 1 for g in oracle):
            return False
    for f in oracle - impl:
        if not any(abs(f - g) <= 1 for g in impl):
            return False
    return True


def test_collision_intervals_match_sampled_oracle():
    # 100 random path/primitive pairings vs. dense point sampling
    for kind in ("cube", "sphere", "plane", "cylinder", "cone"):
        rng = np.random.default_rng(9 + sum(ord(c) for c in kind))
        for case in range(20):
            q = rng.normal(size=4)
            q /= np.linalg.norm(q)
            obj = SceneObject(
                object_id="obj",
                kind=kind,
                position=rng.uniform(-0.5, 0.5, 3),
                rotation=q,
                scale=rng.uniform(0.4, 2.0, 3),
            )
            walk = np.cumsum(rng.normal(0.0, 0.6, (12, 3)), axis=0)
            walk -= walk.mean(axis=0)
            events = path_collisions(JointPath(clip_id="p", joint=0, points=walk), [obj])
            impl = set()
            for event in events:
                for start, end in event.frame_intervals:
                    impl.update(range(start, end))
            local = to_local_frame(walk, obj.position, obj.rotation, obj.scale)
            oracle = path_collision_frames_sampled(kind, local)
            assert _frame_sets_agree(impl, oracle), (kind, case, impl, oracle)


def test_bvh_fk_golden_and_json_round_trip():
    skeleton, clip = parse_bvh(TWO_JOINT_BVH)
    pose = forward_kinematics(skeleton, clip.root_translations[0], clip.rotations[0])
    assert np.allclose(pose.positions[1], [-1.0, 0.0, 0.0], atol=1e-6)

    rng = np.random.default_rng(10)
    for case in range(100):
        joints = int(rng.integers(2, 6))
        frames = int(rng.integers(2, 30))
        clip = make_random_clip(make_skeleton(joints), frames=frames, seed=200 + case)
        back_skeleton, back = parse_clip_json(emit_clip_json(clip), name=clip.name)
        assert back_skeleton.names == clip.skeleton.names
        assert back_skeleton.parents == clip.skeleton.parents
        assert np.array_equal(back_skeleton.offsets, clip.skeleton.offsets)
        assert back.fps == clip.fps
        assert np.array_equal(back.root_translations, clip.root_translations)
        assert np.array_equal(back.rotations, clip.rotations)


def test_default_constants_and_diff_arity():
    assert DEFAULT_TRACE_N == 10
    assert DEFAULT_KEYPOSE_K == 15
    assert DEFAULT_FPS == 24

    skeleton = make_skeleton(3)
    files = [
        (f"c{i}.json", emit_clip_json(make_random_clip(skeleton, frames=8, seed=i, name=f"c{i}")))
        for i in range(3)
    ]
    client = TestClient(create_app(ServerSettings()), raise_server_exceptions=False)
    sid = client.post("/sessions", files=upload_payload(files)).json()["session_id"]

    # three selected clips: the two-way comparison lens is refused
    assert client.put(f"/sessions/{sid}/lens", json={"camera_lens": "diff"}).status_code == 400

    # one selected clip: refused as well
    client.put(
        f"/sessions/{sid}/timeline",
        json={"rows": [{"selected": True}, {"selected": False}, {"selected": False}]},
    )
    assert client.put(f"/sessions/{sid}/lens", json={"camera_lens": "diff"}).status_code == 400

    # exactly two: accepted
    client.put(
        f"/sessions/{sid}/timeline",
        json={"rows": [{"selected": True}, {"selected": True}, {"selected": False}]},
    )
    assert client.put(f"/sessions/{sid}/lens", json={"camera_lens": "diff"}).status_code == 200

    # and the pairwise read refuses comparing a clip with itself
    assert client.get(f"/sessions/{sid}/diff", params={"a": "c0", "b": "c0"}).status_code == 400


def test_api_analysis_is_deterministic():
    skeleton = make_skeleton(3)
    files = [
        (f"c{i}.json", emit_clip_json(make_random_clip(skeleton, frames=10, seed=i, name=f"c{i}")))
        for i in range(4)
    ]
    captured = []
    for _ in range(2):
        client = TestClient(create_app(ServerSettings()), raise_server_exceptions=False)
        sid = client.post(
            "/sessions", params={"seed": 5}, files=upload_payload(files)
        ).json()["session_id"]
        captured.append(
            (
                client.get(f"/sessions/{sid}/pose-clusters").content,
                client.get(f"/sessions/{sid}/joint-curves").content,
            )
        )
    assert captured[0] == captured[1]
