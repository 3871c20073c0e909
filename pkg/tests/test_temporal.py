import numpy as np
import pytest
from scipy.spatial.distance import cdist

from motionlens import (
    AnimationClip,
    EmptySession,
    ValidationError,
    cluster_poses,
    dba_average,
    dtw,
    quat,
    xmeans,
)

from conftest import make_random_clip, make_set, make_skeleton
from oracles import dtw_cost_enumerated


def exact_pose_clip(skeleton, name, bend_angles):
    """Clip whose pose at frame t is a `bend_angles[t]`-degree elbow bend."""
    frames = len(bend_angles)
    rotations = np.tile(quat.IDENTITY, (frames, skeleton.num_joints, 1))
    rotations[:, 1] = quat.from_euler_degrees(
        ("Z",), np.asarray(bend_angles, dtype=float)[:, None]
    )
    return AnimationClip(
        name=name,
        skeleton=skeleton,
        fps=24.0,
        root_translations=np.zeros((frames, 3)),
        rotations=rotations,
    )


# -- dtw -------------------------------------------------------------------------


def test_dtw_identical_sequences():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 3))
    result = dtw(a, a)
    assert result.cost == 0.0
    assert result.path == tuple((i, i) for i in range(6))


def test_dtw_small_example():
    result = dtw([[0.0], [2.0]], [[0.0], [1.0], [2.0]])
    assert result.cost == pytest.approx(1.0)
    assert result.path == ((0, 0), (0, 1), (1, 2))


def test_dtw_single_frame_fans_out():
    result = dtw([[5.0]], [[1.0], [2.0], [3.0]])
    assert result.path == ((0, 0), (0, 1), (0, 2))
    assert result.cost == pytest.approx(4.0 + 3.0 + 2.0)


def test_dtw_cost_matches_enumeration():
    rng = np.random.default_rng(42)
    for _ in range(40):
        ta, tb = rng.integers(1, 8, size=2)
        a = rng.normal(size=(ta, 2))
        b = rng.normal(size=(tb, 2))
        result = dtw(a, b)
        expected = dtw_cost_enumerated(cdist(a, b))
        assert result.cost == pytest.approx(expected, abs=1e-9)


def test_dtw_path_is_valid_and_prices_out():
    rng = np.random.default_rng(7)
    for _ in range(25):
        a = rng.normal(size=(rng.integers(1, 12), 4))
        b = rng.normal(size=(rng.integers(1, 12), 4))
        result = dtw(a, b)
        assert result.path[0] == (0, 0)
        assert result.path[-1] == (a.shape[0] - 1, b.shape[0] - 1)
        for (i0, j0), (i1, j1) in zip(result.path, result.path[1:]):
            assert (i1 - i0, j1 - j0) in ((1, 0), (0, 1), (1, 1))
        total = sum(np.linalg.norm(a[i] - b[j]) for i, j in result.path)
        assert result.cost == pytest.approx(total, abs=1e-9)


def test_dtw_cost_symmetric():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(9, 2))
    b = rng.normal(size=(5, 2))
    assert dtw(a, b).cost == pytest.approx(dtw(b, a).cost, abs=1e-12)


def test_dtw_rejects_bad_input():
    with pytest.raises(ValidationError):
        dtw(np.empty((0, 3)), np.ones((2, 3)))
    with pytest.raises(ValidationError):
        dtw(np.ones((2, 3)), np.ones((2, 4)))


# -- dba -------------------------------------------------------------------------


def test_dba_identical_inputs_reproduced():
    rng = np.random.default_rng(1)
    seq = rng.normal(size=(12, 5))
    for m in (1, 2, 5):
        average = dba_average([seq.copy() for _ in range(m)], seed=0)
        assert np.allclose(average, seq, atol=1e-9)


def test_dba_constant_sequences_average_to_midpoint():
    a = np.zeros((8, 3))
    b = np.full((8, 3), 2.0)
    average = dba_average([a, b], seed=0)
    assert np.allclose(average, 1.0, atol=1e-9)


def test_dba_costs_never_increase():
    rng = np.random.default_rng(11)
    for _ in range(10):
        m = int(rng.integers(2, 5))
        seqs = [rng.normal(size=(int(rng.integers(4, 15)), 3)) for _ in range(m)]
        _, costs = dba_average(seqs, seed=int(rng.integers(1000)), return_costs=True)
        assert len(costs) >= 1
        for earlier, later in zip(costs, costs[1:]):
            assert later <= earlier + 1e-9


def test_dba_keeps_an_input_length():
    rng = np.random.default_rng(2)
    seqs = [rng.normal(size=(n, 2)) for n in (5, 9, 13)]
    average = dba_average(seqs, seed=4)
    assert average.shape[0] in (5, 9, 13)
    assert average.shape[1] == 2


def test_dba_deterministic():
    rng = np.random.default_rng(5)
    seqs = [rng.normal(size=(8, 3)) for _ in range(3)]
    first = dba_average(seqs, seed=21)
    second = dba_average([s.copy() for s in seqs], seed=21)
    assert first.tobytes() == second.tobytes()


def test_dba_empty_input():
    with pytest.raises(EmptySession):
        dba_average([])


# -- xmeans ----------------------------------------------------------------------


def test_xmeans_two_blobs():
    rng = np.random.default_rng(9)
    sigma = 0.05
    blob_a = rng.normal(0.0, sigma, size=(60, 3))
    blob_b = rng.normal(0.0, sigma, size=(60, 3)) + np.array([5.0, 0.0, 0.0])
    points = np.vstack([blob_a, blob_b])
    centroids = xmeans(points, k_min=1, k_max=16, seed=0)
    assert centroids.shape[0] == 2
    means = np.array([blob_a.mean(axis=0), blob_b.mean(axis=0)])
    d = cdist(centroids, means)
    assert d.min(axis=1).max() < 3 * sigma


def test_xmeans_identical_points_stay_at_k_min():
    points = np.ones((40, 4))
    assert xmeans(points, k_min=1, k_max=8, seed=3).shape[0] == 1
    assert xmeans(points, k_min=3, k_max=8, seed=3).shape[0] == 3


def test_xmeans_k_max_caps_growth():
    rng = np.random.default_rng(13)
    blobs = [rng.normal(0, 0.02, size=(30, 2)) + center
             for center in ([0, 0], [4, 0], [0, 4], [4, 4])]
    centroids = xmeans(np.vstack(blobs), k_min=1, k_max=2, seed=0)
    assert centroids.shape[0] <= 2


def test_xmeans_k_min_equals_k_max():
    rng = np.random.default_rng(17)
    points = rng.normal(size=(50, 2))
    assert xmeans(points, k_min=5, k_max=5, seed=1).shape[0] == 5


def test_xmeans_k_min_clamped_to_point_count():
    points = np.array([[0.0, 0.0], [1.0, 1.0]])
    centroids = xmeans(points, k_min=6, k_max=8, seed=0)
    assert centroids.shape[0] <= 2


def test_xmeans_deterministic():
    rng = np.random.default_rng(23)
    points = rng.normal(size=(80, 3))
    first = xmeans(points, seed=6)
    second = xmeans(points.copy(), seed=6)
    assert first.tobytes() == second.tobytes()


def test_xmeans_rejects_bad_input():
    with pytest.raises(ValidationError):
        xmeans(np.empty((0, 2)))
    with pytest.raises(ValidationError):
        xmeans(np.ones((5, 2)), k_min=0)
    with pytest.raises(ValidationError):
        xmeans(np.ones((5, 2)), k_min=4, k_max=2)


# -- cluster_poses ----------------------------------------------------------------


def test_cluster_poses_two_pose_set():
    skeleton = make_skeleton(3)
    frames = np.arange(30)
    clips = make_set(
        exact_pose_clip(skeleton, "early", np.where(frames < 8, 0.0, 80.0)),
        exact_pose_clip(skeleton, "late", np.where(frames < 20, 0.0, 80.0)),
    )
    clustering = cluster_poses(clips, seed=0)
    assert clustering.n_clusters == 2
    # ids numbered by first appearance: clip 0 opens with cluster 0
    assert clustering.labels[0][0] == 0
    assert list(np.unique(clustering.labels[0][:8])) == [0]
    assert list(np.unique(clustering.labels[0][8:])) == [1]
    # the same physical poses get the same ids in the other clip
    assert list(np.unique(clustering.labels[1][:20])) == [0]
    assert list(np.unique(clustering.labels[1][20:])) == [1]


def test_cluster_poses_segments_tile_each_clip():
    skeleton = make_skeleton(4)
    clips = make_set(
        make_random_clip(skeleton, frames=40, seed=3, name="a"),
        make_random_clip(skeleton, frames=25, seed=4, name="b"),
    )
    clustering = cluster_poses(clips, seed=5)
    for clip, segments, labels in zip(clips.clips, clustering.segments, clustering.labels):
        assert segments[0].start == 0
        assert segments[-1].end == clip.num_frames
        for a, b in zip(segments, segments[1:]):
            assert a.end == b.start
            assert a.cluster_id != b.cluster_id
        for segment in segments:
            assert list(np.unique(labels[segment.start : segment.end])) == [segment.cluster_id]


def test_cluster_poses_byte_deterministic():
    skeleton = make_skeleton(3)
    clips = make_set(
        make_random_clip(skeleton, frames=30, seed=6, name="a"),
        make_random_clip(skeleton, frames=30, seed=7, name="b"),
    )
    first = cluster_poses(clips, seed=9)
    second = cluster_poses(clips, seed=9)
    assert first.n_clusters == second.n_clusters
    assert first.centroids.tobytes() == second.centroids.tobytes()
    assert all(x.tobytes() == y.tobytes() for x, y in zip(first.labels, second.labels))
    flatten = lambda rows: [(s.cluster_id, s.start, s.end) for row in rows for s in row]
    assert flatten(first.segments) == flatten(second.segments)


def test_cluster_poses_invariant_to_rigid_motion():
    skeleton = make_skeleton(3)
    base = make_random_clip(skeleton, frames=24, seed=2, name="base")
    reference = cluster_poses(make_set(base), seed=1)

    rng = np.random.default_rng(8)
    for _ in range(5):
        yaw = quat.about_axis("Y", float(rng.uniform(-np.pi, np.pi)))
        shift = np.array([rng.uniform(-10, 10), 0.0, rng.uniform(-10, 10)])
        moved_roots = quat.rotate(yaw, base.root_translations) + shift
        moved_rotations = base.rotations.copy()
        moved_rotations[:, 0] = quat.multiply(yaw, moved_rotations[:, 0])
        moved = AnimationClip(
            name="base",
            skeleton=skeleton,
            fps=24.0,
            root_translations=moved_roots,
            rotations=moved_rotations,
        )
        transformed = cluster_poses(make_set(moved), seed=1)
        assert transformed.n_clusters == reference.n_clusters
        assert np.array_equal(transformed.labels[0], reference.labels[0])


def test_cluster_poses_median_window_removes_blips():
    skeleton = make_skeleton(3)
    frames = 31
    # pose B appears for a single frame in the middle of a run of pose A
    angles = np.zeros(frames)
    angles[15] = 80.0
    angles[22:] = 80.0
    clip = exact_pose_clip(skeleton, "blip", angles)
    raw = cluster_poses(make_set(clip), seed=0, median_window=1)
    smoothed = cluster_poses(make_set(clip), seed=0, median_window=3)
    assert raw.n_clusters == 2
    assert any(s.end - s.start == 1 for s in raw.segments[0])
    assert all(s.end - s.start > 1 for s in smoothed.segments[0])


def test_cluster_poses_rejects_even_window():
    clips = make_set(make_random_clip(make_skeleton(2), frames=10))
    with pytest.raises(ValidationError):
        cluster_poses(clips, median_window=4)
