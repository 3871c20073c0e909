import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from motionlens import (
    AnimationClip,
    CameraSpec,
    FrameOutOfRange,
    NotFound,
    ValidationError,
    diff_frames,
    joint_curves,
    project,
    quat,
)

from conftest import make_constant_clip, make_random_clip, make_set, make_skeleton


def camera_at(position=(0.0, 0.0, 0.0), orientation=(1.0, 0.0, 0.0, 0.0), **kw):
    return CameraSpec(
        position=np.asarray(position, dtype=float),
        orientation=np.asarray(orientation, dtype=float),
        **kw,
    )


# -- project ---------------------------------------------------------------------


def test_project_on_axis_point():
    sample = project(camera_at(), (0.0, 0.0, -5.0))
    assert tuple(sample.ndc) == (0.0, 0.0)
    assert sample.depth == pytest.approx(5.0)
    assert sample.in_view


def test_project_frustum_edges():
    camera = camera_at()
    d = 3.0
    half = np.tan(camera.vertical_fov / 2.0)
    top = project(camera, (0.0, half * d, -d))
    assert top.ndc[1] == pytest.approx(1.0, abs=1e-9)
    assert top.in_view
    right = project(camera, (camera.aspect * half * d, 0.0, -d))
    assert right.ndc[0] == pytest.approx(1.0, abs=1e-9)
    just_out = project(camera, (0.0, half * d * 1.001, -d))
    assert not just_out.in_view


def test_project_behind_camera():
    sample = project(camera_at(), (0.0, 0.0, 4.0))
    assert not sample.in_view
    assert sample.depth == pytest.approx(-4.0)


def test_project_near_plane_boundary():
    camera = camera_at(near=0.5)
    assert project(camera, (0.0, 0.0, -0.5)).in_view
    assert not project(camera, (0.0, 0.0, -0.49)).in_view


def test_project_distance_doubling_halves_ndc():
    camera = camera_at()
    rng = np.random.default_rng(4)
    for _ in range(100):
        x, y = rng.uniform(-2, 2, 2)
        z = -rng.uniform(1.0, 20.0)
        near_sample = project(camera, (x, y, z))
        far_sample = project(camera, (x, y, 2 * z))
        assert far_sample.ndc[0] == pytest.approx(near_sample.ndc[0] / 2, abs=1e-9)
        assert far_sample.ndc[1] == pytest.approx(near_sample.ndc[1] / 2, abs=1e-9)


def test_project_matches_scipy_transform():
    axis = np.array([0.3, 1.0, -0.2])
    orientation = quat.from_axis_angle(axis / np.linalg.norm(axis), 1.1)
    position = np.array([2.0, -1.0, 4.0])
    camera = camera_at(position, orientation)
    rng = np.random.default_rng(9)
    rot = Rotation.from_quat(np.roll(orientation, -1))
    half = np.tan(camera.vertical_fov / 2.0)
    for _ in range(50):
        point = rng.uniform(-10, 10, 3)
        cam_space = rot.inv().apply(point - position)
        depth = -cam_space[2]
        if abs(depth) < 1e-6:
            continue
        sample = project(camera, point)
        assert sample.depth == pytest.approx(depth, abs=1e-9)
        assert sample.ndc[0] == pytest.approx(
            cam_space[0] / depth / (camera.aspect * half), abs=1e-9
        )
        assert sample.ndc[1] == pytest.approx(cam_space[1] / depth / half, abs=1e-9)


def test_project_zero_depth_sentinel():
    sample = project(camera_at(), (1.0, -2.0, 0.0))
    assert not sample.in_view
    assert np.isfinite(sample.ndc).all()
    assert sample.ndc[0] > 1e5
    assert sample.ndc[1] < -1e5
    on_axis = project(camera_at(), (0.0, 0.0, 0.0))
    assert tuple(on_axis.ndc) == (0.0, 0.0)
    assert not on_axis.in_view


def test_camera_spec_validation():
    with pytest.raises(ValidationError):
        camera_at(vertical_fov=0.0)
    with pytest.raises(ValidationError):
        camera_at(vertical_fov=np.pi)
    with pytest.raises(ValidationError):
        camera_at(aspect=0.0)
    with pytest.raises(ValidationError):
        camera_at(near=0.0)
    with pytest.raises(ValidationError):
        camera_at(orientation=(2.0, 0.0, 0.0, 0.0))


# -- joint curves ----------------------------------------------------------------


def test_joint_curves_degenerate_range_centers():
    skeleton = make_skeleton(2)
    clips = make_set(
        make_constant_clip(skeleton, frames=6, name="a", root=(0.0, 0.0, 0.0)),
        make_constant_clip(skeleton, frames=4, name="b", root=(0.0, 0.0, 0.0)),
    )
    camera = camera_at((0.0, 0.0, 5.0))
    curves = joint_curves(clips, camera, 0)
    for clip_curve in curves.clips:
        assert np.all(clip_curve.bar_x == 0.5)
        assert np.all(clip_curve.bar_y == 0.5)
        assert not clip_curve.out_of_view.any()


def test_joint_curves_normalization_hits_zero_and_one():
    skeleton = make_skeleton(3)
    clips = make_set(
        make_random_clip(skeleton, frames=30, seed=1, name="a", drift=0.3),
        make_random_clip(skeleton, frames=24, seed=2, name="b", drift=0.3),
    )
    camera = camera_at((0.0, 1.0, 8.0))
    curves = joint_curves(clips, camera, 2)
    all_x = np.concatenate([c.bar_x for c in curves.clips])
    all_y = np.concatenate([c.bar_y for c in curves.clips])
    assert all_x.min() == pytest.approx(0.0, abs=1e-12)
    assert all_x.max() == pytest.approx(1.0, abs=1e-12)
    assert all_y.min() == pytest.approx(0.0, abs=1e-12)
    assert all_y.max() == pytest.approx(1.0, abs=1e-12)
    assert np.all((all_x >= 0.0) & (all_x <= 1.0))
    assert np.all((all_y >= 0.0) & (all_y <= 1.0))


def test_joint_curves_normalization_bounds_are_global():
    skeleton = make_skeleton(2)
    low = make_constant_clip(skeleton, frames=5, name="low", root=(0.0, -1.0, 0.0))
    high = make_constant_clip(skeleton, frames=5, name="high", root=(0.0, 3.0, 0.0))
    camera = camera_at((0.0, 1.0, 10.0))
    curves = joint_curves(make_set(low, high), camera, 0)
    assert curves.min_y < curves.max_y
    assert np.all(curves.clips[0].bar_y == 0.0)
    assert np.all(curves.clips[1].bar_y == 1.0)


def test_joint_curves_out_of_view_run():
    skeleton = make_skeleton(2)
    frames = 20
    roots = np.zeros((frames, 3))
    roots[:, 0] = np.linspace(0.0, 40.0, frames)  # walks off to the right
    rotations = np.broadcast_to(quat.IDENTITY, (frames, 2, 4)).copy()
    walker = AnimationClip(
        name="walker", skeleton=skeleton, fps=24.0, root_translations=roots, rotations=rotations
    )
    camera = camera_at((0.0, 0.0, 10.0))
    curves = joint_curves(make_set(walker), camera, 0)
    flags = curves.clips[0].out_of_view
    assert not flags[0]
    assert flags[-1]
    switched = np.flatnonzero(np.diff(flags.astype(int)))
    assert len(switched) == 1  # one contiguous out-of-view run at the end
    # clamped while the source ndc keeps growing
    assert curves.clips[0].bar_x[-1] == 1.0


def test_joint_curves_frames_cover_clip():
    skeleton = make_skeleton(2)
    clips = make_set(
        make_random_clip(skeleton, frames=9, seed=3, name="a"),
        make_random_clip(skeleton, frames=13, seed=4, name="b"),
    )
    curves = joint_curves(clips, camera_at((0, 0, 6)), 1)
    assert [len(c.frames) for c in curves.clips] == [9, 13]
    assert list(curves.clips[1].frames) == list(range(13))


def test_joint_curves_invalid_joint():
    clips = make_set(make_random_clip(make_skeleton(2), frames=5))
    with pytest.raises(ValidationError):
        joint_curves(clips, camera_at(), 9)


# -- diff ------------------------------------------------------------------------


def test_diff_identical_clips():
    skeleton = make_skeleton(3)
    a = make_random_clip(skeleton, frames=10, seed=1, name="a")
    b = AnimationClip(
        name="b",
        skeleton=skeleton,
        fps=a.fps,
        root_translations=a.root_translations.copy(),
        rotations=a.rotations.copy(),
    )
    diff = diff_frames(make_set(a, b), "a", "b", {}, 4)
    assert np.allclose(diff.distances, 0.0)


def test_diff_translated_copy():
    skeleton = make_skeleton(3)
    a = make_random_clip(skeleton, frames=10, seed=2, name="a")
    b = AnimationClip(
        name="b",
        skeleton=skeleton,
        fps=a.fps,
        root_translations=a.root_translations + np.array([1.0, 0.0, 0.0]),
        rotations=a.rotations.copy(),
    )
    diff = diff_frames(make_set(a, b), "a", "b", {}, 7)
    assert np.allclose(diff.distances, 1.0)
    assert np.allclose(diff.positions_b - diff.positions_a, [1.0, 0.0, 0.0])


def test_diff_offsets_shift_local_frames():
    skeleton = make_skeleton(2)
    a = make_constant_clip(skeleton, frames=10, name="a")
    b = make_constant_clip(skeleton, frames=10, name="b")
    diff = diff_frames(make_set(a, b), "a", "b", {"b": 5}, 7)
    assert diff.frame == 7
    assert np.allclose(diff.distances, 0.0)


def test_diff_symmetric():
    skeleton = make_skeleton(3)
    clips = make_set(
        make_random_clip(skeleton, frames=8, seed=5, name="a"),
        make_random_clip(skeleton, frames=8, seed=6, name="b"),
    )
    forward = diff_frames(clips, "a", "b", {}, 3)
    backward = diff_frames(clips, "b", "a", {}, 3)
    assert np.allclose(forward.distances, backward.distances)


def test_diff_errors():
    skeleton = make_skeleton(2)
    clips = make_set(
        make_random_clip(skeleton, frames=10, seed=1, name="a"),
        make_random_clip(skeleton, frames=5, seed=2, name="b"),
    )
    with pytest.raises(ValidationError):
        diff_frames(clips, "a", "a", {}, 0)
    with pytest.raises(NotFound):
        diff_frames(clips, "a", "ghost", {}, 0)
    with pytest.raises(FrameOutOfRange, match="b"):
        diff_frames(clips, "a", "b", {}, 7)
    with pytest.raises(FrameOutOfRange):
        diff_frames(clips, "a", "b", {"b": 3}, 0)
