import numpy as np
from scipy.spatial.transform import Rotation

from motionlens import quat

RNG = np.random.default_rng(42)


def _random_unit(n):
    q = RNG.normal(size=(n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def _to_scipy(q):
    # scipy stores xyzw
    return Rotation.from_quat(np.roll(np.atleast_2d(q), -1, axis=-1))


def test_multiply_matches_scipy():
    a = _random_unit(50)
    b = _random_unit(50)
    ours = quat.multiply(a, b)
    theirs = (_to_scipy(a) * _to_scipy(b)).as_quat()
    theirs = np.roll(theirs, 1, axis=-1)
    # same rotation up to sign
    sign = np.sign(np.sum(ours * theirs, axis=-1, keepdims=True))
    assert np.allclose(ours, theirs * sign, atol=1e-12)


def test_rotate_matches_scipy():
    q = _random_unit(50)
    v = RNG.normal(size=(50, 3))
    assert np.allclose(quat.rotate(q, v), _to_scipy(q).apply(v), atol=1e-12)


def test_rotate_broadcasts_over_joints():
    q = _random_unit(4)[:, None, :]  # (4, 1, 4)
    v = RNG.normal(size=(4, 6, 3))
    out = quat.rotate(q, v)
    assert out.shape == (4, 6, 3)
    for t in range(4):
        assert np.allclose(out[t], _to_scipy(q[t, 0]).apply(v[t]), atol=1e-12)


def test_conjugate_inverts():
    q = _random_unit(20)
    v = RNG.normal(size=(20, 3))
    assert np.allclose(quat.rotate(quat.conjugate(q), quat.rotate(q, v)), v, atol=1e-12)


def test_from_euler_degrees_intrinsic_order():
    angles = RNG.uniform(-180.0, 180.0, size=(30, 3))
    for order in (("Z", "X", "Y"), ("X", "Y", "Z"), ("Y", "Z", "X")):
        ours = quat.from_euler_degrees(order, angles)
        theirs = Rotation.from_euler("".join(order), angles, degrees=True).as_quat()
        theirs = np.roll(theirs, 1, axis=-1)
        sign = np.sign(np.sum(ours * theirs, axis=-1, keepdims=True))
        assert np.allclose(ours, theirs * sign, atol=1e-12)


def test_from_euler_degrees_partial_channels():
    # joints often declare fewer than 3 rotation channels
    ours = quat.from_euler_degrees(("Y",), np.array([[90.0]]))[0]
    assert np.allclose(quat.rotate(ours, [0.0, 0.0, 1.0]), [1.0, 0.0, 0.0], atol=1e-12)


def test_about_axis():
    v = quat.rotate(quat.about_axis("Z", np.pi / 2), [1.0, 0.0, 0.0])
    assert np.allclose(v, [0.0, 1.0, 0.0], atol=1e-12)


def test_slerp_endpoints_and_midpoint():
    q0 = quat.about_axis("Y", 0.0)
    q1 = quat.about_axis("Y", np.pi / 2)
    assert np.allclose(quat.slerp(q0, q1, 0.0), q0, atol=1e-12)
    assert np.allclose(quat.slerp(q0, q1, 1.0), q1, atol=1e-12)
    mid = quat.slerp(q0, q1, 0.5)
    assert np.allclose(mid, quat.about_axis("Y", np.pi / 4), atol=1e-12)


def test_slerp_takes_shorter_arc():
    q0 = quat.about_axis("Y", 0.1)
    q1 = -quat.about_axis("Y", 0.3)  # same rotation, opposite sign
    mid = quat.slerp(q0, q1, 0.5)
    expected = quat.about_axis("Y", 0.2)
    sign = np.sign(np.dot(mid, expected))
    assert np.allclose(mid * sign, expected, atol=1e-12)


def test_slerp_batched():
    q0 = _random_unit(10)
    q1 = _random_unit(10)
    out = quat.slerp(q0, q1, 0.25)
    assert out.shape == (10, 4)
    for i in range(10):
        assert np.allclose(out[i], quat.slerp(q0[i], q1[i], 0.25), atol=1e-12)


def test_slerp_identical_quaternions():
    q = _random_unit(5)
    assert np.allclose(quat.slerp(q, q, 0.7), q, atol=1e-12)
