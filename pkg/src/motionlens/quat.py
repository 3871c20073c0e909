"""Quaternion helpers in (w, x, y, z) order.

All functions broadcast over leading axes, so a (T, J, 4) array of
rotations works the same as a single quaternion. Rotations are assumed
unit-norm unless a function says otherwise.
"""

import numpy as np

AXES = {"X": 0, "Y": 1, "Z": 2}

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def normalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def multiply(a, b):
    """Hamilton product a*b (apply b first, then a, for vector rotation)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def conjugate(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def rotate(q, v):
    """Rotate vector(s) v by quaternion(s) q."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    qv = q[..., 1:]
    qw = q[..., 0:1]
    # v' = v + 2*qw*(qv x v) + 2*(qv x (qv x v))
    t = 2.0 * np.cross(qv, v)
    return v + qw * t + np.cross(qv, t)


def from_axis_angle(axis, angle):
    """Quaternion for a rotation of `angle` radians about unit `axis`.

    `angle` may be an array; the result broadcasts accordingly.
    """
    axis = np.asarray(axis, dtype=float)
    angle = np.asarray(angle, dtype=float)
    half = angle / 2.0
    s = np.sin(half)
    w = np.cos(half)
    xyz = axis * s[..., None]
    return np.concatenate([w[..., None], xyz], axis=-1)


def about_axis(axis_name, angle):
    """Rotation about one of the named world axes ("X", "Y" or "Z")."""
    axis = np.zeros(3)
    axis[AXES[axis_name]] = 1.0
    return from_axis_angle(axis, angle)


def from_euler_degrees(order, angles):
    """Compose intrinsic rotations in the given order, e.g. ("Z","X","Y").

    `angles` has the rotations in the same order, degrees, with any number
    of leading batch axes.
    """
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    q = None
    for k, axis_name in enumerate(order):
        qk = about_axis(axis_name, np.radians(angles[..., k]))
        q = qk if q is None else multiply(q, qk)
    if q is None:
        q = np.broadcast_to(IDENTITY, angles.shape[:-1] + (4,)).copy()
    return q


def slerp(q0, q1, t):
    """Spherical interpolation from q0 to q1 at parameter t in [0, 1].

    Broadcasts over leading axes; t may be a scalar or an array of the
    leading shape. Takes the shorter arc.
    """
    q0 = np.asarray(q0, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    t = np.asarray(t, dtype=float)[..., None]
    dot = np.sum(q0 * q1, axis=-1, keepdims=True)
    q1 = np.where(dot < 0.0, -q1, q1)
    dot = np.abs(dot)
    theta = np.arccos(np.clip(dot, -1.0, 1.0))
    s = np.sin(theta)
    near = dot > 1.0 - 1e-10
    # nlerp where the arc is too short for a stable sin ratio
    w0 = np.where(near, 1.0 - t, np.sin((1.0 - t) * theta) / np.where(near, 1.0, s))
    w1 = np.where(near, t, np.sin(t * theta) / np.where(near, 1.0, s))
    return normalize(w0 * q0 + w1 * q1)
