"""Quaternion and small-vector helpers.

Quaternions are scalar-first (w, x, y, z) numpy arrays. Angular velocity is
expressed in the body frame throughout.
"""

import math

import numpy as np

Z_AXIS = np.array([0.0, 0.0, 1.0])


def vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    return v


def quat_normalize(q: np.ndarray) -> np.ndarray:
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    return q / n


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a ⊗ b."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrix mapping body-frame vectors to the world frame."""
    w, x, y, z = q
    xx, yy, zz = x * x, y * y, z * z
    xy, xz, yz = x * y, x * z, y * z
    wx, wy, wz = w * x, w * y, w * z
    return np.array(
        [
            [1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy)],
            [2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx)],
            [2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy)],
        ]
    )


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    return quat_to_matrix(q) @ v


def quat_derivative(q: np.ndarray, omega_body: np.ndarray) -> np.ndarray:
    """Kinematic rate 0.5 * q ⊗ (0, ω) for body-frame rates."""
    ow = np.array([0.0, omega_body[0], omega_body[1], omega_body[2]])
    return 0.5 * quat_multiply(q, ow)


def quat_integrate(q: np.ndarray, omega_body: np.ndarray, dt: float) -> np.ndarray:
    """One explicit step of the quaternion kinematics, renormalized."""
    return quat_normalize(q + quat_derivative(q, omega_body) * dt)


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    a = vec3(axis)
    n = np.linalg.norm(a)
    if n == 0.0:
        return np.array([1.0, 0.0, 0.0, 0.0])
    a = a / n
    h = 0.5 * angle
    s = math.sin(h)
    return np.array([math.cos(h), a[0] * s, a[1] * s, a[2] * s])


def clamp_norm(v: np.ndarray, limit: float) -> np.ndarray:
    """Scale v so its euclidean norm does not exceed limit."""
    n = np.linalg.norm(v)
    if n <= limit or n == 0.0:
        return v
    return v * (limit / n)


def unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / n
