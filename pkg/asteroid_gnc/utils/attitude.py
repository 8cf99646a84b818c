"""
Quaternion helpers.

Quaternions are scalar-first [w, x, y, z] and map body-axis vectors into the reference
frame they are tagged with. Euler angles use the 3-2-1 (yaw-pitch-roll) sequence and are
passed around as [roll, pitch, yaw].
"""

import numpy as np
from scipy.spatial.transform import Rotation

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def quat_multiply(p, q) -> np.ndarray:
    """Hamilton product p (x) q."""
    w1, x1, y1, z1 = p
    w2, x2, y2, z2 = q
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    norm = np.linalg.norm(q)
    if not np.isfinite(norm) or norm == 0.0:
        raise ValueError(f"Cannot normalize quaternion {q.tolist()}")
    return q / norm


def quat_conjugate(q) -> np.ndarray:
    return np.asarray(q, dtype=float) * np.array([1.0, -1.0, -1.0, -1.0])


def quat_rate(q, rate) -> np.ndarray:
    """q_dot = 1/2 q (x) [0, w] for a body-axis rate w."""
    return 0.5 * quat_multiply(q, np.concatenate(([0.0], np.asarray(rate, dtype=float))))


def to_rotation(q) -> Rotation:
    return Rotation.from_quat(np.roll(quat_normalize(q), -1))


def from_rotation(rotation: Rotation) -> np.ndarray:
    q = np.roll(rotation.as_quat(), 1)
    return q if q[0] >= 0 else -q


def rotation_matrix(q) -> np.ndarray:
    return to_rotation(q).as_matrix()


def euler_321_to_quaternion(angles) -> np.ndarray:
    roll, pitch, yaw = np.asarray(angles, dtype=float)
    return from_rotation(Rotation.from_euler("ZYX", [yaw, pitch, roll]))


def quaternion_to_euler_321(q) -> np.ndarray:
    yaw, pitch, roll = to_rotation(q).as_euler("ZYX")
    return np.array([roll, pitch, yaw])


def rotation_error_vector(q, q_target) -> np.ndarray:
    """Axis-angle vector of the rotation taking the target attitude onto q, in body axes."""
    return (to_rotation(q_target).inv() * to_rotation(q)).as_rotvec()
