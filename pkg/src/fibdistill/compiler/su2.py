"""Helpers for the projective unitary group of a qubit, PU(2) = SU(2)/{+-1}.

Elements are handled as 2x2 special-unitary matrices; a unit quaternion
``(w, x, y, z)`` stands for ``w I - i (x X + y Y + z Z)``.
"""

from __future__ import annotations

import math

import numpy as np

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128)


def to_su2(u: np.ndarray) -> np.ndarray:
    """Rescale a 2x2 unitary to determinant one, sign fixed so the trace has Re >= 0."""
    u = np.asarray(u, dtype=np.complex128)
    s = u / np.sqrt(np.linalg.det(u))
    return -s if np.trace(s).real < 0 else s


def quaternions(mats: np.ndarray) -> np.ndarray:
    """Unit quaternions of a stack of SU(2) matrices, shape ``(..., 4)``."""
    m = np.asarray(mats)
    w = (m[..., 0, 0] + m[..., 1, 1]).real / 2
    z = (m[..., 1, 1] - m[..., 0, 0]).imag / 2
    y = (m[..., 1, 0] - m[..., 0, 1]).real / 2
    x = -(m[..., 0, 1] + m[..., 1, 0]).imag / 2
    return np.stack([w, x, y, z], axis=-1)


def from_quaternions(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    w, x, y, z = np.moveaxis(q, -1, 0)
    out = np.empty(q.shape[:-1] + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = w - 1j * z
    out[..., 0, 1] = -y - 1j * x
    out[..., 1, 0] = y - 1j * x
    out[..., 1, 1] = w + 1j * z
    return out


def canonical(q: np.ndarray) -> np.ndarray:
    """Pick the representative of ``+-q`` with ``w >= 0``."""
    q = np.array(q, dtype=np.float64)
    flip = q[..., 0] < 0
    q[flip] *= -1
    return q


def rotation_vectors(q: np.ndarray) -> np.ndarray:
    """SO(3) rotation vectors (angle times axis) of canonical quaternions."""
    q = canonical(q)
    s = np.linalg.norm(q[..., 1:], axis=-1)
    half = np.arctan2(s, q[..., 0])
    scale = np.where(s > 1e-12, 2 * half / np.where(s > 1e-12, s, 1.0), 2.0)
    return q[..., 1:] * scale[..., None]


def quaternion_distance(q: np.ndarray, r: np.ndarray) -> np.ndarray | float:
    """Projective operator-norm distance between unit quaternions (rows of) ``q`` and ``r``.

    The angle ``a`` between ``q`` and the nearer of ``+-r`` is half the eigenphase
    spread of ``U^+ V``; the optimal phase leaves ``|1 - e^{ia}| = 2 sin(a / 2)``.
    ``a`` comes from ``atan2`` of the chord lengths, which stays accurate near 0.
    """
    q = np.asarray(q, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    sign = np.where(np.sum(q * r, axis=-1) < 0, -1.0, 1.0)[..., None]
    r = r * sign
    a = 2 * np.arctan2(np.linalg.norm(q - r, axis=-1), np.linalg.norm(q + r, axis=-1))
    return 2 * np.sin(a / 2)


def distance(u: np.ndarray, v: np.ndarray) -> float:
    return float(quaternion_distance(quaternions(to_su2(u)), quaternions(to_su2(v))))


def axis_angle(u: np.ndarray) -> tuple[np.ndarray, float]:
    """Rotation axis and SO(3) angle in ``[0, pi]`` of ``u``."""
    q = canonical(quaternions(to_su2(u)))
    s = float(np.linalg.norm(q[1:]))
    if s < 1e-15:
        return np.array([0.0, 0.0, 1.0]), 0.0
    return q[1:] / s, 2 * math.atan2(s, q[0])


def rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    return from_quaternions(np.concatenate([[math.cos(angle / 2)], math.sin(angle / 2) * axis]))


def _align(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """SU(2) element rotating unit vector ``src`` onto ``dst``."""
    c = float(np.clip(np.dot(src, dst), -1.0, 1.0))
    cross = np.cross(src, dst)
    if np.linalg.norm(cross) < 1e-12:
        if c > 0:
            return np.eye(2, dtype=np.complex128)
        # antiparallel: turn by pi about the first basis axis orthogonal to src
        k = int(np.argmin(np.abs(src)))
        perp = np.cross(src, np.eye(3)[k])
        return rotation(perp, math.pi)
    return rotation(cross, math.acos(c))


def balanced_commutator(delta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``V, W`` with ``V W V^+ W^+ = delta`` (projectively), both of equal small angle.

    ``V`` and ``W`` rotate by ``phi`` about orthogonal axes; their commutator
    rotates by ``theta`` where ``sin(theta/2) = 2 sin^2(phi/2) sqrt(1 - sin^4(phi/2))``.
    A common conjugation then moves the commutator axis onto that of ``delta``.
    """
    axis, theta = axis_angle(delta)
    if theta < 1e-15:
        eye = np.eye(2, dtype=np.complex128)
        return eye, eye
    # sin(phi/2)^4 = (1 - cos(theta/2)) / 2 = sin(theta/4)^2, written without cancellation
    phi = 2 * math.asin(math.sqrt(math.sin(theta / 4)))
    v = rotation([1.0, 0.0, 0.0], phi)
    w = rotation([0.0, 1.0, 0.0], phi)
    comm = v @ w @ v.conj().T @ w.conj().T
    c_axis, _ = axis_angle(comm)
    s = _align(c_axis, axis)
    return s @ v @ s.conj().T, s @ w @ s.conj().T


def haar_random(rng: np.random.Generator, size: int) -> np.ndarray:
    q = rng.normal(size=(size, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    return from_quaternions(q)
