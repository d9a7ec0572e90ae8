"""Rigid-transform algebra on rotation matrices and axis-angle vectors.

Conventions used throughout the package:

* A pose stores a rotation matrix ``r`` and a translation ``t`` and maps
  points from its "child" frame into its "parent" frame.
* A 6-vector variation is ordered ``[rot | trans]``: indices 0-2 hold an
  axis-angle rotation (radians), indices 3-5 a translation (meters).
* The variation transform keeps translation additive: rotation goes through
  the exponential map, translation is applied as-is in the local frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Below this angle, closed-form coefficients switch to series expansions.
SMALL_ANGLE = 1e-4


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix [v]x such that skew(v) @ w == cross(v, w)."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def exp_rotvec(v: np.ndarray) -> np.ndarray:
    """Rotation matrix for an axis-angle vector (Rodrigues formula).

    Continuous at the identity through series expansions of sin(a)/a and
    (1 - cos(a))/a^2.
    """
    v = np.asarray(v, dtype=float)
    angle = np.linalg.norm(v)
    if angle < SMALL_ANGLE:
        a2 = angle * angle
        s = 1.0 - a2 / 6.0          # sin(a)/a
        c = 0.5 * (1.0 - a2 / 12.0)  # (1 - cos(a))/a^2
    else:
        s = np.sin(angle) / angle
        c = (1.0 - np.cos(angle)) / (angle * angle)
    k = skew(v)
    return np.eye(3) + s * k + c * (k @ k)


def log_rotation(r: np.ndarray) -> np.ndarray:
    """Principal rotation vector of a rotation matrix, norm in [0, pi].

    Near pi the axis is recovered from the symmetric part of the matrix;
    the usual asin-based formula loses the axis there.  At exactly pi the
    axis sign is ambiguous and the representative whose first nonzero
    component is positive is returned.
    """
    r = np.asarray(r, dtype=float)
    cos_a = np.clip((np.trace(r) - 1.0) / 2.0, -1.0, 1.0)
    angle = np.arccos(cos_a)
    w = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])

    if angle < SMALL_ANGLE:
        # w = 2 sin(a) e; sin(a)/a ~ 1 - a^2/6
        return 0.5 * w * (1.0 + angle * angle / 6.0)

    if angle < np.pi - 1e-4:
        return (angle / (2.0 * np.sin(angle))) * w

    # Near pi: e e^T = (S - cos(a) I) / (1 - cos(a)) with S the symmetric part.
    s = 0.5 * (r + r.T)
    ee = (s - cos_a * np.eye(3)) / (1.0 - cos_a)
    axis = np.sqrt(np.clip(np.diag(ee), 0.0, None))
    # Relative signs from the off-diagonal products e_i e_j.
    i = int(np.argmax(axis))
    for j in range(3):
        if j != i and ee[i, j] < 0.0:
            axis[j] = -axis[j]
    axis /= np.linalg.norm(axis)
    # Overall sign from the skew part if it still carries information.
    if np.linalg.norm(w) > 1e-9:
        if np.dot(axis, w) < 0.0:
            axis = -axis
    else:
        for component in axis:
            if component != 0.0:
                if component < 0.0:
                    axis = -axis
                break
    return angle * axis


def canonical_rotvec(v: np.ndarray) -> np.ndarray:
    """Map a rotation vector onto the principal branch with norm <= pi."""
    v = np.asarray(v, dtype=float)
    angle = np.linalg.norm(v)
    if angle <= np.pi:
        return v
    return log_rotation(exp_rotvec(v))


@dataclass(frozen=True)
class Pose:
    """Rigid transform: rotation matrix ``r`` plus translation ``t``."""

    r: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.eye(3), np.zeros(3))

    @staticmethod
    def from_rotvec(v, t=(0.0, 0.0, 0.0)) -> "Pose":
        return Pose(exp_rotvec(np.asarray(v, dtype=float)), np.asarray(t, dtype=float))

    def compose(self, other: "Pose") -> "Pose":
        return Pose(self.r @ other.r, self.r @ other.t + self.t)

    def __matmul__(self, other: "Pose") -> "Pose":
        return self.compose(other)

    def inverse(self) -> "Pose":
        rt = self.r.T
        return Pose(rt, -rt @ self.t)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform one point (3,) or a stack of points (n, 3)."""
        points = np.asarray(points, dtype=float)
        return points @ self.r.T + self.t

    def rotvec(self) -> np.ndarray:
        return log_rotation(self.r)

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.r
        m[:3, 3] = self.t
        return m


def adjoint(p: Pose) -> np.ndarray:
    """6x6 adjoint projecting a variation between reference frames.

    Block layout matches the [rot | trans] vector ordering:
    [[R, 0], [[t]x R, R]].
    """
    ad = np.zeros((6, 6))
    ad[:3, :3] = p.r
    ad[3:, :3] = skew(p.t) @ p.r
    ad[3:, 3:] = p.r
    return ad


def _half_angle_cot(angle: float) -> float:
    """(a/2) * cot(a/2) with the series limit 1 - a^2/12 at small angles."""
    if angle < SMALL_ANGLE:
        return 1.0 - angle * angle / 12.0
    return (angle / 2.0) / np.tan(angle / 2.0)


def variation_matrix(v: np.ndarray) -> np.ndarray:
    """First-order change of a rotation vector under a subsequent rotation.

    For r = a*e the matrix is
    (a/2)cot(a/2) I - (a/2)[e]x + (1 - (a/2)cot(a/2)) e e^T,
    reducing to the identity at a = 0.  Its transpose plays the same role
    for a preceding infinitesimal rotation.
    """
    v = np.asarray(v, dtype=float)
    angle = np.linalg.norm(v)
    if angle < SMALL_ANGLE:
        return _half_angle_cot(angle) * np.eye(3) - 0.5 * skew(v)
    e = v / angle
    h = _half_angle_cot(angle)
    return h * np.eye(3) - (angle / 2.0) * skew(e) + (1.0 - h) * np.outer(e, e)


def compose_rotvecs(theta: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Rotation vector of exp([theta]x) @ exp([r]x) via half-angle composition.

    Uses the classic closed-form half-angle relations; falls back to the
    matrix logarithm when the composed angle approaches 2*pi, where the
    axis reconstruction degenerates.
    """
    theta = np.asarray(theta, dtype=float)
    r = np.asarray(r, dtype=float)
    ta = np.linalg.norm(theta)
    ra = np.linalg.norm(r)
    if ta < 1e-14:
        return canonical_rotvec(r.copy())
    if ra < 1e-14:
        return canonical_rotvec(theta.copy())
    v = theta / ta
    e = r / ra
    ct, st = np.cos(ta / 2.0), np.sin(ta / 2.0)
    ca, sa = np.cos(ra / 2.0), np.sin(ra / 2.0)
    x = ct * ca - st * sa * np.dot(v, e)
    y = st * ca * v + ct * sa * e + st * sa * np.cross(v, e)
    x = np.clip(x, -1.0, 1.0)
    gamma = 2.0 * np.arccos(x)
    sin_half = np.sqrt(max(1.0 - x * x, 0.0))
    if sin_half < 1e-6:
        return log_rotation(exp_rotvec(theta) @ exp_rotvec(r))
    n = y / sin_half
    if gamma > np.pi:
        return -(2.0 * np.pi - gamma) * n
    return gamma * n


def variation_transform(theta: np.ndarray) -> Pose:
    """T(theta): exponential rotation, additive translation."""
    theta = np.asarray(theta, dtype=float)
    return Pose(exp_rotvec(theta[:3]), theta[3:].copy())


def pose_with_variation(pose: Pose, theta: np.ndarray) -> Pose:
    """Pose after applying a variation in its own model frame.

    Single shared definition so that energies, constraints, and updates all
    differentiate the same map.
    """
    return pose @ variation_transform(theta)


def relative_variation(reference: Pose, varied: Pose) -> np.ndarray:
    """Variation theta with varied == reference o T(theta) (exact inverse)."""
    rel = reference.inverse() @ varied
    return np.concatenate([log_rotation(rel.r), rel.t])
