"""Cones, hyperplanes and the shrink matrices that fold a cone into the positive sector."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BallTouchesApexError, InvalidInputError
from .numlin import as_vector, rotation_to

__all__ = [
    "CONTAINMENT_SLACK",
    "Cone",
    "Hyperplane",
    "angle_between",
    "angles_to_axis",
    "theta_n",
    "lambda_shrink",
    "w_theta",
    "diagonal_unit",
    "cone_contains",
    "min_enclosing_aperture",
    "ball_in_cone",
]

CONTAINMENT_SLACK = 1e-9
"""Angular slack (radians) granted on cone boundaries to absorb round-off."""


def _unit_within(v, name: str, slack: float = 1e-10) -> np.ndarray:
    v = as_vector(v, name)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > slack:
        raise InvalidInputError(f"{name} must have unit length within {slack}, got {norm!r}")
    return v


@dataclass(frozen=True, eq=False)
class Cone:
    """Closed cone ``{apex + x : angle(x, axis) <= aperture / 2}``."""

    apex: np.ndarray
    axis: np.ndarray
    aperture: float

    def __post_init__(self):
        apex = as_vector(self.apex, "apex")
        axis = _unit_within(self.axis, "axis")
        if apex.shape != axis.shape:
            raise InvalidInputError("apex and axis dimensions differ")
        theta = float(self.aperture)
        if not (0.0 < theta <= math.pi):
            raise InvalidInputError(f"aperture must lie in (0, pi], got {theta!r}")
        object.__setattr__(self, "apex", apex)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "aperture", theta)

    @classmethod
    def toward(cls, apex, direction, aperture: float) -> "Cone":
        """Cone whose axis is ``direction`` normalised."""
        direction = as_vector(direction, "direction")
        norm = np.linalg.norm(direction)
        if norm == 0.0:
            raise InvalidInputError("direction is the zero vector")
        return cls(np.asarray(apex, dtype=float), direction / norm, aperture)

    @property
    def dim(self) -> int:
        return self.apex.shape[0]

    def reversed(self) -> "Cone":
        """Backward cone: same apex and aperture, opposite axis."""
        return Cone(self.apex, -self.axis, self.aperture)


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """``{point + x : <x, normal> = 0}`` with a unit normal."""

    point: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        point = as_vector(self.point, "point")
        normal = _unit_within(self.normal, "normal")
        if point.shape != normal.shape:
            raise InvalidInputError("point and normal dimensions differ")
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "normal", normal)

    def signed_distances(self, X) -> np.ndarray:
        """``<x - point, normal>`` for each column of ``X``."""
        X = np.asarray(X, dtype=float)
        return self.normal @ (X - self.point[:, None])


def angle_between(u, v) -> float:
    """Angle in [0, pi] between two non-zero vectors.

    Uses ``2 atan2(|u' - v'|, |u' + v'|)`` on the normalised vectors, which
    is accurate near 0 and pi where ``arccos`` of a dot product is not.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise InvalidInputError("angle undefined for a zero vector")
    u, v = u / nu, v / nv
    return float(2.0 * math.atan2(np.linalg.norm(u - v), np.linalg.norm(u + v)))


def angles_to_axis(offsets: np.ndarray, axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Angles between each column of ``offsets`` and ``axis``, plus the column norms.

    Zero columns get angle 0.
    """
    offsets = np.asarray(offsets, dtype=float)
    norms = np.linalg.norm(offsets, axis=0)
    safe = np.where(norms > 0.0, norms, 1.0)
    unit = offsets / safe
    h = axis / np.linalg.norm(axis)
    diff = np.linalg.norm(unit - h[:, None], axis=0)
    summ = np.linalg.norm(unit + h[:, None], axis=0)
    angles = 2.0 * np.arctan2(diff, summ)
    angles[norms == 0.0] = 0.0
    return angles, norms


def theta_n(n: int) -> float:
    """Aperture of the widest cone about the diagonal that fits in the positive sector of R^n."""
    if int(n) != n or n < 2:
        raise InvalidInputError(f"theta_n needs an integer n >= 2, got {n!r}")
    # Same angle as 2 acos(sqrt((n-1)/n)); the arctangent form avoids the
    # cancellation of acos near 1 and is correctly rounded for n = 2.
    return 2.0 * math.atan2(1.0, math.sqrt(n - 1))


def lambda_shrink(theta: float, n: int) -> float:
    """Factor applied orthogonally to the diagonal so a cone of aperture ``theta`` fits in the theta_n cone."""
    if not (0.0 < theta < math.pi):
        raise InvalidInputError(f"theta must lie in (0, pi), got {theta!r}")
    tn = theta_n(n)
    if theta <= tn:
        return 1.0
    return math.tan(tn / 2.0) / math.tan(theta / 2.0)


def diagonal_unit(n: int) -> np.ndarray:
    """``(1, ..., 1) / sqrt(n)``."""
    return np.full(n, 1.0 / math.sqrt(n))


def w_theta(theta: float, n: int) -> np.ndarray:
    """Symmetric matrix fixing the diagonal direction and scaling its complement by ``lambda_shrink``."""
    lam = lambda_shrink(theta, n)
    e1 = np.zeros(n)
    e1[0] = 1.0
    R_tilde = rotation_to(e1, diagonal_unit(n))
    scale = np.full(n, lam)
    scale[0] = 1.0
    W = (R_tilde * scale) @ R_tilde.T
    return 0.5 * (W + W.T)


def cone_contains(cone: Cone, x, slack: float = CONTAINMENT_SLACK) -> bool:
    """True when ``x`` is the apex or within ``aperture/2 + slack`` of the axis."""
    x = as_vector(x, "x")
    offset = x - cone.apex
    if not np.any(offset):
        return True
    return angle_between(offset, cone.axis) <= cone.aperture / 2.0 + slack


def min_enclosing_aperture(apex, axis, points, radius: float = 0.0) -> float:
    """Smallest aperture of a cone at ``apex`` about ``axis`` containing balls around ``points``.

    ``points`` is either a list of vectors or a ``(dim, k)`` array of columns.
    The result is ``2 max(angle + arcsin(radius / distance))`` and can exceed
    pi; callers decide what that means.  An empty point set gives 0.
    """
    apex = as_vector(apex, "apex")
    axis = as_vector(axis, "axis")
    if radius < 0:
        raise InvalidInputError("radius must be non-negative")
    if isinstance(points, np.ndarray) and points.ndim == 2:
        P = points
    else:
        pts = list(points)
        if not pts:
            return 0.0
        P = np.column_stack([np.asarray(p, dtype=float) for p in pts])
    if P.shape[1] == 0:
        return 0.0
    angles, dists = angles_to_axis(P - apex[:, None], axis)
    if np.any(dists <= radius):
        raise BallTouchesApexError(
            f"a ball of radius {radius!r} reaches the apex (closest distance {dists.min()!r})"
        )
    return float(2.0 * np.max(angles + np.arcsin(radius / dists)))


def ball_in_cone(center, radius: float, cone: Cone, slack: float = CONTAINMENT_SLACK) -> bool:
    """Whether the closed ball ``B_radius(center)`` lies in ``cone``.

    With ``radius == 0`` this is :func:`cone_contains`.
    """
    if radius < 0:
        raise InvalidInputError("radius must be non-negative")
    if radius == 0:
        return cone_contains(cone, center, slack)
    offset = as_vector(center, "center") - cone.apex
    d = float(np.linalg.norm(offset))
    if d <= radius:
        return False
    return angle_between(offset, cone.axis) + math.asin(radius / d) <= cone.aperture / 2.0 + slack
