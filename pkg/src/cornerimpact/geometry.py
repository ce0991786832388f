"""Planar wedge geometry: region tests, projections and the damping force.

The admissible set K is the closed convex wedge with vertex at the origin,
opening angle ``pi - theta_bar``, bounded by

* face 1: the ray {(0, x2) : x2 <= 0} with inward normal (-1, 0), and
* face 2: the ray spanned by d = (-sin theta_bar, cos theta_bar), with
  outward unit normal n2 = (cos theta_bar, sin theta_bar).

A point is in K iff  x1 <= 0  and  x . n2 <= 0.  The complement splits into
three regions according to which part of K is closest:

* R1 = {x1 >= 0, x2 <= 0}           -> nearest point (0, x2) on face 1,
* R2 = polar wedge {x2 >= 0, x.d <= 0} -> nearest point is the vertex,
* R3 = {x.n2 >= 0, x.d >= 0}        -> nearest point (x.d) d on face 2.

The four regions cover the plane; on overlaps (boundaries) classification
uses the priority K > R1 > R2 > R3 so labels are deterministic.

The spring force of the penalty model is k(x - P_K x) and the damping force
acts along the same direction:

    G(x, v) = (v . w) w / |w|^2,   w = x - P_K x,   zero inside K.

All functions are pure; ConeGeometry is immutable and safe to share.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput

__all__ = [
    "Region",
    "ConeGeometry",
    "classify_region",
    "project_onto_cone",
    "penalty_direction",
    "damping_force_G",
    "pi1",
    "pi2",
    "tangent_cone_project",
]

# Boundary membership uses |test| <= BOUNDARY_RTOL * (1 + |x|): tight enough
# that distinct regions never blur, loose enough to absorb round-off from
# rotations.
BOUNDARY_RTOL = 1e-12


class Region(enum.Enum):
    K = "K"
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"


@dataclass(frozen=True)
class ConeGeometry:
    """Immutable wedge description for a corner half-angle in (0, pi)."""

    theta_bar: float
    cos_theta: float = field(init=False)
    sin_theta: float = field(init=False)

    def __post_init__(self) -> None:
        th = float(self.theta_bar)
        if not math.isfinite(th) or not 0.0 < th < math.pi:
            raise InvalidInput(
                f"theta_bar must lie in (0, pi), got {self.theta_bar!r}"
            )
        object.__setattr__(self, "theta_bar", th)
        object.__setattr__(self, "cos_theta", math.cos(th))
        object.__setattr__(self, "sin_theta", math.sin(th))

    @property
    def face2_normal(self) -> np.ndarray:
        """Outward unit normal of face 2."""
        return np.array([self.cos_theta, self.sin_theta])

    @property
    def face2_direction(self) -> np.ndarray:
        """Unit vector along face 2, pointing away from the vertex."""
        return np.array([-self.sin_theta, self.cos_theta])

    @property
    def is_acute(self) -> bool:
        return self.theta_bar < math.pi / 2.0


def _as_point(p, name: str = "point") -> np.ndarray:
    q = np.asarray(p, dtype=float)
    if q.shape != (2,):
        raise InvalidInput(f"{name} must be a 2-vector, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise InvalidInput(f"{name} must be finite, got {q}")
    return q


def classify_region(point, cone: ConeGeometry) -> Region:
    """Label the region containing ``point`` (priority K > R1 > R2 > R3)."""
    x = _as_point(point)
    x1, x2 = x
    n_dot = x1 * cone.cos_theta + x2 * cone.sin_theta
    d_dot = -x1 * cone.sin_theta + x2 * cone.cos_theta
    if x1 <= 0.0 and n_dot <= 0.0:
        return Region.K
    if x1 >= 0.0 and x2 <= 0.0:
        return Region.R1
    if x2 >= 0.0 and d_dot <= 0.0:
        return Region.R2
    if n_dot >= 0.0 and d_dot >= 0.0:
        return Region.R3
    # Unreachable: the four sectors cover the plane.
    raise InvalidInput(f"point {x} escaped the region decomposition")


def project_onto_cone(point, cone: ConeGeometry) -> np.ndarray:
    """Euclidean projection P_K onto the wedge."""
    x = _as_point(point)
    region = classify_region(x, cone)
    if region is Region.K:
        return x.copy()
    if region is Region.R1:
        return np.array([0.0, x[1]])
    if region is Region.R2:
        return np.zeros(2)
    d_dot = -x[0] * cone.sin_theta + x[1] * cone.cos_theta
    return d_dot * cone.face2_direction


def penalty_direction(point, cone: ConeGeometry) -> np.ndarray:
    """Spring displacement w = x - P_K x (zero inside K)."""
    x = _as_point(point)
    return x - project_onto_cone(x, cone)


def damping_force_G(point, velocity, cone: ConeGeometry) -> np.ndarray:
    """Normal damping direction G(x, v); zero inside K.

    Outside K this is the component of v along the unit penalty direction,
    times that direction.  It is discontinuous across the boundary of K:
    the damping switches on only once the constraint is violated.
    """
    v = _as_point(velocity, "velocity")
    w = penalty_direction(point, cone)
    w2 = float(w @ w)
    if w2 == 0.0:
        return np.zeros(2)
    return (float(v @ w) / w2) * w


def pi1(velocity) -> np.ndarray:
    """Tangential projection onto face 1: kill the x1 component."""
    v = _as_point(velocity, "velocity")
    return np.array([0.0, v[1]])


def pi2(velocity, cone: ConeGeometry) -> np.ndarray:
    """Tangential projection onto face 2: keep the component along d."""
    v = _as_point(velocity, "velocity")
    d = cone.face2_direction
    return float(v @ d) * d


def tangent_cone_project(point, velocity, cone: ConeGeometry) -> np.ndarray:
    """Project ``velocity`` onto the tangent cone of K at a boundary point.

    At a face interior this is the tangential projection onto that face; at
    the vertex the tangent cone is K itself, so the projection coincides
    with P_K applied to the velocity (anelastic impact law).
    """
    x = _as_point(point)
    v = _as_point(velocity, "velocity")
    scale = float(np.hypot(x[0], x[1]))
    tol = BOUNDARY_RTOL * (1.0 + scale)
    if scale <= tol:
        return project_onto_cone(v, cone)
    n_dot = x[0] * cone.cos_theta + x[1] * cone.sin_theta
    if abs(x[0]) <= tol and x[1] < 0.0:
        return pi1(v)
    d_dot = -x[0] * cone.sin_theta + x[1] * cone.cos_theta
    if abs(n_dot) <= tol and d_dot > 0.0:
        return pi2(v, cone)
    raise InvalidInput(
        f"point {x} is not on the wedge boundary (within {tol:g})"
    )
