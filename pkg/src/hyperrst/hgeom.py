"""Exact hyperbolic geometry in curvature -1.

Three coordinate models of (d+1)-dimensional hyperbolic space are supported:

* polar: a point is (r; u) with r the distance to a fixed origin and
  u a unit vector in R^(d+1),
* open ball (Poincare): Euclidean coordinates strictly inside the unit ball,
  metric 4 |dx|^2 / (1 - |x|^2)^2,
* half space: (x, y) with x in R^d and y > 0, metric (|dx|^2 + dy^2) / y^2.

All distances are in absolute hyperbolic units, all angles in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

UNIT_TOL = 1e-12


class GeometryError(ValueError):
    pass


def _as_unit(components) -> np.ndarray:
    v = np.asarray(components, dtype=float)
    if v.ndim != 1:
        raise GeometryError("direction must be a 1-d vector")
    n = np.linalg.norm(v)
    if abs(n - 1.0) > 1e-9:
        raise GeometryError(f"direction norm {n} is not 1")
    # renormalize the last few ulps so stored directions are unit to 1e-12
    return v / n


@dataclass(frozen=True, eq=False)
class Direction:
    """Unit vector in R^(d+1); the direction part of polar coordinates."""

    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "components", _as_unit(self.components))

    @property
    def dim(self) -> int:
        return self.components.shape[0] - 1

    def angle_to(self, other: "Direction") -> float:
        return angle_between(self.components, other.components)


def basis_direction(ambient_dim: int, axis: int = 0) -> Direction:
    v = np.zeros(ambient_dim)
    v[axis] = 1.0
    return Direction(v)


@dataclass(frozen=True, eq=False)
class PolarPoint:
    """Point (r; u): hyperbolic distance r >= 0 from the origin, direction u."""

    r: float
    u: Direction

    def __post_init__(self):
        if self.r < 0:
            raise GeometryError(f"radius {self.r} < 0")

    @property
    def dim(self) -> int:
        return self.u.dim


def polar(r: float, components) -> PolarPoint:
    return PolarPoint(float(r), Direction(components))


def origin_point(ambient_dim: int) -> PolarPoint:
    # radius-0 direction is a convention only; never used in angle terms
    return PolarPoint(0.0, basis_direction(ambient_dim))


@dataclass(frozen=True, eq=False)
class BallPoint:
    """Point of the open unit ball model."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if np.linalg.norm(c) >= 1.0:
            raise GeometryError("ball point must lie strictly inside the unit ball")
        object.__setattr__(self, "coords", c)


@dataclass(frozen=True, eq=False)
class HalfPoint:
    """Point (x, y) of the half-space model; x is the abscissa, y > 0 the ordinate."""

    x: np.ndarray
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        if not self.y > 0:
            raise GeometryError(f"ordinate {self.y} must be > 0")

    @property
    def dim(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True, eq=False)
class Cone:
    """Cone of apex at the origin: directions within `aperture` of `apex_direction`."""

    apex_direction: Direction
    aperture: float

    def __post_init__(self):
        if self.aperture < 0:
            raise GeometryError("aperture must be >= 0")

    def contains(self, z: PolarPoint) -> bool:
        if self.aperture >= math.pi:
            return True
        return self.apex_direction.angle_to(z.u) <= self.aperture


# ---------------------------------------------------------------------------
# distances and angles


def stable_arccosh1p(s):
    """arccosh(1 + s) for s >= 0 as log1p(s + sqrt(s^2 + 2s)).

    Raw arccosh loses all digits when the argument is near 1; feeding the
    cancellation-free excess s keeps full relative accuracy for nearby points.
    """
    s = np.maximum(s, 0.0)
    return np.log1p(s + np.sqrt(s * (s + 2.0)))


def angle_between(u1: np.ndarray, u2: np.ndarray) -> float:
    """Angle in [0, pi] between unit vectors, stable near 0 and pi."""
    d2 = float(np.dot(u1 - u2, u1 - u2))
    if d2 <= 2.0:
        return 2.0 * math.asin(0.5 * math.sqrt(d2))
    s2 = float(np.dot(u1 + u2, u1 + u2))
    return math.pi - 2.0 * math.asin(0.5 * math.sqrt(s2))


def angle_between_arrays(u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """Rowwise angle_between for (n, k) arrays of unit vectors."""
    d2 = np.sum((u1 - u2) ** 2, axis=-1)
    near = 2.0 * np.arcsin(0.5 * np.sqrt(np.minimum(d2, 4.0)))
    s2 = np.sum((u1 + u2) ** 2, axis=-1)
    far = math.pi - 2.0 * np.arcsin(0.5 * np.sqrt(np.minimum(s2, 4.0)))
    return np.where(d2 <= 2.0, near, far)


def polar_cosh_excess(r1, u1, r2, u2):
    """cosh d(z1,z2) - 1 without cancellation.

    Uses cosh d - 1 = 2 sinh^2((r1-r2)/2) + (1 - <u1,u2>) sinh r1 sinh r2 with
    1 - <u1,u2> = |u1-u2|^2 / 2 for unit vectors.
    """
    du2 = np.sum((np.asarray(u1) - np.asarray(u2)) ** 2, axis=-1)
    return (
        2.0 * np.sinh((np.asarray(r1) - np.asarray(r2)) / 2.0) ** 2
        + 0.5 * du2 * np.sinh(r1) * np.sinh(r2)
    )


def polar_dist_arrays(r1, u1, r2, u2):
    return stable_arccosh1p(polar_cosh_excess(r1, u1, r2, u2))


def dist_polar(z1: PolarPoint, z2: PolarPoint) -> float:
    """Hyperbolic distance from the law of cosines in polar coordinates."""
    return float(polar_dist_arrays(z1.r, z1.u.components, z2.r, z2.u.components))


def half_cosh_excess(x1, y1, x2, y2):
    """cosh d - 1 in the half-space model: (|x1-x2|^2 + (y1-y2)^2) / (2 y1 y2)."""
    dx2 = np.sum((np.asarray(x1) - np.asarray(x2)) ** 2, axis=-1)
    return (dx2 + (np.asarray(y1) - np.asarray(y2)) ** 2) / (2.0 * np.asarray(y1) * y2)


def half_dist_arrays(x1, y1, x2, y2):
    return stable_arccosh1p(half_cosh_excess(x1, y1, x2, y2))


def dist_half(z1: HalfPoint, z2: HalfPoint) -> float:
    """Half-space distance 2 atanh sqrt((k^2+(v-1)^2)/(k^2+(v+1)^2)).

    Evaluated through the equivalent cosh form, which is exact for identical
    points and keeps precision when k, v-1 are tiny.
    """
    return float(half_dist_arrays(z1.x, z1.y, z2.x, z2.y))


def ball_cosh_excess(c1, c2):
    n1 = np.sum(np.asarray(c1) ** 2, axis=-1)
    n2 = np.sum(np.asarray(c2) ** 2, axis=-1)
    d2 = np.sum((np.asarray(c1) - np.asarray(c2)) ** 2, axis=-1)
    return 2.0 * d2 / ((1.0 - n1) * (1.0 - n2))


def dist_ball(b1: BallPoint, b2: BallPoint) -> float:
    return float(stable_arccosh1p(ball_cosh_excess(b1.coords, b2.coords)))


def angle_at_origin(z1: PolarPoint, z2: PolarPoint) -> float:
    """Angle z1 0 z2, i.e. the sphere angle between the two directions."""
    return z1.u.angle_to(z2.u)


def apex_angle_arrays(h: float, xnorm, y):
    """Angle at O(h) = (0, e^h) between a half-space point and the ideal point (0,0).

    atan2 resolves the [0, pi] branch of arctan|2 x e^h / (e^2h - |x|^2 - y^2)|:
    the denominator changes sign exactly when the angle passes pi/2.
    """
    eh = math.exp(h)
    return np.arctan2(2.0 * np.abs(xnorm) * eh, eh * eh - np.asarray(xnorm) ** 2 - np.asarray(y) ** 2)


def angle_from_apex(h: float, z: HalfPoint) -> float:
    """Angle between z and the ideal point I_inf as seen from O(h) = (0, e^h).

    Requires y <= e^h with z distinct from the apex; the formula is singular
    only at O(h) itself. For d > 1 the computation happens in the totally
    geodesic plane through I_inf, z, O(h), i.e. with x replaced by |x|.
    """
    xnorm = float(np.linalg.norm(z.x))
    if z.y > math.exp(h) or (z.y == math.exp(h) and xnorm == 0.0):
        raise GeometryError(f"angle formula requires y <= e^h away from the apex (y={z.y})")
    return float(apex_angle_arrays(h, xnorm, z.y))


# ---------------------------------------------------------------------------
# model conversions


def half_to_ball(z: HalfPoint, h: float = 0.0) -> BallPoint:
    """Isometry H -> I sending O(h) = (0, e^h) to the ball center.

    Componentwise generalization of
    (x, y) -> (x^2 + y^2 - e^2h, -2 x e^h) / (|x|^2 + (y + e^h)^2).
    """
    eh = math.exp(h)
    xn2 = float(np.dot(z.x, z.x))
    denom = xn2 + (z.y + eh) ** 2
    first = (xn2 + z.y * z.y - eh * eh) / denom
    rest = (-2.0 * eh / denom) * z.x
    return BallPoint(np.concatenate(([first], rest)))


def polar_to_ball(z: PolarPoint) -> BallPoint:
    """Radial map: Euclidean radius tanh(r/2), same direction."""
    return BallPoint(math.tanh(z.r / 2.0) * z.u.components)


def ball_to_polar(b: BallPoint) -> PolarPoint:
    rho = float(np.linalg.norm(b.coords))
    if rho == 0.0:
        return origin_point(b.coords.shape[0])
    return PolarPoint(2.0 * math.atanh(rho), Direction(b.coords / rho))


def half_to_polar(z: HalfPoint, h: float = 0.0) -> PolarPoint:
    """Polar coordinates around O(h) through the ball model."""
    return ball_to_polar(half_to_ball(z, h))


def polar_to_klein(r, u):
    """Klein (projective) coordinates: Euclidean radius tanh(r); geodesics are chords."""
    return np.tanh(np.asarray(r))[..., None] * np.asarray(u)


# ---------------------------------------------------------------------------
# star paths


def slerp(u1: np.ndarray, u2: np.ndarray, theta: float, frac: float) -> np.ndarray:
    """Point at angle frac*theta from u1 on the great circle toward u2."""
    if theta < 1e-14:
        return np.asarray(u1, dtype=float)
    st = math.sin(theta)
    return (math.sin((1.0 - frac) * theta) * np.asarray(u1) + math.sin(frac * theta) * np.asarray(u2)) / st


def star_psi_arrays(r1, r2, theta, t):
    """Angle from u1 of the star-path point at parameter t.

    psi = arccos(((1-t) sinh r1 + t cos(theta) sinh r2) / sinh((1-t) r1 + t r2)),
    with the argument clamped to [-1, 1]: rounding can push it past 1, and the
    clamped region is exactly where the path runs radially.
    """
    rho = (1.0 - np.asarray(t)) * r1 + np.asarray(t) * r2
    sr = np.sinh(rho)
    num = (1.0 - np.asarray(t)) * np.sinh(r1) + np.asarray(t) * np.cos(theta) * np.sinh(r2)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(sr > 0, num / np.where(sr > 0, sr, 1.0), 1.0)
    return np.arccos(np.clip(a, -1.0, 1.0))


@dataclass(frozen=True, eq=False)
class StarPath:
    """The edge curve [z1, z2]*: radius affine in t, direction slerped through phi.

    Monotone both in distance to the origin and in distance to z1. When one
    endpoint is the origin (r = 0) or theta = 0 the path degenerates to the
    radial segment with the direction of z1.
    """

    z1: PolarPoint
    z2: PolarPoint
    theta: float = field(init=False)

    def __post_init__(self):
        if self.z1.r == 0.0 or self.z2.r == 0.0:
            th = 0.0
        else:
            th = angle_between(self.z1.u.components, self.z2.u.components)
        if th >= math.pi - 1e-12:
            raise GeometryError("antipodal endpoints: origin lies on the segment")
        object.__setattr__(self, "theta", th)


def star_eval(p: StarPath, t: float) -> PolarPoint:
    if not 0.0 <= t <= 1.0:
        raise GeometryError(f"parameter t={t} outside [0, 1]")
    r1, r2 = p.z1.r, p.z2.r
    rho = (1.0 - t) * r1 + t * r2
    if rho == 0.0:
        return origin_point(p.z1.u.components.shape[0])
    if p.theta < 1e-14:
        base = p.z1 if p.z1.r > 0 else p.z2
        return PolarPoint(rho, base.u)
    psi = float(star_psi_arrays(r1, r2, p.theta, t))
    return PolarPoint(rho, Direction(slerp(p.z1.u.components, p.z2.u.components, p.theta, psi / p.theta)))


def star_sphere_crossing(p: StarPath, r: float) -> float:
    """Parameter t with radius((1-t)r1 + t r2) = r; the radius law is affine."""
    r1, r2 = p.z1.r, p.z2.r
    lo, hi = min(r1, r2), max(r1, r2)
    if not lo <= r <= hi:
        raise GeometryError(f"radius {r} outside edge range [{lo}, {hi}]")
    if r1 == r2:
        return 0.0
    return (r - r1) / (r2 - r1)


# ---------------------------------------------------------------------------
# volumes


@lru_cache(maxsize=None)
def sphere_surface(d: int) -> float:
    """d-dimensional volume of the unit sphere S^d in R^(d+1)."""
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def ball_volume(d: int, r: float) -> float:
    """Volume of a hyperbolic ball: S_d * integral_0^r sinh(s)^d ds.

    Closed form 2 pi (cosh r - 1) for d = 1, adaptive quadrature otherwise.
    Grows like e^(d r).
    """
    if d < 1:
        raise GeometryError("dimension d must be >= 1")
    if r < 0:
        raise GeometryError("radius must be >= 0")
    if r == 0.0:
        return 0.0
    if d == 1:
        return 2.0 * math.pi * (math.cosh(r) - 1.0)
    val, _ = quad(lambda s: math.sinh(s) ** d, 0.0, r, limit=200)
    return sphere_surface(d) * val


def shell_volume(d: int, r_lo: float, r_hi: float) -> float:
    return ball_volume(d, r_hi) - ball_volume(d, r_lo)


def sphere_cap(d: int, theta: float) -> float:
    """nu-measure on S^d of a cap of angular radius theta (2*theta for d = 1)."""
    theta = min(max(theta, 0.0), math.pi)
    if d == 1:
        return 2.0 * theta
    val, _ = quad(lambda t: math.sin(t) ** (d - 1), 0.0, theta, limit=200)
    return sphere_surface(d - 1) * val


def cone_shell_volume(d: int, theta: float, r_lo: float, r_hi: float) -> float:
    """Volume of Cone(u, theta) intersected with the shell B(r_hi) \\ B(r_lo)."""
    return sphere_cap(d, theta) * shell_volume(d, r_lo, r_hi) / sphere_surface(d)


# ---------------------------------------------------------------------------
# regions and isometries


def bplus_region_test(z: PolarPoint, rho: float, q: PolarPoint) -> bool:
    """Membership in B+(z, rho) = B(z, rho) intersect B(0, d(0,z))."""
    if rho < 0:
        raise GeometryError("rho must be >= 0")
    return q.r < z.r and dist_polar(z, q) <= rho


def boost_from_origin(r: float, u: np.ndarray, radii, dirs):
    """Isometry taking the origin to (r; u), applied to points (radii[i]; dirs[i]).

    Hyperboloid-model boost: a point at radius s, direction v embeds as
    (cosh s, sinh s * v) and is mapped with rapidity r along the axis u.
    Returns (new_radii, new_dirs).
    """
    radii = np.asarray(radii, dtype=float)
    dirs = np.asarray(dirs, dtype=float)
    t = np.cosh(radii)
    x = np.sinh(radii)[:, None] * dirs
    xu = x @ u
    t2 = math.cosh(r) * t + math.sinh(r) * xu
    x2 = x + np.outer((math.cosh(r) - 1.0) * xu + math.sinh(r) * t, u)
    new_r = stable_arccosh1p(t2 - 1.0)
    norms = np.linalg.norm(x2, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    new_dirs = x2 / safe[:, None]
    zero = norms == 0
    if np.any(zero):
        new_dirs[zero] = 0.0
        new_dirs[zero, 0] = 1.0
    return new_r, new_dirs
