"""Homogeneous Poisson point processes in hyperbolic balls and half-space windows.

All randomness flows through counter-based Philox streams keyed by
(seed, replica, role), so replicas are independent and every sample is
reproducible without coordination.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import hgeom
from .hgeom import GeometryError, HalfPoint, PolarPoint

RADIAL_KNOTS = 4096


def stream(seed: int, replica: int = 0, role: str = "points") -> np.random.Generator:
    """Independent reproducible generator for (seed, replica, role)."""
    role_key = int.from_bytes(hashlib.blake2s(role.encode(), digest_size=4).digest(), "big")
    seq = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(int(replica), role_key))
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class CloudConfig:
    """Ball window for the radial tree: dimension d, intensity lam, radius R."""

    d: int
    lam: float
    R: float
    seed: int

    def __post_init__(self):
        if self.d < 1:
            raise GeometryError("d must be >= 1")
        if not self.lam > 0:
            raise GeometryError("lam must be > 0")
        if not self.R > 0:
            raise GeometryError("R must be > 0")


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Poisson sample in B(R), stored as arrays sorted by increasing radius."""

    config: CloudConfig
    radii: np.ndarray
    dirs: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        u = np.asarray(self.dirs, dtype=float)
        if r.ndim != 1 or u.shape != (r.shape[0], self.config.d + 1):
            raise GeometryError("radii must be (n,), dirs (n, d+1)")
        if np.any(np.diff(r) < 0):
            raise GeometryError("radii must be sorted increasingly")
        if r.shape[0] and not (r[0] > 0 and r[-1] <= self.config.R):
            raise GeometryError("radii must lie in (0, R]")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "dirs", u)

    def __len__(self) -> int:
        return self.radii.shape[0]

    def point(self, i: int) -> PolarPoint:
        return PolarPoint(float(self.radii[i]), hgeom.Direction(self.dirs[i]))

    @property
    def points(self) -> list[PolarPoint]:
        return [self.point(i) for i in range(len(self))]


# Gauss-Legendre nodes/weights on [0, 1], order 5: exact to machine precision
# for the sub-knot CDF increments of the smooth sinh^d density
_GL_NODES = np.array(
    [0.04691007703066800, 0.23076534494715845, 0.5, 0.76923465505284155, 0.95308992296933200]
)
_GL_WEIGHTS = np.array(
    [0.11846344252809454, 0.23931433524968324, 0.28444444444444444, 0.23931433524968324, 0.11846344252809454]
)


@lru_cache(maxsize=32)
def _radial_inverter(d: int, R: float):
    """Inverse CDF of the sinh^d radial law on (0, R] for d >= 2.

    CDF knot values on RADIAL_KNOTS knots by adaptive quadrature; between
    knots the CDF is completed with a local Gauss rule, and Newton iteration
    with a bisection guard inverts it to better than 1e-10.
    """
    knots = np.linspace(0.0, R, RADIAL_KNOTS)
    step = knots[1] - knots[0]
    increments = [0.0]
    for a, b in zip(knots[:-1], knots[1:]):
        val, _ = quad(lambda s: math.sinh(s) ** d, a, b)
        increments.append(val)
    cdf_vals = np.cumsum(increments)
    total = cdf_vals[-1]
    cdf_vals = cdf_vals / total

    def cdf(r):
        r = np.asarray(r, dtype=float)
        k = np.clip((r // step).astype(int), 0, RADIAL_KNOTS - 2)
        base = knots[k]
        span = r - base
        local = (np.sinh(base[:, None] + span[:, None] * _GL_NODES) ** d) @ _GL_WEIGHTS
        return cdf_vals[k] + span * local / total

    def pdf(r):
        return np.sinh(r) ** d / total

    def invert(targets: np.ndarray) -> np.ndarray:
        targets = np.asarray(targets, dtype=float)
        r = np.interp(targets, cdf_vals, knots)
        lo = np.zeros_like(r)
        hi = np.full_like(r, R)
        for _ in range(100):
            f = cdf(r) - targets
            hi = np.where(f > 0, r, hi)
            lo = np.where(f <= 0, r, lo)
            dp = pdf(r)
            with np.errstate(divide="ignore", invalid="ignore"):
                r_new = r - np.where(dp > 0, f / np.where(dp > 0, dp, 1.0), 0.0)
            bad = (r_new <= lo) | (r_new >= hi) | ~np.isfinite(r_new)
            r_new = np.where(bad, 0.5 * (lo + hi), r_new)
            if np.max(np.abs(r_new - r), initial=0.0) < 1e-13:
                r = r_new
                break
            r = r_new
        return r

    return invert


def _uniform_directions(rng: np.random.Generator, n: int, ambient: int) -> np.ndarray:
    g = rng.normal(size=(n, ambient))
    norms = np.linalg.norm(g, axis=1)
    redo = norms < 1e-12
    while np.any(redo):
        g[redo] = rng.normal(size=(int(redo.sum()), ambient))
        norms = np.linalg.norm(g, axis=1)
        redo = norms < 1e-12
    return g / norms[:, None]


def sample_ball(cfg: CloudConfig, replica: int = 0) -> PointCloud:
    """Poisson(lam * Vol(B(R))) points with radial density sinh(r)^d, isotropic."""
    rng = stream(cfg.seed, replica, "ball")
    n = int(rng.poisson(cfg.lam * hgeom.ball_volume(cfg.d, cfg.R)))
    u01 = rng.uniform(size=n)
    if cfg.d == 1:
        radii = np.arccosh(1.0 + u01 * (math.cosh(cfg.R) - 1.0))
    else:
        radii = _radial_inverter(cfg.d, cfg.R)(u01)
    dirs = _uniform_directions(rng, n, cfg.d + 1)
    radii = np.minimum(np.maximum(radii, 1e-12), cfg.R)
    order = np.lexsort(tuple(dirs[:, k] for k in range(cfg.d, -1, -1)) + (radii,))
    return PointCloud(cfg, radii[order], dirs[order])


# ---------------------------------------------------------------------------
# half-space windows


@dataclass(frozen=True)
class HalfWindow:
    """Box window [-L, L]^d x [y_min, y_max] in the half-space model."""

    half_width: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (0 < self.y_min < self.y_max):
            raise GeometryError("need 0 < y_min < y_max")
        if not self.half_width > 0:
            raise GeometryError("half_width must be > 0")


def half_window_volume(d: int, w: HalfWindow) -> float:
    """Hyperbolic volume (2L)^d (y_min^-d - y_max^-d) / d of the box window."""
    return (2.0 * w.half_width) ** d * (w.y_min**-d - w.y_max**-d) / d


def window_margin(w: HalfWindow, x: np.ndarray, y) -> np.ndarray:
    """Hyperbolic distance from interior points to the window boundary.

    Horosphere faces y = const are at distance |ln(y_face / y)|; the vertical
    walls x_i = +-L at arcsinh((L - |x_i|) / y).
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float)
    top = np.log(w.y_max / y)
    bottom = np.log(y / w.y_min)
    walls = np.arcsinh((w.half_width - np.abs(x)).min(axis=1) / y)
    return np.minimum(np.minimum(top, bottom), walls)


def sample_half_arrays(lam: float, d: int, w: HalfWindow, seed: int, replica: int = 0):
    """Poisson sample in the window; returns (x (n,d), y (n,)) sorted by ordinate.

    The ordinate marginal has density proportional to y^-(d+1); inversion:
    y = (y_min^-d - U (y_min^-d - y_max^-d))^(-1/d). Abscissae are uniform.
    """
    rng = stream(seed, replica, "half")
    n = int(rng.poisson(lam * half_window_volume(d, w)))
    u01 = rng.uniform(size=n)
    span = w.y_min**-d - w.y_max**-d
    y = (w.y_min**-d - u01 * span) ** (-1.0 / d)
    x = rng.uniform(-w.half_width, w.half_width, size=(n, d))
    order = np.lexsort(tuple(x[:, k] for k in range(d - 1, -1, -1)) + (y,))
    return x[order], y[order]


def sample_half(lam: float, d: int, w: HalfWindow, seed: int, replica: int = 0) -> list[HalfPoint]:
    x, y = sample_half_arrays(lam, d, w, seed, replica)
    return [HalfPoint(x[i], float(y[i])) for i in range(len(y))]


# ---------------------------------------------------------------------------
# serialization


def cloud_to_json(cloud: PointCloud) -> str:
    cfg = cloud.config
    return json.dumps(
        {
            "d": cfg.d,
            "lambda": cfg.lam,
            "R": cfg.R,
            "seed": cfg.seed,
            "points": [
                {"r": float(r), "u": [float(c) for c in u]}
                for r, u in zip(cloud.radii, cloud.dirs)
            ],
        },
        sort_keys=True,
    )


def cloud_from_json(text: str) -> PointCloud:
    obj = json.loads(text)
    cfg = CloudConfig(d=obj["d"], lam=obj["lambda"], R=obj["R"], seed=obj["seed"])
    n = len(obj["points"])
    radii = np.array([p["r"] for p in obj["points"]], dtype=float)
    dirs = np.array([p["u"] for p in obj["points"]], dtype=float).reshape(n, cfg.d + 1)
    return PointCloud(cfg, radii, dirs)


def cloud_to_csv(cloud: PointCloud) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r"] + [f"u{k}" for k in range(cloud.config.d + 1)])
    for r, u in zip(cloud.radii, cloud.dirs):
        writer.writerow([repr(float(r))] + [repr(float(c)) for c in u])
    return buf.getvalue()
