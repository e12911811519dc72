"""Directed Spanning Forest in the half-space model and the RST(h) family.

The DSF points toward the ideal point at infinity of the upper half space:
each point connects to its nearest neighbor among points of strictly larger
ordinate. RST(h) is the radial tree with origin O(h) = (0, e^h); as h grows
its parents couple with the DSF parents on compact sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hgeom, search
from .hgeom import GeometryError, HalfPoint
from .sampler import HalfWindow, window_margin
from .search import FRONTIER, ROOT


class MarginError(RuntimeError):
    """A parent search ball leaves the sampling window; results would be biased."""


def _as_arrays(points):
    """Accept a list of HalfPoint or an (x, y) array pair; returns x (n,d), y (n,)."""
    if isinstance(points, tuple) and len(points) == 2:
        x, y = points
        return np.atleast_2d(np.asarray(x, dtype=float)), np.asarray(y, dtype=float)
    x = np.array([p.x for p in points], dtype=float)
    y = np.array([p.y for p in points], dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return x, y


@dataclass(eq=False)
class HalfForest:
    """Half-space points plus parent links; FRONTIER (-2) marks points with
    no candidate in the window, ROOT (-1) the virtual origin of RST(h)."""

    x: np.ndarray
    y: np.ndarray
    parent: np.ndarray
    parent_dist: np.ndarray
    order: np.ndarray  # permutation from input order to internal order
    h: float | None = None  # RST(h) origin height, None for the DSF

    def __len__(self) -> int:
        return self.y.shape[0]

    def point(self, i: int) -> HalfPoint:
        return HalfPoint(self.x[i], float(self.y[i]))

    def parent_in_input_order(self) -> np.ndarray:
        """Parent indices re-expressed for the caller's original point order."""
        inv = np.empty(len(self), dtype=np.int64)
        inv[self.order] = np.arange(len(self))
        pp = self.parent[inv]
        return np.where(pp < 0, pp, self.order[np.maximum(pp, 0)])


def _half_dist_block(x, y):
    def dist_block(i, js):
        s = (np.sum((x[js] - x[i]) ** 2, axis=1) + (y[js] - y[i]) ** 2) / (2.0 * y[js] * y[i])
        return hgeom.stable_arccosh1p(s)

    return dist_block


def build_dsf(points) -> HalfForest:
    """Parent = nearest point of strictly larger ordinate, else FRONTIER.

    Ordinate-sorted scan pruned by d(z, z') >= |ln(y'/y)|.
    """
    x, y = _as_arrays(points)
    if y.shape[0] == 0:
        raise GeometryError("empty point list")
    order = np.lexsort(tuple(x[:, k] for k in range(x.shape[1] - 1, -1, -1)) + (-y,))
    xs, ys = x[order], y[order]
    keys = -np.log(ys)
    parent, pdist = search.nearest_lower(keys, _half_dist_block(xs, ys), root_dist=None)
    return HalfForest(xs, ys, parent, pdist, order)


def build_dsf_brute(points) -> HalfForest:
    """O(n^2) oracle built directly from the definition."""
    x, y = _as_arrays(points)
    order = np.lexsort(tuple(x[:, k] for k in range(x.shape[1] - 1, -1, -1)) + (-y,))
    xs, ys = x[order], y[order]
    s = (
        np.sum((xs[:, None, :] - xs[None, :, :]) ** 2, axis=2) + (ys[:, None] - ys[None, :]) ** 2
    ) / (2.0 * np.outer(ys, ys))
    dist = hgeom.stable_arccosh1p(s)
    parent, pdist = search.nearest_lower_brute(-np.log(ys), dist, root_dist=None)
    return HalfForest(xs, ys, parent, pdist, order)


def origin_distances(h: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Distances from O(h) = (0, e^h)."""
    eh = math.exp(h)
    s = (np.sum(x**2, axis=1) + (y - eh) ** 2) / (2.0 * y * eh)
    return hgeom.stable_arccosh1p(s)


def build_rst_h(points, h: float) -> HalfForest:
    """Radial tree with origin O(h): parent = nearest among points strictly
    closer to O(h), with O(h) itself competing (parent ROOT)."""
    if h < 0:
        raise GeometryError("h must be >= 0")
    x, y = _as_arrays(points)
    if y.shape[0] == 0:
        raise GeometryError("empty point list")
    c = origin_distances(h, x, y)
    order = np.lexsort(tuple(x[:, k] for k in range(x.shape[1] - 1, -1, -1)) + (y, c))
    xs, ys, cs = x[order], y[order], c[order]
    parent, pdist = search.nearest_lower(cs, _half_dist_block(xs, ys), root_dist=cs)
    return HalfForest(xs, ys, parent, pdist, order, h=h)


def build_rst_h_brute(points, h: float) -> HalfForest:
    x, y = _as_arrays(points)
    c = origin_distances(h, x, y)
    order = np.lexsort(tuple(x[:, k] for k in range(x.shape[1] - 1, -1, -1)) + (y, c))
    xs, ys, cs = x[order], y[order], c[order]
    s = (
        np.sum((xs[:, None, :] - xs[None, :, :]) ** 2, axis=2) + (ys[:, None] - ys[None, :]) ** 2
    ) / (2.0 * np.outer(ys, ys))
    dist = hgeom.stable_arccosh1p(s)
    parent, pdist = search.nearest_lower_brute(cs, dist, root_dist=cs)
    return HalfForest(xs, ys, parent, pdist, order, h=h)


# ---------------------------------------------------------------------------
# regions


VOIS_KINDS = ("Vois", "Vois'", "Vois''")
CYL_KINDS = ("Cyl", "Cyl'", "Cyl''")


@dataclass(frozen=True)
class RegionSpec:
    """Neighborhoods of the ideal point: cones seen from O(h) (Vois kinds)
    and their coordinate boxes (Cyl kinds)."""

    kind: str
    A: float
    a: float = 0.0
    h: float = 0.0

    def __post_init__(self):
        if self.kind not in VOIS_KINDS + CYL_KINDS:
            raise GeometryError(f"unknown region kind {self.kind!r}")
        if not self.A > 0:
            raise GeometryError("A must be > 0")
        if self.a < 0 or self.h < 0:
            raise GeometryError("a and h must be >= 0")


def region_contains(spec: RegionSpec, z: HalfPoint) -> bool:
    """Membership per the displayed set definitions.

    All three Vois cones have apex O(h); the apertures are A e^-h, A e^-h and
    A e^-(h+a). Cyl kinds compare coordinates directly.
    """
    xnorm = float(np.linalg.norm(z.x))
    y = z.y
    if spec.kind == "Cyl":
        return xnorm < spec.A and 0 < y <= 1.5
    if spec.kind == "Cyl'":
        return xnorm < spec.A and 0.5 * math.exp(-spec.a) <= y <= 1.5
    if spec.kind == "Cyl''":
        return xnorm < spec.A * math.exp(-spec.a) and 0 < y <= 1.5 * math.exp(-spec.a)
    ang = float(hgeom.apex_angle_arrays(spec.h, xnorm, y))
    dist = float(origin_distances(spec.h, z.x[None, :], np.array([y]))[0])
    if spec.kind == "Vois":
        return ang <= spec.A * math.exp(-spec.h) and dist >= spec.h
    if spec.kind == "Vois'":
        return ang <= spec.A * math.exp(-spec.h) and spec.h <= dist < spec.h + spec.a
    # Vois''
    return ang <= spec.A * math.exp(-spec.h - spec.a) and dist >= spec.h + spec.a


def cyl_box(spec: RegionSpec):
    """(x_radius, y_lo, y_hi) of a Cyl-kind region."""
    if spec.kind == "Cyl":
        return spec.A, 0.0, 1.5
    if spec.kind == "Cyl'":
        return spec.A, 0.5 * math.exp(-spec.a), 1.5
    if spec.kind == "Cyl''":
        return spec.A * math.exp(-spec.a), 0.0, 1.5 * math.exp(-spec.a)
    raise GeometryError(f"{spec.kind} is not a Cyl kind")


# ---------------------------------------------------------------------------
# coupling


@dataclass(frozen=True)
class CouplingReport:
    """Per-h agreement fractions between RST(h) and DSF parents on K."""

    h_values: tuple
    agreement_fraction: tuple
    K_spec: RegionSpec
    counts: tuple


def coupling_fraction(points, window: HalfWindow, K: RegionSpec, h: float,
                      dsf_forest: HalfForest | None = None):
    """Fraction of cloud points in K whose RST(h) parent equals their DSF parent.

    Every point of K must have both parent search balls inside the window;
    a violation raises MarginError rather than returning a biased number.
    An empty K intersection reports fraction 1 with count 0.
    """
    x, y = _as_arrays(points)
    forest = dsf_forest if dsf_forest is not None else build_dsf((x, y))
    tree_h = build_rst_h((x, y), h)
    dsf_parent = forest.parent_in_input_order()
    rst_parent = tree_h.parent_in_input_order()

    xr, ylo, yhi = cyl_box(K)
    in_k = (np.linalg.norm(x, axis=1) < xr) & (y >= ylo) & (y <= yhi)
    idx = np.nonzero(in_k)[0]
    if idx.size == 0:
        return 1.0, 0

    margins = window_margin(window, x[idx], y[idx])
    inv_d = np.empty(len(y), dtype=np.int64)
    inv_d[forest.order] = np.arange(len(y))
    inv_r = np.empty(len(y), dtype=np.int64)
    inv_r[tree_h.order] = np.arange(len(y))
    d_dsf = forest.parent_dist[inv_d[idx]]
    d_rst = tree_h.parent_dist[inv_r[idx]]
    worst = np.maximum(d_dsf, d_rst)
    bad = ~np.isfinite(worst) | (worst >= margins)
    if np.any(bad):
        k = int(np.nonzero(bad)[0][0])
        raise MarginError(
            f"parent ball of point {idx[k]} (dist {worst[k]:.3f}) exceeds its "
            f"window margin {margins[k]:.3f}; enlarge the window"
        )
    agree = dsf_parent[idx] == rst_parent[idx]
    # a frontier marker never equals a real parent; ROOT (the O(h) origin)
    # never equals a DSF parent either
    agree &= dsf_parent[idx] >= 0
    return float(np.mean(agree)), int(idx.size)
