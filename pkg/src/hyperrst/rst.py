"""Radial Spanning Tree construction, levels, and angular deviation statistics.

Every Poisson point connects to its nearest neighbor among points strictly
closer to the origin (the origin itself competes). Level crossings realize
the intersection of tree edges with spheres S(r); cumulative forward
deviations (CFD) sum origin-angles along trajectories, and maximal backward
deviations (MBD) take suprema of CFD over descendant subtrees.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import hgeom, search
from .hgeom import Direction, GeometryError, PolarPoint, star_psi_arrays
from .sampler import PointCloud
from .search import ROOT


@dataclass(eq=False)
class RadialTree:
    """Point cloud plus parent links; parent ROOT (-1) means the origin."""

    cloud: PointCloud
    parent: np.ndarray
    parent_dist: np.ndarray
    _children: np.ndarray | None = field(default=None, repr=False)
    _children_start: np.ndarray | None = field(default=None, repr=False)
    _edge_theta: np.ndarray | None = field(default=None, repr=False)
    _sweep_cache: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.cloud)

    @property
    def radii(self) -> np.ndarray:
        return self.cloud.radii

    @property
    def dirs(self) -> np.ndarray:
        return self.cloud.dirs

    def parent_radius(self, i: int) -> float:
        p = self.parent[i]
        return 0.0 if p == ROOT else float(self.radii[p])

    def parent_radii(self) -> np.ndarray:
        rp = np.where(self.parent >= 0, self.radii[np.maximum(self.parent, 0)], 0.0)
        return rp

    def children_of(self, i: int) -> np.ndarray:
        self._ensure_children()
        return self._children[self._children_start[i] : self._children_start[i + 1]]

    def root_children(self) -> np.ndarray:
        return np.nonzero(self.parent == ROOT)[0]

    def _ensure_children(self):
        if self._children is not None:
            return
        n = len(self)
        mask = self.parent >= 0
        counts = np.bincount(self.parent[mask], minlength=n)
        start = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=start[1:])
        order = np.argsort(self.parent[mask], kind="stable")
        self._children = np.nonzero(mask)[0][order]
        self._children_start = start

    def edge_thetas(self) -> np.ndarray:
        """Origin-angle between each node and its parent (0 for root edges)."""
        if self._edge_theta is None:
            rp = self.parent >= 0
            theta = np.zeros(len(self))
            pidx = self.parent[rp]
            theta[rp] = hgeom.angle_between_arrays(self.dirs[rp], self.dirs[pidx])
            self._edge_theta = theta
        return self._edge_theta


@dataclass(frozen=True, eq=False)
class LevelCrossing:
    """Crossing of an edge with the sphere S(level), as the pair (edge, t)."""

    edge_child: int
    t: float
    level: float
    point: PolarPoint


@dataclass(frozen=True, eq=False)
class DeviationRecord:
    """CFD/MBD values attached to a level crossing at radius crossing.level."""

    level_r: float
    crossing: LevelCrossing
    cfd: float
    mbd: float


@dataclass(eq=False)
class ValidationReport:
    violations: list
    max_degree: int

    @property
    def ok(self) -> bool:
        return not self.violations


# ---------------------------------------------------------------------------
# construction


def _polar_dist_block(radii, dirs, sh):
    def dist_block(i, js):
        # direction term from the difference vector: 2 - 2<u,u'> cancels badly
        du2 = np.sum((dirs[js] - dirs[i]) ** 2, axis=1)
        s = 2.0 * np.sinh((radii[i] - radii[js]) / 2.0) ** 2 + 0.5 * du2 * sh[i] * sh[js]
        return hgeom.stable_arccosh1p(s)

    return dist_block


def build(cloud: PointCloud) -> RadialTree:
    """Radius-sorted pruned construction; identical to the O(n^2) oracle.

    The scan over candidates of smaller radius stops once |r - r'| exceeds
    the best distance found, valid since d(z, z') >= |r - r'|.
    """
    radii, dirs = cloud.radii, cloud.dirs
    sh = np.sinh(radii)
    parent, pdist = search.nearest_lower(
        radii, _polar_dist_block(radii, dirs, sh), root_dist=radii
    )
    return RadialTree(cloud, parent, pdist)


def brute_force_parents(cloud: PointCloud) -> np.ndarray:
    """O(n^2) parent assignment straight from the definition (test oracle)."""
    radii, dirs = cloud.radii, cloud.dirs
    n = len(cloud)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    sh = np.sinh(radii)
    dist = np.empty((n, n))
    chunk = max(1, 2**22 // max(n, 1))
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        du2 = np.sum((dirs[lo:hi, None, :] - dirs[None, :, :]) ** 2, axis=2)
        s = (
            2.0 * np.sinh((radii[lo:hi, None] - radii[None, :]) / 2.0) ** 2
            + 0.5 * du2 * np.outer(sh[lo:hi], sh)
        )
        dist[lo:hi] = hgeom.stable_arccosh1p(s)
    parent, _ = search.nearest_lower_brute(radii, dist, root_dist=radii)
    return parent


# ---------------------------------------------------------------------------
# levels and trajectories


def _crossing_geometry(tree: RadialTree, children: np.ndarray, r: float):
    """Per straddling edge: (t, psi at the crossing, crossing directions)."""
    radii, dirs = tree.radii, tree.dirs
    rp = tree.parent_radii()[children]
    rc = radii[children]
    t = (r - rc) / (rp - rc)
    theta = tree.edge_thetas()[children]
    psi = np.zeros(children.shape[0])
    pos = theta > 1e-14
    if np.any(pos):
        idx = children[pos]
        psi[pos] = star_psi_arrays(radii[idx], rp[pos], theta[pos], t[pos])
    u1 = dirs[children]
    out = u1.copy()
    if np.any(pos):
        th = theta[pos]
        frac = psi[pos] / th
        u2 = dirs[tree.parent[children[pos]]]
        st = np.sin(th)
        out[pos] = (
            np.sin((1.0 - frac) * th)[:, None] * u1[pos] + np.sin(frac * th)[:, None] * u2
        ) / st[:, None]
    return t, psi, out


def _straddling_children(tree: RadialTree, r: float) -> np.ndarray:
    """Edges with parent radius <= r < child radius, by ascending child index."""
    radii = tree.radii
    k0 = int(np.searchsorted(radii, r, side="right"))
    above = np.arange(k0, len(tree))
    rp = tree.parent_radii()[above]
    return above[rp <= r]


def level_crossings(tree: RadialTree, r: float) -> list[LevelCrossing]:
    """One crossing per edge straddling S(r), multiplicity given by edges."""
    if not r > 0:
        raise GeometryError("level radius must be > 0")
    children = _straddling_children(tree, r)
    t, _, out = _crossing_geometry(tree, children, r)
    return [
        LevelCrossing(int(c), float(t[k]), r, PolarPoint(r, Direction(out[k])))
        for k, c in enumerate(children)
    ]


def trajectory(tree: RadialTree, i: int) -> list[int]:
    """Ancestor chain [i, A(i), ..., root]; the root appears as -1."""
    path = [int(i)]
    guard = len(tree) + 1
    while path[-1] != ROOT:
        path.append(int(tree.parent[path[-1]]))
        if len(path) > guard:
            raise GeometryError("parent pointers contain a cycle")
    return path


def _crossing_on_edge(tree: RadialTree, child: int, r: float) -> LevelCrossing:
    arr = np.array([child])
    t, _, out = _crossing_geometry(tree, arr, r)
    return LevelCrossing(int(child), float(t[0]), r, PolarPoint(r, Direction(out[0])))


def ancestor_at_level(tree: RadialTree, c: LevelCrossing, r: float) -> LevelCrossing:
    """Unique crossing of the trajectory through c with the sphere S(r), r <= level."""
    if r > c.level:
        raise GeometryError(f"ancestor level {r} above crossing level {c.level}")
    if not r > 0:
        raise GeometryError("ancestor level must be > 0")
    if r == c.level:
        return c
    v = c.edge_child
    while True:
        rp = tree.parent_radius(v)
        if rp <= r:
            return _crossing_on_edge(tree, v, r)
        v = int(tree.parent[v])


def descendants_at_level(tree: RadialTree, c: LevelCrossing, r_prime: float) -> list[LevelCrossing]:
    """All crossings at S(r_prime) whose trajectory passes through c."""
    if r_prime < c.level:
        raise GeometryError("descendant level below crossing level")
    radii = tree.radii
    out = []
    stack = [c.edge_child]
    while stack:
        w = stack.pop()
        if radii[w] > r_prime:
            out.append(w)
        else:
            stack.extend(int(x) for x in tree.children_of(w))
    out.sort()
    return [_crossing_on_edge(tree, w, r_prime) for w in out]


# ---------------------------------------------------------------------------
# angular deviations


def _psi_at(tree: RadialTree, child: int, r: float) -> float:
    """Angle from the child direction of the star-path point at radius r."""
    rp = tree.parent_radius(child)
    rc = float(tree.radii[child])
    theta = float(tree.edge_thetas()[child])
    if theta < 1e-14:
        return 0.0
    t = (r - rc) / (rp - rc)
    return float(star_psi_arrays(rc, rp, theta, t))


def cfd(tree: RadialTree, r: float, c: LevelCrossing) -> float:
    """Cumulative forward angular deviation of crossing c down to level r.

    Single origin-angle when both crossings share an edge; otherwise the sum
    of the partial angle to the edge's parent endpoint, the full edge angles
    along the trajectory, and the partial angle on the ancestor's edge.
    """
    if r > c.level:
        raise GeometryError("cfd requires r <= crossing level")
    anc = ancestor_at_level(tree, c, r)
    if anc.edge_child == c.edge_child:
        return abs(_psi_at(tree, c.edge_child, c.level) - _psi_at(tree, c.edge_child, r))
    theta = tree.edge_thetas()
    total = abs(float(theta[c.edge_child]) - _psi_at(tree, c.edge_child, c.level))
    w = int(tree.parent[c.edge_child])
    while w != anc.edge_child:
        total += float(theta[w])
        w = int(tree.parent[w])
    total += _psi_at(tree, anc.edge_child, r)
    return total


def mbd(tree: RadialTree, c: LevelCrossing, r_prime: float) -> float:
    """Maximal backward deviation sup over levels in [c.level, r_prime].

    Evaluated at the vertices of the descendant subtree in (level, r_prime]
    plus the crossings at r_prime: along a star-path edge the angular
    coordinate is monotone for the edge angles an RST produces, so per-edge
    suprema sit at edge endpoints or the cut.
    """
    if r_prime < c.level:
        raise GeometryError("mbd requires r_prime >= crossing level")
    radii = tree.radii
    theta = tree.edge_thetas()
    best = 0.0
    # vertex terms accumulate edge angles from the crossing outward; the CFD
    # at the crossing's own child is the on-edge angle psi
    stack = [(c.edge_child, _psi_at(tree, c.edge_child, c.level))]
    while stack:
        w, acc = stack.pop()
        if radii[w] > r_prime:
            continue
        best = max(best, acc)
        for x in tree.children_of(w):
            stack.append((int(x), acc + float(theta[x])))
    for cross in descendants_at_level(tree, c, r_prime):
        best = max(best, cfd(tree, c.level, cross))
    return best


@dataclass(eq=False)
class LevelSweep:
    """Vectorized deviation summary for all crossings of S(r0), cut at r1."""

    r0: float
    r1: float
    children: np.ndarray      # child index of each straddling edge, ascending
    t: np.ndarray
    psi0: np.ndarray
    cross_dirs: np.ndarray    # (m, d+1) crossing directions
    mbd: np.ndarray           # per-crossing MBD over [r0, r1]
    r1_children: np.ndarray   # edges straddling r1
    r1_cfd: np.ndarray        # CFD_{r0}^{r1} of each r1 crossing
    r1_anc: np.ndarray        # index into `children` of the r0 ancestor


def deviation_sweep(tree: RadialTree, r0: float, r1: float) -> LevelSweep:
    """One pass computing MBD_{r0}^{r1} for every crossing of S(r0).

    cum[i] holds the CFD from the r0 crossing to vertex i for every node in
    the descendant forest; per-crossing maxima over vertex terms and r1-cut
    terms realize the supremum.
    """
    if not 0 < r0 <= r1:
        raise GeometryError("need 0 < r0 <= r1")
    key = (float(r0), float(r1))
    cached = tree._sweep_cache.get(key)
    if cached is not None:
        return cached
    radii = tree.radii
    n = len(tree)
    theta = tree.edge_thetas()
    parent = tree.parent
    k0 = int(np.searchsorted(radii, r0, side="right"))
    above = np.arange(k0, n)
    rp_all = tree.parent_radii()
    children = above[rp_all[above] <= r0]
    t0, psi0, cross_dirs = _crossing_geometry(tree, children, r0)
    m = children.shape[0]
    cross_index = np.full(n, -1, dtype=np.int64)
    cross_index[children] = np.arange(m)

    cum = np.zeros(n)
    crossid = np.full(n, -1, dtype=np.int64)
    parent_list = parent.tolist()
    radii_list = radii.tolist()
    theta_list = theta.tolist()
    cum_l = cum.tolist()
    crossid_l = crossid.tolist()
    psi0_l = psi0.tolist()
    cross_index_l = cross_index.tolist()
    for i in range(k0, n):
        p = parent_list[i]
        if p == ROOT or radii_list[p] <= r0:
            cid = cross_index_l[i]
            crossid_l[i] = cid
            cum_l[i] = psi0_l[cid]
        else:
            crossid_l[i] = crossid_l[p]
            cum_l[i] = cum_l[p] + theta_list[i]
    cum = np.array(cum_l)
    crossid = np.array(crossid_l, dtype=np.int64)

    mbd_arr = np.zeros(m)
    in_range = above[radii[above] <= r1]
    if in_range.size:
        np.maximum.at(mbd_arr, crossid[in_range], cum[in_range])
    # r1-cut terms on edges spanning past r1
    cut = above[(radii[above] > r1) & (rp_all[above] <= r1)]
    if cut.size:
        rc = radii[cut]
        rp = rp_all[cut]
        t1 = (r1 - rc) / (rp - rc)
        th = theta[cut]
        psi1 = np.zeros(cut.shape[0])
        pos = th > 1e-14
        if np.any(pos):
            psi1[pos] = star_psi_arrays(rc[pos], rp[pos], th[pos], t1[pos])
        same_edge = rp <= r0
        cfd1 = np.empty(cut.shape[0])
        if np.any(same_edge):
            own = cross_index[cut[same_edge]]
            cfd1[same_edge] = np.abs(psi1[same_edge] - psi0[own])
        other = ~same_edge
        if np.any(other):
            par = parent[cut[other]]
            cfd1[other] = cum[par] + np.abs(th[other] - psi1[other])
        cid_cut = crossid[cut]
        np.maximum.at(mbd_arr, cid_cut, cfd1)
        sweep_r1 = (cut, cfd1, cid_cut)
    else:
        sweep_r1 = (cut, np.empty(0), np.empty(0, dtype=np.int64))

    out = LevelSweep(
        r0=r0,
        r1=r1,
        children=children,
        t=t0,
        psi0=psi0,
        cross_dirs=cross_dirs,
        mbd=mbd_arr,
        r1_children=sweep_r1[0],
        r1_cfd=sweep_r1[1],
        r1_anc=sweep_r1[2],
    )
    if len(tree._sweep_cache) > 64:
        tree._sweep_cache.clear()
    tree._sweep_cache[key] = out
    return out


def deviation_records(tree: RadialTree, r0: float, r1: float) -> list[DeviationRecord]:
    """One record per crossing at r1: its CFD back to r0, and the MBD of its
    r0 ancestor over [r0, r1]."""
    sweep = deviation_sweep(tree, r0, r1)
    records = []
    for k, child in enumerate(sweep.r1_children):
        cross = _crossing_on_edge(tree, int(child), r1)
        anc = int(sweep.r1_anc[k])
        records.append(
            DeviationRecord(
                level_r=r0,
                crossing=cross,
                cfd=float(sweep.r1_cfd[k]),
                mbd=float(sweep.mbd[anc]),
            )
        )
    return records


def records_to_csv(records: list[DeviationRecord]) -> str:
    lines = ["r0,rprime,crossing_id,cfd,mbd"]
    for rec in records:
        lines.append(
            f"{rec.level_r!r},{rec.crossing.level!r},{rec.crossing.edge_child},"
            f"{rec.cfd!r},{rec.mbd!r}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation and planarity


def validate(tree: RadialTree, recheck_block: int = 512) -> ValidationReport:
    """Check radial monotonicity, connectivity, acyclicity, the defining
    empty-B+ property of every parent link, and finite degrees."""
    violations = []
    n = len(tree)
    radii, dirs = tree.radii, tree.dirs
    parent = tree.parent
    rp = tree.parent_radii()
    bad = np.nonzero((parent >= 0) & (rp >= radii))[0]
    for i in bad[:20]:
        violations.append(f"node {i}: parent radius {rp[i]} >= radius {radii[i]}")
    if np.any(parent == search.FRONTIER):
        violations.append("tree contains frontier markers")
    # connectivity to the root without cycles
    state = np.zeros(n, dtype=np.int8)  # 0 unknown, 1 reaches root
    for i in range(n):
        path = []
        v = i
        while v != ROOT and state[v] == 0:
            path.append(v)
            state[v] = 2
            v = int(parent[v])
            if v != ROOT and state[v] == 2:
                violations.append(f"cycle through node {v}")
                break
        for w in path:
            state[w] = 1
    # defining property: no cloud point strictly closer than the parent
    sh = np.sinh(radii)
    dist_block = _polar_dist_block(radii, dirs, sh)
    true_dist = np.where(parent >= 0, 0.0, radii)
    has_parent = np.nonzero(parent >= 0)[0]
    for i in has_parent:
        true_dist[i] = float(dist_block(int(i), np.array([parent[i]]))[0])
    check_parent, check_dist = search.nearest_lower(radii, dist_block, root_dist=radii)
    worse = np.nonzero(check_dist < true_dist - 1e-12)[0]
    for i in worse[:20]:
        violations.append(
            f"node {i}: point {check_parent[i]} at {check_dist[i]} inside "
            f"B+(z, {true_dist[i]})"
        )
    tree._ensure_children()
    degrees = np.diff(tree._children_start)
    max_degree = int(degrees.max()) if n else 0
    return ValidationReport(violations=violations, max_degree=max_degree)


def _edge_angular_intervals(tree: RadialTree):
    """Angular interval [start, start+width] swept by each geodesic edge (d=1)."""
    dirs = tree.dirs
    alpha = np.arctan2(dirs[:, 1], dirs[:, 0])
    theta = tree.edge_thetas()
    parent = tree.parent
    has = parent >= 0
    cross = np.zeros(len(tree))
    pidx = parent[has]
    cross[has] = dirs[has, 0] * dirs[pidx, 1] - dirs[has, 1] * dirs[pidx, 0]
    start = np.where(cross >= 0, alpha, alpha - theta)
    start = np.mod(start, 2.0 * math.pi)
    return start, theta


def planarity_check(tree: RadialTree) -> int:
    """Count proper crossings between geodesic edges [z, A(z)] in the disc.

    Geodesics are chords in the Klein model, so the test reduces to segment
    intersection; edges are prefiltered by their angular intervals (the
    angular coordinate is monotone along a geodesic not through the origin).
    """
    if tree.cloud.config.d != 1:
        raise GeometryError("planarity is defined for d = 1 only")
    n = len(tree)
    if n < 2:
        return 0
    klein = np.tanh(tree.radii)[:, None] * tree.dirs
    parent = tree.parent
    a = klein
    b = np.where((parent >= 0)[:, None], klein[np.maximum(parent, 0)], 0.0)

    start, width = _edge_angular_intervals(tree)
    order = np.argsort(start, kind="stable")
    s_sorted = start[order]
    # duplicate the circle once so intervals crossing 2*pi see early starts
    s_ext = np.concatenate([s_sorted, s_sorted + 2.0 * math.pi])
    idx_ext = np.concatenate([order, order])
    lo = np.searchsorted(s_ext, start, side="left")
    hi = np.searchsorted(s_ext, start + width, side="right")
    counts = hi - lo
    edge_i = np.repeat(np.arange(n), counts)
    ragged = np.concatenate([np.arange(a_, b_) for a_, b_ in zip(lo, hi)]) if counts.sum() else np.empty(0, dtype=int)
    edge_j = idx_ext[ragged]
    keep = edge_i != edge_j
    pi_ = np.minimum(edge_i[keep], edge_j[keep])
    pj_ = np.maximum(edge_i[keep], edge_j[keep])
    pairs = np.unique(pi_ * n + pj_)
    pi_ = pairs // n
    pj_ = pairs % n
    # drop pairs sharing a vertex (adjacent edges meet at endpoints by design)
    share = (
        (parent[pi_] == pj_)
        | (parent[pj_] == pi_)
        | ((parent[pi_] == parent[pj_]) & (parent[pi_] != ROOT))
        | ((parent[pi_] == ROOT) & (parent[pj_] == ROOT))
    )
    pi_, pj_ = pi_[~share], pj_[~share]
    if pi_.size == 0:
        return 0

    def orient(p, q, r):
        return (q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (q[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0])

    a1, b1 = a[pi_], b[pi_]
    a2, b2 = a[pj_], b[pj_]
    d1 = orient(a1, b1, a2)
    d2 = orient(a1, b1, b2)
    d3 = orient(a2, b2, a1)
    d4 = orient(a2, b2, b1)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    return int(np.count_nonzero(proper))


# ---------------------------------------------------------------------------
# serialization


def tree_to_json(tree: RadialTree) -> str:
    cfg = tree.cloud.config
    return json.dumps(
        {
            "cloud_ref": {
                "d": cfg.d,
                "lambda": cfg.lam,
                "R": cfg.R,
                "seed": cfg.seed,
                "n": len(tree),
            },
            "parent": [int(p) for p in tree.parent],
        },
        sort_keys=True,
    )
