"""Pruned nearest-candidate search shared by the RST and DSF builders.

Points are sorted by a key (distance to the tree origin, or minus the log
ordinate for the forest) and each point picks its nearest neighbor among
those with a strictly smaller key. Pruning relies on d(z, z') >= |key(z) -
key(z')|, which holds whenever the key is 1-Lipschitz for the metric.
"""

from __future__ import annotations

import numpy as np

ROOT = -1
FRONTIER = -2

_BLOCK = 512


def nearest_lower(keys: np.ndarray, dist_block, root_dist=None, block: int = _BLOCK):
    """Parent of each point among points with strictly smaller key.

    keys: (n,) sorted ascending.
    dist_block(i, js): distances from point i to candidate indices js.
    root_dist: optional (n,) distances to a virtual root that always competes;
        when None, points with no candidate are marked FRONTIER.

    Ties prefer the lowest candidate index, and a point beats the root at
    equal distance. Returns (parent, parent_dist); parent_dist is +inf for
    frontier points.
    """
    n = keys.shape[0]
    parent = np.full(n, FRONTIER, dtype=np.int64)
    pdist = np.full(n, np.inf)
    for i in range(n):
        if root_dist is not None:
            best = float(root_dist[i])
            bestj = ROOT
        else:
            best = np.inf
            bestj = FRONTIER
        hi = int(np.searchsorted(keys, keys[i], side="left"))
        while hi > 0:
            lo = int(np.searchsorted(keys, keys[i] - best, side="left")) if np.isfinite(best) else 0
            if hi <= lo:
                break
            lo_blk = max(lo, hi - block)
            js = np.arange(lo_blk, hi)
            dist = dist_block(i, js)
            k = int(np.argmin(dist))
            # scan runs from high to low index, so <= leaves the lowest index
            if dist[k] <= best:
                best = float(dist[k])
                bestj = int(js[k])
            hi = lo_blk
        parent[i] = bestj
        pdist[i] = best
    return parent, pdist


def nearest_lower_brute(keys: np.ndarray, dist_matrix: np.ndarray, root_dist=None):
    """O(n^2) oracle with the same candidate rule and tie-breaking."""
    n = keys.shape[0]
    parent = np.full(n, FRONTIER, dtype=np.int64)
    pdist = np.full(n, np.inf)
    for i in range(n):
        cand = np.nonzero(keys < keys[i])[0]
        best = float(root_dist[i]) if root_dist is not None else np.inf
        bestj = ROOT if root_dist is not None else FRONTIER
        if cand.size:
            d = dist_matrix[i, cand]
            k = int(np.argmin(d))
            if d[k] <= best:
                best = float(d[k])
                bestj = int(cand[k])
        parent[i] = bestj
        pdist[i] = best
    return parent, pdist
