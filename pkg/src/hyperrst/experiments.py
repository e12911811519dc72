"""Seeded Monte Carlo experiments probing the structural claims at desk scale.

Each experiment is a deterministic function of its configuration: replica
clouds come from counter-based streams keyed by (seed, replica), probe
directions and bootstrap resampling from fixed side streams. Reports carry
per-cell estimates with standard errors and, where an exponent is probed,
an OLS log-slope with a replica-bootstrap confidence interval.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import dsf, hgeom, rst, sampler
from .hgeom import GeometryError
from .sampler import CloudConfig, HalfWindow

N_PROBES = 16
GOOD_PROBES = 8
BOOT_SAMPLES = 800
BPLUS_SAMPLES = 40_000
COUPLING_MARGIN = 1.5
TREE_CACHE_MAX = 128

DEFAULT_SEED = 20240811


@dataclass(frozen=True)
class ExperimentConfig:
    base: CloudConfig
    replicas: int = 100
    r0_grid: tuple = (1.5, 2.0, 2.5, 3.0, 3.5)
    p: float = 2.0
    A: float = 3.0
    delta: float = 0.3
    theta: float = 0.5
    a: float = 1.0
    h_grid: tuple = (2.0, 4.0, 6.0, 8.0, 10.0)
    output_path: str = "."

    def __post_init__(self):
        if self.replicas < 1:
            raise GeometryError("replicas must be >= 1")
        if not self.r0_grid:
            raise GeometryError("r0_grid must be nonempty")
        if any(not 0 < r < self.base.R for r in self.r0_grid):
            raise GeometryError("r0_grid must lie inside (0, R)")
        if self.p < 1:
            raise GeometryError("p must be >= 1")


def default_config(seed: int = DEFAULT_SEED, **overrides) -> ExperimentConfig:
    """Desk-scale defaults: d=1, lambda=30, R=5, 100 replicas."""
    base = CloudConfig(d=1, lam=30.0, R=5.0, seed=seed)
    return replace(ExperimentConfig(base=base), **overrides)


@dataclass(frozen=True)
class Cell:
    params: dict
    estimate: float
    stderr: float
    n: int


@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    r2: float
    ci_lo: float
    ci_hi: float


@dataclass(eq=False)
class StatReport:
    experiment: str
    seed: int
    replicas: int
    cells: list
    fit: Fit | None = None
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# shared machinery


_TREE_CACHE: dict = {}


def tree_for(base: CloudConfig, replica: int) -> rst.RadialTree:
    """Build-once cache keyed by (config, replica); experiments sharing a base
    configuration reuse the same trees."""
    key = (base.d, base.lam, base.R, base.seed, replica)
    tree = _TREE_CACHE.get(key)
    if tree is None:
        tree = rst.build(sampler.sample_ball(base, replica))
        while len(_TREE_CACHE) >= TREE_CACHE_MAX:
            _TREE_CACHE.pop(next(iter(_TREE_CACHE)))
        _TREE_CACHE[key] = tree
    return tree


def clear_tree_cache():
    _TREE_CACHE.clear()


def probe_directions(d: int, k: int, seed: int) -> np.ndarray:
    """Deterministic probe directions on S^d; equally spaced for d = 1."""
    if d == 1:
        ang = 2.0 * math.pi * np.arange(k) / k
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    rng = sampler.stream(seed, 0, "probes")
    g = rng.normal(size=(k, d + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _num_workers() -> int:
    env = os.environ.get("HYPERRST_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _replica_values(worker, cfg: ExperimentConfig) -> np.ndarray:
    """(replicas, cells) matrix of per-replica values, computed in order."""
    workers = _num_workers()
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(worker, [(cfg, r) for r in range(cfg.replicas)]))
    else:
        rows = [worker((cfg, r)) for r in range(cfg.replicas)]
    return np.asarray(rows, dtype=float)


def _mean_cells(values: np.ndarray, param_name: str, grid) -> list:
    means = values.mean(axis=0)
    if values.shape[0] > 1:
        ses = values.std(axis=0, ddof=1) / math.sqrt(values.shape[0])
    else:
        ses = np.zeros(values.shape[1])
    return [
        Cell(params={param_name: float(g)}, estimate=float(means[k]), stderr=float(ses[k]), n=values.shape[0])
        for k, g in enumerate(grid)
    ]


def ols_loglinear(xs: np.ndarray, means: np.ndarray) -> tuple:
    """OLS of log(means) on xs; returns (slope, intercept, r2)."""
    y = np.log(means)
    xbar, ybar = xs.mean(), y.mean()
    sxx = np.sum((xs - xbar) ** 2)
    slope = float(np.sum((xs - xbar) * (y - ybar)) / sxx)
    intercept = float(ybar - slope * xbar)
    resid = y - (intercept + slope * xs)
    sstot = float(np.sum((y - ybar) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / sstot if sstot > 0 else 1.0
    return slope, intercept, r2


def bootstrap_fit(values: np.ndarray, xs, seed: int) -> Fit | None:
    """Point OLS log-slope plus a replica-bootstrap percentile CI."""
    xs = np.asarray(xs, dtype=float)
    means = values.mean(axis=0)
    if np.any(means <= 0):
        return None
    slope, intercept, r2 = ols_loglinear(xs, means)
    reps = values.shape[0]
    rng = sampler.stream(seed, 0, "bootstrap")
    idx = rng.integers(0, reps, size=(BOOT_SAMPLES, reps))
    boot_means = values[idx].mean(axis=1)  # (B, cells)
    boot_means = np.maximum(boot_means, 1e-300)
    y = np.log(boot_means)
    xc = xs - xs.mean()
    slopes = (y @ xc) / np.sum(xc**2)
    lo, hi = np.percentile(slopes, [2.5, 97.5])
    return Fit(slope=slope, intercept=intercept, r2=r2, ci_lo=float(lo), ci_hi=float(hi))


def r_prime(cfg: ExperimentConfig) -> float:
    """Finite-window surrogate for 'level infinity': all MBDs are cut at
    R - 0.5, where descendant sets are still exact."""
    return cfg.base.R - 0.5


def _check_interior_grid(cfg: ExperimentConfig):
    if any(not 1.0 < r < cfg.base.R - 1.0 for r in cfg.r0_grid):
        raise GeometryError("r0_grid must stay inside (1, R-1), away from the window boundary")


def _ball_sums(sweep: rst.LevelSweep, probes: np.ndarray, aperture: float, p: float) -> float:
    """Mean over probes of sum of MBD^p over crossings within the angular ball."""
    if sweep.children.size == 0:
        return 0.0
    cosap = math.cos(min(aperture, math.pi))
    member = sweep.cross_dirs @ probes.T >= cosap  # (m, k)
    return float(np.sum((sweep.mbd**p)[:, None] * member) / probes.shape[0])


# ---------------------------------------------------------------------------
# experiments


def _rep_straightness(args):
    cfg, replica = args
    tree = tree_for(cfg.base, replica)
    rp = r_prime(cfg)
    out = []
    for r0 in cfg.r0_grid:
        sweep = rst.deviation_sweep(tree, r0, rp)
        out.append(float(sweep.mbd.max()) if sweep.mbd.size else 0.0)
    return np.array(out)


def exp_straightness(cfg: ExperimentConfig) -> StatReport:
    """E[max MBD_{r0}^{R'} over the level] against r0; the straightness
    picture predicts log-slope near -1."""
    _check_interior_grid(cfg)
    values = _replica_values(_rep_straightness, cfg)
    cells = _mean_cells(values, "r0", cfg.r0_grid)
    fit = bootstrap_fit(values, cfg.r0_grid, cfg.base.seed)
    return StatReport(
        experiment="straightness",
        seed=cfg.base.seed,
        replicas=cfg.replicas,
        cells=cells,
        fit=fit,
        extra={"r_prime": r_prime(cfg)},
    )


def _rep_mbd_moment(args):
    cfg, replica = args
    tree = tree_for(cfg.base, replica)
    rp = r_prime(cfg)
    probes = probe_directions(cfg.base.d, N_PROBES, cfg.base.seed)
    out = []
    for r0 in cfg.r0_grid:
        sweep = rst.deviation_sweep(tree, r0, rp)
        out.append(_ball_sums(sweep, probes, cfg.A * math.exp(-r0), cfg.p))
    return np.array(out)


def exp_mbd_moment(cfg: ExperimentConfig) -> StatReport:
    """E[sum MBD^p over crossings within angle A e^{-r0}]; the global
    fluctuation bound predicts log-slope near -p."""
    _check_interior_grid(cfg)
    values = _replica_values(_rep_mbd_moment, cfg)
    cells = _mean_cells(values, "r0", cfg.r0_grid)
    fit = bootstrap_fit(values, cfg.r0_grid, cfg.base.seed)
    return StatReport(
        experiment="mbd_moment",
        seed=cfg.base.seed,
        replicas=cfg.replicas,
        cells=cells,
        fit=fit,
        extra={"p": cfg.p, "A": cfg.A, "r_prime": r_prime(cfg)},
    )


def _rep_annulus(args):
    cfg, replica = args
    tree = tree_for(cfg.base, replica)
    probes = probe_directions(cfg.base.d, N_PROBES, cfg.base.seed)
    out = []
    for r0 in cfg.r0_grid:
        sweep = rst.deviation_sweep(tree, r0, r0 + cfg.delta)
        out.append(_ball_sums(sweep, probes, cfg.theta, cfg.p))
    return np.array(out)


def exp_annulus(cfg: ExperimentConfig) -> StatReport:
    """E[sum MBD_r^{r+delta}^p over a fixed-aperture ball] against r; the
    annulus bound predicts log-slope near d - p."""
    _check_interior_grid(cfg)
    if not cfg.delta > 0:
        raise GeometryError("delta must be > 0")
    values = _replica_values(_rep_annulus, cfg)
    cells = _mean_cells(values, "r", cfg.r0_grid)
    fit = bootstrap_fit(values, cfg.r0_grid, cfg.base.seed)
    return StatReport(
        experiment="annulus",
        seed=cfg.base.seed,
        replicas=cfg.replicas,
        cells=cells,
        fit=fit,
        extra={"p": cfg.p, "delta": cfg.delta, "theta": cfg.theta},
    )


def good_point_grid(cfg: ExperimentConfig) -> list:
    """(A, delta) cells spanning informative void probabilities."""
    return [
        (a_, d_)
        for a_ in (cfg.A / 4.0, cfg.A / 2.0, cfg.A)
        for d_ in (cfg.delta / 10.0, cfg.delta / 3.0)
    ]


def good_point_benchmark(cfg: ExperimentConfig, r0: float, a_: float, d_: float) -> float:
    """Poisson void probability e^{-lam V1} (1 - e^{-lam V2}); the regions are
    disjoint so the product form is exact."""
    d = cfg.base.d
    lam = cfg.base.lam
    v1 = hgeom.cone_shell_volume(d, min(3.0 * a_ * math.exp(-r0), math.pi), r0, r0 + d_)
    v2 = hgeom.cone_shell_volume(d, min(a_ * math.exp(-r0), math.pi), r0 - 1.0, r0)
    return math.exp(-lam * v1) * (1.0 - math.exp(-lam * v2))


def _rep_good_points(args):
    cfg, replica = args
    cloud = sampler.sample_ball(cfg.base, replica)
    r0 = float(np.median(cfg.r0_grid))
    probes = probe_directions(cfg.base.d, GOOD_PROBES, cfg.base.seed)
    radii, dirs = cloud.radii, cloud.dirs
    dots = dirs @ probes.T
    out = []
    for a_, d_ in good_point_grid(cfg):
        shell1 = (radii >= r0) & (radii < r0 + d_)
        shell2 = (radii >= r0 - 1.0) & (radii < r0)
        cos1 = math.cos(min(3.0 * a_ * math.exp(-r0), math.pi))
        cos2 = math.cos(min(a_ * math.exp(-r0), math.pi))
        occupied1 = np.any(shell1[:, None] & (dots >= cos1), axis=0)
        occupied2 = np.any(shell2[:, None] & (dots >= cos2), axis=0)
        good = ~occupied1 & occupied2
        out.append(float(good.mean()))
    return np.array(out)


def exp_good_points(cfg: ExperimentConfig) -> StatReport:
    """Empirical good-point frequency against the analytic Poisson void
    benchmark; disagreement beyond noise indicates a geometry or sampling bug."""
    r0 = float(np.median(cfg.r0_grid))
    grid = good_point_grid(cfg)
    values = _replica_values(_rep_good_points, cfg)
    means = values.mean(axis=0)
    emp_se = (
        values.std(axis=0, ddof=1) / math.sqrt(cfg.replicas)
        if cfg.replicas > 1
        else np.zeros(len(grid))
    )
    cells = []
    zs = []
    for k, (a_, d_) in enumerate(grid):
        bench = good_point_benchmark(cfg, r0, a_, d_)
        se = max(float(emp_se[k]), math.sqrt(bench * (1.0 - bench) / cfg.replicas))
        z = abs(float(means[k]) - bench) / se if se > 0 else (0.0 if means[k] == bench else math.inf)
        zs.append(z)
        cells.append(
            Cell(
                params={"A": a_, "delta": d_, "benchmark": bench, "z": z},
                estimate=float(means[k]),
                stderr=float(se),
                n=cfg.replicas,
            )
        )
    return StatReport(
        experiment="good_points",
        seed=cfg.base.seed,
        replicas=cfg.replicas,
        cells=cells,
        fit=None,
        extra={"r0": r0, "max_z": max(zs)},
    )


def _rep_level_counts(args):
    cfg, replica = args
    tree = tree_for(cfg.base, replica)
    probes = probe_directions(cfg.base.d, N_PROBES, cfg.base.seed)
    out = []
    for r0 in cfg.r0_grid:
        children = rst._straddling_children(tree, r0)
        if children.size == 0:
            out.append(0.0)
            continue
        _, _, cross_dirs = rst._crossing_geometry(tree, children, r0)
        cosap = math.cos(min(math.exp(-r0), math.pi))
        counts = np.sum(cross_dirs @ probes.T >= cosap, axis=0)
        out.append(float(np.mean(counts.astype(float) ** cfg.p)))
    return np.array(out)


def exp_level_counts(cfg: ExperimentConfig) -> StatReport:
    """E[#(L_r in an e^{-r}-ball)^p]; the count moments stay bounded in r."""
    values = _replica_values(_rep_level_counts, cfg)
    cells = _mean_cells(values, "r0", cfg.r0_grid)
    fit = bootstrap_fit(values, cfg.r0_grid, cfg.base.seed)
    means = values.mean(axis=0)
    ratio = float(means.max() / means.min()) if np.all(means > 0) else math.inf
    return StatReport(
        experiment="level_counts",
        seed=cfg.base.seed,
        replicas=cfg.replicas,
        cells=cells,
        fit=fit,
        extra={"p": cfg.p, "max_over_min": ratio},
    )


def bplus_grid(cfg: ExperimentConfig) -> list:
    rs = [r for r in (1.5, 2.5, 3.5) if r < cfg.base.R]
    rhos = (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 7.0)
    return [(r, rho) for r in rs for rho in rhos]


def _bplus_cell(cfg: ExperimentConfig, r: float, rho: float, cell_id: int):
    """Monte Carlo rejection estimate of Vol(B+(z, rho)) for z at radius r.

    Uniform points in B(z, rho) come from sampling B(0, rho) and boosting the
    origin onto z; acceptance tests radius < r.
    """
    d = cfg.base.d
    rng = sampler.stream(cfg.base.seed, cell_id, "bplus")
    u01 = rng.uniform(size=BPLUS_SAMPLES)
    if d == 1:
        rad = np.arccosh(1.0 + u01 * (math.cosh(rho) - 1.0))
    else:
        rad = sampler._radial_inverter(d, rho)(u01)
    g = rng.normal(size=(BPLUS_SAMPLES, d + 1))
    dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
    axis = np.zeros(d + 1)
    axis[0] = 1.0
    new_r, _ = hgeom.boost_from_origin(r, axis, rad, dirs)
    frac = float(np.mean(new_r < r))
    total = hgeom.ball_volume(d, rho)
    se = total * math.sqrt(max(frac * (1.0 - frac), 1e-12) / BPLUS_SAMPLES)
    return frac * total, se


def exp_bplus_volume(cfg: ExperimentConfig) -> StatReport:
    """Vol(B+(z, rho)) over a grid of (r, rho); the volume bound predicts the
    log-volume to grow at rate at least d/2 in (rho ^ r)."""
    grid = bplus_grid(cfg)
    cells = []
    xs = []
    logs = []
    for k, (r, rho) in enumerate(grid):
        vol, se = _bplus_cell(cfg, r, rho, k)
        cells.append(
            Cell(params={"r": r, "rho": rho, "min_rho_r": min(rho, r)}, estimate=vol, stderr=se, n=BPLUS_SAMPLES)
        )
        if vol > 0:
            xs.append(min(rho, r))
            logs.append(vol)
    slope, intercept, r2 = ols_loglinear(np.array(xs), np.array(logs))
    fit = Fit(slope=slope, intercept=intercept, r2=r2, ci_lo=slope, ci_hi=slope)
    return StatReport(
        experiment="bplus_volume",
        seed=cfg.base.seed,
        replicas=1,
        cells=cells,
        fit=fit,
        extra={"d_half": cfg.base.d / 2.0, "samples": BPLUS_SAMPLES},
    )


def coupling_window(cfg: ExperimentConfig) -> HalfWindow:
    """Window containing Cyl'(A, a) with a COUPLING_MARGIN-deep collar so that
    parent search balls of K-points stay inside."""
    m = COUPLING_MARGIN
    return HalfWindow(
        half_width=cfg.A + 1.5 * math.sinh(m) + 0.1,
        y_min=0.5 * math.exp(-cfg.a) * math.exp(-m) * 0.95,
        y_max=1.5 * math.exp(m) * 1.05,
    )


def _rep_coupling(args):
    cfg, replica = args
    w = coupling_window(cfg)
    x, y = sampler.sample_half_arrays(cfg.base.lam, cfg.base.d, w, cfg.base.seed, replica)
    forest = dsf.build_dsf((x, y))
    K = dsf.RegionSpec("Cyl'", A=cfg.A, a=cfg.a)
    out = []
    for h in cfg.h_grid:
        frac, count = dsf.coupling_fraction((x, y), w, K, h, dsf_forest=forest)
        out.append(frac)
    return np.array(out)


def exp_coupling(cfg: ExperimentConfig) -> StatReport:
    """Agreement fraction between RST(h) and DSF parents on Cyl'(A, a),
    across h; the coupling sends it to 1 as h grows."""
    if not cfg.h_grid:
        raise GeometryError("h_grid must be nonempty")
    values = _replica_values(_rep_coupling, cfg)
    cells = _mean_cells(values, "h", cfg.h_grid)
    means = values.mean(axis=0)
    first_above = next((float(h) for h, mean in zip(cfg.h_grid, means) if mean > 0.99), None)
    diffs = values[:, -1] - values[:, 0]
    se = diffs.std(ddof=1) / math.sqrt(len(diffs)) if len(diffs) > 1 else 0.0
    tstat = float(diffs.mean() / se) if se > 0 else math.inf
    report = StatReport(
        experiment="coupling",
        seed=cfg.base.seed,
        replicas=cfg.replicas,
        cells=cells,
        fit=None,
        extra={
            "K": {"kind": "Cyl'", "A": cfg.A, "a": cfg.a},
            "first_h_above_0.99": first_above,
            "monotone_means": bool(np.all(np.diff(means) > 0)),
            "increase_tstat": tstat,
        },
    )
    return report


def _rep_confinement(args):
    cfg, replica = args
    tree = tree_for(cfg.base, replica)
    h = float(np.median(cfg.r0_grid))
    rp = r_prime(cfg)
    sweep = rst.deviation_sweep(tree, h, rp)
    probes = probe_directions(cfg.base.d, N_PROBES, cfg.base.seed)
    out = []
    for scale in (0.5, 1.0, 2.0, 4.0):
        A = cfg.A * scale
        cosap = math.cos(min(2.0 * A * math.exp(-h), math.pi))
        bound = A * math.exp(-h)
        if sweep.children.size == 0:
            out.append(1.0)
            continue
        member = sweep.cross_dirs @ probes.T >= cosap  # (m, k)
        violating = sweep.mbd > bound
        ok = ~np.any(member & violating[:, None], axis=0)
        out.append(float(ok.mean()))
    return np.array(out)


def exp_confinement(cfg: ExperimentConfig) -> StatReport:
    """P[every crossing within angle 2A e^{-h} keeps MBD <= A e^{-h}] against
    A; the cylinder confinement drives it to 1 for large A."""
    values = _replica_values(_rep_confinement, cfg)
    scales = (0.5, 1.0, 2.0, 4.0)
    grid = [cfg.A * s for s in scales]
    cells = _mean_cells(values, "A", grid)
    means = values.mean(axis=0)
    return StatReport(
        experiment="confinement",
        seed=cfg.base.seed,
        replicas=cfg.replicas,
        cells=cells,
        fit=None,
        extra={
            "h": float(np.median(cfg.r0_grid)),
            "r_prime": r_prime(cfg),
            "nondecreasing": bool(np.all(np.diff(means) >= 0)),
        },
    )


def _rep_direction(args):
    cfg, replica = args
    tree = tree_for(cfg.base, replica)
    n = len(tree)
    if n == 0:
        return np.zeros(len(cfg.r0_grid))
    parent = tree.parent
    depth = np.zeros(n, dtype=np.int64)
    for i in range(n):
        p = parent[i]
        depth[i] = 1 if p == rst.ROOT else depth[p] + 1
    best = int(np.nonzero(depth == depth.max())[0][-1])
    path = rst.trajectory(tree, best)[:-1]  # drop the root sentinel
    path.reverse()  # root-side first, radii increasing
    radii = tree.radii[path]
    increments = hgeom.angle_between_arrays(tree.dirs[path[:-1]], tree.dirs[path[1:]])
    out = []
    for r in cfg.r0_grid:
        out.append(float(increments[radii[:-1] >= r].sum()))
    return np.array(out)


def exp_direction_convergence(cfg: ExperimentConfig) -> StatReport:
    """Tail angular variation of the deepest backward path beyond radius r;
    shrinking tails are the Cauchy surrogate of an asymptotic direction."""
    values = _replica_values(_rep_direction, cfg)
    cells = _mean_cells(values, "r", cfg.r0_grid)
    shrink = float(np.mean(values[:, -1] < values[:, 0]))
    return StatReport(
        experiment="direction_convergence",
        seed=cfg.base.seed,
        replicas=cfg.replicas,
        cells=cells,
        fit=None,
        extra={"fraction_tail_shrinks": shrink, "r_lo": cfg.r0_grid[0], "r_hi": cfg.r0_grid[-1]},
    )


EXPERIMENTS = {
    "straightness": exp_straightness,
    "mbd_moment": exp_mbd_moment,
    "annulus": exp_annulus,
    "good_points": exp_good_points,
    "level_counts": exp_level_counts,
    "bplus_volume": exp_bplus_volume,
    "coupling": exp_coupling,
    "confinement": exp_confinement,
    "direction_convergence": exp_direction_convergence,
}


# ---------------------------------------------------------------------------
# report serialization


def report_to_json(report: StatReport) -> str:
    obj = {
        "experiment": report.experiment,
        "seed": report.seed,
        "replicas": report.replicas,
        "cells": [
            {"params": c.params, "estimate": c.estimate, "stderr": c.stderr, "n": c.n}
            for c in report.cells
        ],
        "fit": None
        if report.fit is None
        else {
            "slope": report.fit.slope,
            "intercept": report.fit.intercept,
            "r2": report.fit.r2,
            "ci_lo": report.fit.ci_lo,
            "ci_hi": report.fit.ci_hi,
        },
        "extra": report.extra,
    }
    return json.dumps(obj, sort_keys=True)


def report_to_csv(report: StatReport) -> str:
    keys = sorted({k for c in report.cells for k in c.params})
    lines = [",".join(keys + ["estimate", "stderr", "n"])]
    for c in report.cells:
        row = [repr(float(c.params.get(k, math.nan))) for k in keys]
        row += [repr(float(c.estimate)), repr(float(c.stderr)), str(c.n)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_report(report: StatReport, out_dir: str) -> tuple:
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, f"{report.experiment}_{report.seed}")
    json_path = base + ".json"
    csv_path = base + ".csv"
    with open(json_path, "w") as fh:
        fh.write(report_to_json(report))
    with open(csv_path, "w") as fh:
        fh.write(report_to_csv(report))
    return json_path, csv_path
