"""Command line entry point: sampling, tree building, analysis, rendering.

Exit codes: 0 success, 2 configuration error, 3 runtime failure. The resolved
configuration (seed included) is echoed to stderr for reproducibility.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace

from . import dsf, experiments, render, rst, sampler
from .hgeom import GeometryError
from .sampler import CloudConfig, HalfWindow

CONFIG_KEYS = {
    "d": int,
    "lambda": float,
    "R": float,
    "seed": int,
    "replicas": int,
    "r0_grid": list,
    "p": float,
    "A": float,
    "delta": float,
    "theta": float,
    "a": float,
    "h_grid": list,
    "half_width": float,
    "y_min": float,
    "y_max": float,
    "edge_style": str,
    "colors": bool,
    "disc_px": float,
}

DEFAULTS = {
    "d": 1,
    "lambda": 30.0,
    "R": 5.0,
    "seed": experiments.DEFAULT_SEED,
    "replicas": 100,
    "r0_grid": [1.5, 2.0, 2.5, 3.0, 3.5],
    "p": 2.0,
    "A": 3.0,
    "delta": 0.3,
    "theta": 0.5,
    "a": 1.0,
    "h_grid": [2.0, 4.0, 6.0, 8.0, 10.0],
    "half_width": 4.0,
    "y_min": 0.05,
    "y_max": 4.0,
    "edge_style": "geodesic-arc",
    "colors": True,
    "disc_px": 800.0,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_path: str
    out_dir: str
    seed_override: int | None


def load_config(path: str, seed_override: int | None) -> dict:
    """Flat JSON config; unknown keys are errors (fail closed)."""
    cfg = dict(DEFAULTS)
    if path != "defaults":
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path) as fh:
                user = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(user) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(user)
    if seed_override is not None:
        cfg["seed"] = int(seed_override)
    return cfg


def cloud_config(cfg: dict) -> CloudConfig:
    return CloudConfig(d=int(cfg["d"]), lam=float(cfg["lambda"]), R=float(cfg["R"]), seed=int(cfg["seed"]))


def experiment_config(cfg: dict) -> experiments.ExperimentConfig:
    return experiments.ExperimentConfig(
        base=cloud_config(cfg),
        replicas=int(cfg["replicas"]),
        r0_grid=tuple(float(r) for r in cfg["r0_grid"]),
        p=float(cfg["p"]),
        A=float(cfg["A"]),
        delta=float(cfg["delta"]),
        theta=float(cfg["theta"]),
        a=float(cfg["a"]),
        h_grid=tuple(float(h) for h in cfg["h_grid"]),
        output_path=".",
    )


def _echo_config(cfg: dict):
    print("resolved config: " + json.dumps(cfg, sort_keys=True), file=sys.stderr)


def _cmd_sample(cfg: dict, out_dir: str) -> int:
    cloud = sampler.sample_ball(cloud_config(cfg))
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, f"cloud_{cfg['seed']}")
    with open(base + ".json", "w") as fh:
        fh.write(sampler.cloud_to_json(cloud))
    with open(base + ".csv", "w") as fh:
        fh.write(sampler.cloud_to_csv(cloud))
    print(f"wrote {base}.json ({len(cloud)} points)", file=sys.stderr)
    return 0


def _cmd_rst(cfg: dict, out_dir: str) -> int:
    tree = rst.build(sampler.sample_ball(cloud_config(cfg)))
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"rst_{cfg['seed']}.json")
    with open(path, "w") as fh:
        fh.write(rst.tree_to_json(tree))
    print(f"wrote {path} ({len(tree)} nodes)", file=sys.stderr)
    return 0


def _cmd_dsf(cfg: dict, out_dir: str) -> int:
    w = HalfWindow(half_width=cfg["half_width"], y_min=cfg["y_min"], y_max=cfg["y_max"])
    x, y = sampler.sample_half_arrays(cfg["lambda"], int(cfg["d"]), w, int(cfg["seed"]))
    forest = dsf.build_dsf((x, y))
    parents = forest.parent_in_input_order()
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"dsf_{cfg['seed']}.json")
    payload = {
        "window": {"half_width": w.half_width, "y_min": w.y_min, "y_max": w.y_max},
        "lambda": cfg["lambda"],
        "d": int(cfg["d"]),
        "seed": int(cfg["seed"]),
        "frontier": int(dsf.FRONTIER),
        "parent": [int(p) for p in parents],
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(payload, sort_keys=True))
    print(f"wrote {path} ({len(forest)} nodes)", file=sys.stderr)
    return 0


def _cmd_analyze(experiment: str, cfg: dict, out_dir: str) -> int:
    if experiment not in experiments.EXPERIMENTS:
        print(
            f"unknown experiment {experiment!r}; choose from {sorted(experiments.EXPERIMENTS)}",
            file=sys.stderr,
        )
        return 2
    report = experiments.EXPERIMENTS[experiment](experiment_config(cfg))
    json_path, csv_path = experiments.write_report(report, out_dir)
    print(f"wrote {json_path} and {csv_path}", file=sys.stderr)
    return 0


def _cmd_render(cfg: dict, out_dir: str) -> int:
    tree = rst.build(sampler.sample_ball(cloud_config(cfg)))
    scene = render.SvgScene(
        disc_px=float(cfg["disc_px"]), edge_style=cfg["edge_style"], colors=bool(cfg["colors"])
    )
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"rst_{cfg['seed']}.svg")
    with open(path, "w") as fh:
        fh.write(render.render_svg(tree, scene))
    print(f"wrote {path}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hyperrst",
        description="Radial spanning trees of hyperbolic Poisson processes.",
    )
    parser.add_argument("command", choices=["sample", "rst", "dsf", "analyze", "render"])
    parser.add_argument("experiment", nargs="?", help="experiment name for `analyze`")
    parser.add_argument("--config", default="defaults", help="JSON config path or 'defaults'")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--out", default=".", help="output directory")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    _echo_config(cfg)

    try:
        if args.command == "sample":
            return _cmd_sample(cfg, args.out)
        if args.command == "rst":
            return _cmd_rst(cfg, args.out)
        if args.command == "dsf":
            return _cmd_dsf(cfg, args.out)
        if args.command == "render":
            return _cmd_render(cfg, args.out)
        if args.command == "analyze":
            if not args.experiment:
                print("analyze requires an experiment name", file=sys.stderr)
                return 2
            return _cmd_analyze(args.experiment, cfg, args.out)
    except (GeometryError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failures exit 3 by contract
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3
    return 2


if __name__ == "__main__":
    sys.exit(main())
