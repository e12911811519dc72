"""SVG rendering geometry and the command-line interface."""

import json
import math
import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from hyperrst import cli, render, rst, sampler
from hyperrst.hgeom import GeometryError
from hyperrst.render import SvgScene, geodesic_arc
from hyperrst.sampler import CloudConfig


def small_tree(seed=30, lam=6.0, R=2.5):
    return rst.build(sampler.sample_ball(CloudConfig(d=1, lam=lam, R=R, seed=seed)))


class TestArcGeometry:
    def test_orthogonality_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            b1 = rng.uniform(-0.9, 0.9, size=2)
            b2 = rng.uniform(-0.9, 0.9, size=2)
            if np.linalg.norm(b1) >= 1 or np.linalg.norm(b2) >= 1:
                continue
            arc = geodesic_arc(b1, b2)
            if arc.line:
                continue
            c = np.asarray(arc.center)
            # circle orthogonal to the unit circle: |c|^2 = R^2 + 1
            assert float(c @ c) - arc.radius**2 == pytest.approx(1.0, abs=1e-6)
            m = np.asarray(arc.midpoint)
            assert np.linalg.norm(m - c) == pytest.approx(arc.radius, abs=1e-9)
            assert np.linalg.norm(m) < 1.0

    def test_collinear_becomes_line(self):
        arc = geodesic_arc(np.array([0.2, 0.0]), np.array([-0.5, 0.0]))
        assert arc.line

    def test_endpoints_on_circle(self):
        arc = geodesic_arc(np.array([0.3, 0.1]), np.array([-0.2, 0.4]))
        c = np.asarray(arc.center)
        for p in (arc.p1, arc.p2):
            assert np.linalg.norm(np.asarray(p) - c) == pytest.approx(arc.radius, abs=1e-9)


class TestRenderSvg:
    def test_root_only_tree_valid_xml(self):
        cloud = sampler.PointCloud(
            CloudConfig(d=1, lam=1.0, R=1.0, seed=0), np.empty(0), np.empty((0, 2))
        )
        tree = rst.build(cloud)
        svg = render.render_svg(tree, SvgScene())
        root = ET.fromstring(svg)
        assert root.tag.endswith("svg")

    def test_radial_chain_draws_line(self):
        cloud = sampler.PointCloud(
            CloudConfig(d=1, lam=1.0, R=2.0, seed=0),
            np.array([1.0, 2.0]),
            np.array([[1.0, 0.0], [1.0, 0.0]]),
        )
        tree = rst.build(cloud)
        svg = render.render_svg(tree, SvgScene(colors=False))
        assert " L " in svg and " A " not in svg.split("<circle")[0] or " L " in svg

    def test_well_formed_and_finite(self):
        tree = small_tree()
        for style in ("geodesic-arc", "star-path-polyline"):
            svg = render.render_svg(tree, SvgScene(edge_style=style))
            ET.fromstring(svg)
            for token in svg.replace('"', " ").split():
                try:
                    val = float(token)
                except ValueError:
                    continue
                assert math.isfinite(val)

    def test_points_inside_disc(self):
        tree = small_tree()
        ball = np.tanh(tree.radii / 2.0)
        assert np.all(ball < 1.0)

    def test_pure_function(self):
        tree = small_tree()
        scene = SvgScene()
        assert render.render_svg(tree, scene) == render.render_svg(tree, scene)

    def test_rejects_d2(self):
        cloud = sampler.sample_ball(CloudConfig(d=2, lam=1.0, R=2.0, seed=1))
        tree = rst.build(cloud)
        with pytest.raises(GeometryError):
            render.render_svg(tree, SvgScene())

    def test_svg_arcs_match_minor_arc(self):
        # reconstruct each emitted arc with the SVG endpoint parameterization
        # and confirm its midpoint stays inside the unit disc
        tree = small_tree(seed=31)
        svg = render.render_svg(tree, SvgScene(colors=False))
        count = 0
        for part in svg.splitlines():
            if "<path" not in part or " A " not in part:
                continue
            d = part.split('d="')[1].split('"')[0]
            tokens = d.replace("M", "").replace("A", "").split()
            assert len(tokens) == 9
            x1, y1, r_ = float(tokens[0]), float(tokens[1]), float(tokens[2])
            large, sweep = int(tokens[5]), int(tokens[6])
            x2, y2 = float(tokens[7]), float(tokens[8])
            assert large == 0
            mid = _svg_arc_midpoint(x1, y1, x2, y2, r_, large=large, sweep=sweep)
            assert np.linalg.norm(mid) < 1.0
            count += 1
        assert count > 0


def _svg_arc_midpoint(x1, y1, x2, y2, r, large, sweep):
    """Midpoint of an SVG elliptical arc (equal radii) per the W3C
    endpoint-to-center conversion."""
    p1 = np.array([x1, y1])
    p2 = np.array([x2, y2])
    half = (p1 - p2) / 2.0
    rad2 = r * r - float(half @ half)
    rad2 = max(rad2, 0.0)
    coef = math.sqrt(rad2 / float(half @ half)) if half @ half else 0.0
    if large == sweep:
        coef = -coef
    center = (p1 + p2) / 2.0 + coef * np.array([half[1], -half[0]])
    a1 = math.atan2(y1 - center[1], x1 - center[0])
    a2 = math.atan2(y2 - center[1], x2 - center[0])
    if sweep:
        while a2 < a1:
            a2 += 2 * math.pi
    else:
        while a2 > a1:
            a2 -= 2 * math.pi
    am = (a1 + a2) / 2.0
    return center + r * np.array([math.cos(am), math.sin(am)])


class TestCli:
    def test_analyze_writes_report(self, tmp_path):
        cfg = {
            "lambda": 6.0,
            "R": 3.0,
            "replicas": 3,
            "r0_grid": [1.3, 1.8],
            "seed": 77,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        code = cli.main(
            ["analyze", "level_counts", "--config", str(cfg_path), "--out", str(tmp_path)]
        )
        assert code == 0
        out = tmp_path / "level_counts_77.json"
        assert out.exists()
        assert json.loads(out.read_text())["experiment"] == "level_counts"

    def test_missing_config_exit_2(self, tmp_path):
        assert cli.main(["analyze", "straightness", "--config", str(tmp_path / "nope.json")]) == 2

    def test_unknown_keys_exit_2(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"lambda": 2.0, "bogus": 1}))
        assert cli.main(["sample", "--config", str(p)]) == 2

    def test_unknown_experiment_exit_2(self, tmp_path):
        assert cli.main(["analyze", "wat", "--out", str(tmp_path)]) == 2

    def test_unknown_command_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2

    def test_sample_and_render(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"lambda": 4.0, "R": 2.0, "seed": 12}))
        assert cli.main(["sample", "--config", str(p), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "cloud_12.json").exists()
        assert (tmp_path / "cloud_12.csv").exists()
        assert cli.main(["render", "--config", str(p), "--out", str(tmp_path)]) == 0
        svg = (tmp_path / "rst_12.svg").read_text()
        ET.fromstring(svg)

    def test_rst_and_dsf_commands(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(
            json.dumps(
                {
                    "lambda": 4.0,
                    "R": 2.0,
                    "seed": 13,
                    "half_width": 2.0,
                    "y_min": 0.2,
                    "y_max": 2.0,
                }
            )
        )
        assert cli.main(["rst", "--config", str(p), "--out", str(tmp_path)]) == 0
        assert cli.main(["dsf", "--config", str(p), "--out", str(tmp_path)]) == 0
        tree = json.loads((tmp_path / "rst_13.json").read_text())
        assert "parent" in tree and "cloud_ref" in tree
        forest = json.loads((tmp_path / "dsf_13.json").read_text())
        assert forest["frontier"] == -2

    def test_seed_override(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"lambda": 4.0, "R": 2.0, "seed": 1}))
        code = cli.main(
            ["sample", "--config", str(p), "--seed", "99", "--out", str(tmp_path)]
        )
        assert code == 0
        assert (tmp_path / "cloud_99.json").exists()

    def test_byte_determinism(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(
            json.dumps({"lambda": 5.0, "R": 3.0, "replicas": 2, "r0_grid": [1.4, 2.0], "seed": 3})
        )
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        argv = ["analyze", "direction_convergence", "--config", str(p)]
        assert cli.main(argv + ["--out", str(out1)]) == 0
        assert cli.main(argv + ["--out", str(out2)]) == 0
        for name in ("direction_convergence_3.json", "direction_convergence_3.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
