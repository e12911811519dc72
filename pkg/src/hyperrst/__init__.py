"""Radial spanning trees and directed spanning forests in hyperbolic space."""

from . import dsf, experiments, hgeom, render, rst, sampler

__all__ = ["hgeom", "sampler", "rst", "dsf", "experiments", "render"]
__version__ = "0.1.0"
