"""Relative metrics (rho, delta, delta^p, j, j^p) on domains of R^n + {inf}."""

from .domains import (
    Ball,
    BoundaryCloud,
    FiniteComplement,
    HalfSpace,
    SupremumStrategy,
    punctured,
    unit_ball,
    upper_half_space,
)
from .extended_space import INF, ExtendedPoint, arch, chordal_distance, cross_ratio, point
from .metrics import (
    MetricValue,
    compute,
    delta,
    delta_p,
    delta_p_pointed,
    hyperbolic_closed_form,
    j_classic,
    j_p,
    j_pointed,
    rho,
)
from .mobius import MobiusMap, apply, apply_domain, compose, inverse, random_mobius

__version__ = "0.1.0"

__all__ = [
    "Ball", "BoundaryCloud", "FiniteComplement", "HalfSpace", "SupremumStrategy",
    "punctured", "unit_ball", "upper_half_space",
    "INF", "ExtendedPoint", "arch", "chordal_distance", "cross_ratio", "point",
    "MetricValue", "compute", "delta", "delta_p", "delta_p_pointed", "hyperbolic_closed_form",
    "j_classic", "j_p", "j_pointed", "rho",
    "MobiusMap", "apply", "apply_domain", "compose", "inverse", "random_mobius",
]
