"""Exact certificates and numerical evidence for the Lozi family."""

__version__ = "0.1.0"

from .geometry import ConvexPolygon, HalfPlane, Point, clip_polygon, parse_rational  # noqa: E402
from .lozi import BASE_PARAMS, LoziParams, compose_branch  # noqa: E402
from .fixed_points import enumerate_fixed_points  # noqa: E402
from .covering import MarkedQuadrilateral, certify, check_cover, entropy_lower_bound, reference_boxes  # noqa: E402
from .trapping import trapping_region_for, verify_trapping  # noqa: E402
from .perturbation import coefficient_drift, covering_family_check, vertex_expansion  # noqa: E402

__all__ = [
    "ConvexPolygon", "HalfPlane", "Point", "clip_polygon", "parse_rational",
    "BASE_PARAMS", "LoziParams", "compose_branch", "enumerate_fixed_points",
    "MarkedQuadrilateral", "certify", "check_cover", "entropy_lower_bound", "reference_boxes",
    "trapping_region_for", "verify_trapping",
    "coefficient_drift", "covering_family_check", "vertex_expansion",
]
