"""Shortest Minkowski billiards, plank covers, and related convex invariants."""

from .errors import (
    BodyError,
    DimensionMismatch,
    FieldError,
    GaugeError,
    InputError,
    LPError,
    MinkbillError,
    StallError,
)
from .geometry import (
    Ball,
    ConvexBody,
    Gauge,
    HomothetFit,
    HomothetLambda,
    HPolytope,
    VPolytope,
    body_from_dict,
    body_gauge,
    body_to_dict,
    diff_gauge,
    difference_body,
    euclidean_gauge,
    is_noncoverable,
    min_homothet_cover,
    polar,
    polygonize,
    smallest_enclosing_ball,
    volume,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BodyError",
    "ConvexBody",
    "DimensionMismatch",
    "FieldError",
    "Gauge",
    "GaugeError",
    "HomothetFit",
    "HomothetLambda",
    "HPolytope",
    "InputError",
    "LPError",
    "MinkbillError",
    "StallError",
    "VPolytope",
    "body_from_dict",
    "body_gauge",
    "body_to_dict",
    "diff_gauge",
    "difference_body",
    "euclidean_gauge",
    "is_noncoverable",
    "min_homothet_cover",
    "polar",
    "polygonize",
    "smallest_enclosing_ball",
    "volume",
    "__version__",
]
