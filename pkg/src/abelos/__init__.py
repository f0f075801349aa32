"""Evaluation codes on abelian surfaces over finite fields: exact curve and
isogeny-class computations, minimum-distance lower bounds, and a product-surface
lab that measures real codes against those bounds."""

from .bounds import (
    BoundInput,
    BoundResult,
    Objective,
    Theorem,
    bound_general,
    bound_haloui,
    bound_simple,
    code_dimension,
    compare_ell,
    phi,
    polygon_max_bruteforce,
    relevance_threshold,
)
from .curves import EllipticCurveModel, Genus2CurveModel, count_points_elliptic, count_points_genus2
from .ff import Field, make_field
from .isogeny import (
    ClassificationReport,
    Simplicity,
    SurfaceWeilData,
    WeilRestrictionMeta,
    classify_no_low_genus,
    point_count_surface,
    weil_restriction,
)
from .quadexact import QuadExact

__version__ = "0.1.0"
