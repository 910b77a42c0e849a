"""Spatial skyline query engine.

Given data points P and query points Q, find every p in P that no other
data point dominates in distance to all of Q simultaneously.  Dominance is
decided geometrically (does the pair's perpendicular bisector cross the
interior of the query convex hull?), and the Voronoi diagram of P supplies
"seed" skyline points that need no dominance test at all.
"""

from .geom import (
    ConvexPolygon,
    Line,
    Point2,
    Rect,
    convex_hull,
    line_intersects_interior,
    perpendicular_bisector,
    point_in_convex_polygon,
)
from .voronoi import (
    VoronoiCell,
    VoronoiDiagram,
    boundary_walk,
    build_voronoi,
    interior_flood,
    locate_cell,
)
from .index import SpatialIndex, build_index
from .skyline import (
    Metrics,
    QueryContext,
    SkylineResult,
    brute_force_skyline,
    dominating_region_box,
    enhanced_spatial_skyline,
    seed_skyline,
    spatial_skyline,
    spatially_dominates,
    vs2_skyline,
)
from .storage import CellFile, read_cell, write_cells

__all__ = [
    "ConvexPolygon",
    "Line",
    "Point2",
    "Rect",
    "convex_hull",
    "line_intersects_interior",
    "perpendicular_bisector",
    "point_in_convex_polygon",
    "VoronoiCell",
    "VoronoiDiagram",
    "boundary_walk",
    "build_voronoi",
    "interior_flood",
    "locate_cell",
    "SpatialIndex",
    "build_index",
    "Metrics",
    "QueryContext",
    "SkylineResult",
    "brute_force_skyline",
    "dominating_region_box",
    "enhanced_spatial_skyline",
    "seed_skyline",
    "spatial_skyline",
    "spatially_dominates",
    "vs2_skyline",
    "CellFile",
    "read_cell",
    "write_cells",
]

__version__ = "0.1.0"
