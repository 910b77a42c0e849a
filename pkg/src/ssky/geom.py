"""2-D primitives: convex hulls with slope-ordered chains, bisectors, and
logarithmic line/point queries against convex polygons.

All predicates run in double precision with a fixed tolerance ``EPS``;
magnitudes inside the band are treated as degenerate (collinear / on-line).
Every type is immutable after construction, so everything here is safe for
concurrent use.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

EPS = 1e-9

# Hulls at or below this vertex count answer extreme-point queries by linear
# scan; larger ones use the chain binary search.
LINEAR_SCAN_THRESHOLD = 8

FULL = "full"
SEGMENT = "segment"
POINT = "point"

INTERIOR = "interior"
BOUNDARY = "boundary"
OUTSIDE = "outside"


class DegeneratePairError(ValueError):
    """Raised when an operation needs two distinct points but got one."""


class _Point2Base(NamedTuple):
    x: float
    y: float


class Point2(_Point2Base):
    """Finite 2-D coordinate pair; behaves as a plain (x, y) tuple."""

    __slots__ = ()

    def __new__(cls, x: float, y: float):
        x = float(x)
        y = float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"non-finite coordinates ({x}, {y})")
        return super().__new__(cls, x, y)


class Rect(NamedTuple):
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]]) -> "Rect":
        xs = []
        ys = []
        for x, y in points:
            xs.append(x)
            ys.append(y)
        if not xs:
            raise ValueError("empty point set")
        return cls(min(xs), min(ys), max(xs), max(ys))

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    def expanded(self, margin: float) -> "Rect":
        return Rect(self.xmin - margin, self.ymin - margin,
                    self.xmax + margin, self.ymax + margin)

    def contains_point(self, x: float, y: float, tol: float = 0.0) -> bool:
        return (self.xmin - tol <= x <= self.xmax + tol
                and self.ymin - tol <= y <= self.ymax + tol)

    def contains_rect(self, other: "Rect") -> bool:
        return (self.xmin <= other.xmin and self.ymin <= other.ymin
                and self.xmax >= other.xmax and self.ymax >= other.ymax)

    def intersects(self, other: "Rect") -> bool:
        return (self.xmin <= other.xmax and other.xmin <= self.xmax
                and self.ymin <= other.ymax and other.ymin <= self.ymax)

    def intersection(self, other: "Rect") -> "Rect | None":
        xmin = max(self.xmin, other.xmin)
        ymin = max(self.ymin, other.ymin)
        xmax = min(self.xmax, other.xmax)
        ymax = min(self.ymax, other.ymax)
        if xmin > xmax or ymin > ymax:
            return None
        return Rect(xmin, ymin, xmax, ymax)

    def dist2_to_point(self, x: float, y: float) -> float:
        dx = max(self.xmin - x, 0.0, x - self.xmax)
        dy = max(self.ymin - y, 0.0, y - self.ymax)
        return dx * dx + dy * dy


@dataclass(frozen=True)
class Line:
    """Implicit line a*x + b*y = c with (a, b) of unit norm, so that
    ``a*x + b*y - c`` evaluates to the signed distance from (x, y)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        norm = math.hypot(self.a, self.b)
        if norm == 0.0:
            raise ValueError("line normal must be nonzero")
        if abs(norm - 1.0) > 1e-12:
            object.__setattr__(self, "a", self.a / norm)
            object.__setattr__(self, "b", self.b / norm)
            object.__setattr__(self, "c", self.c / norm)

    def eval(self, x: float, y: float) -> float:
        return self.a * x + self.b * y - self.c


def dist2(p: Sequence[float], q: Sequence[float]) -> float:
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return dx * dx + dy * dy


def orient(o: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    """Twice the signed area of triangle (o, a, b): > 0 iff the turn o->a->b
    is counterclockwise."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex vertex ring in clockwise order starting at the lexicographically
    smallest vertex.

    ``vertices[0 .. upper_end]`` is the upper chain (leftmost to rightmost,
    passing above); the lower chain runs from ``upper_end`` back around to
    vertex 0.  Edge slopes are strictly decreasing along each chain, which is
    what the extreme-vertex binary search relies on.
    """

    vertices: tuple[Point2, ...]
    upper_end: int
    degeneracy: str = FULL
    xs: tuple[float, ...] = field(init=False, repr=False, compare=False)
    ys: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(v.x for v in self.vertices))
        object.__setattr__(self, "ys", tuple(v.y for v in self.vertices))

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def upper_chain(self) -> tuple[Point2, ...]:
        return self.vertices[: self.upper_end + 1]

    @property
    def lower_chain(self) -> tuple[Point2, ...]:
        return self.vertices[self.upper_end:] + (self.vertices[0],)

    def bounding_rect(self) -> Rect:
        return Rect(min(self.xs), min(self.ys), max(self.xs), max(self.ys))

    def edges(self):
        """Directed edges (v_i, v_{i+1}) around the ring."""
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    def centroid(self) -> Point2:
        return Point2(sum(self.xs) / len(self.xs), sum(self.ys) / len(self.ys))

    def support(self, dx: float, dy: float, method: str = "auto") -> tuple[int, float]:
        """Index and value of the vertex maximizing dx*x + dy*y."""
        n = len(self.vertices)
        if method == "linear" or (method == "auto" and n <= LINEAR_SCAN_THRESHOLD):
            best_i = 0
            best = dx * self.xs[0] + dy * self.ys[0]
            for i in range(1, n):
                v = dx * self.xs[i] + dy * self.ys[i]
                if v > best:
                    best = v
                    best_i = i
            return best_i, best
        i1, f1 = self._chain_peak(0, self.upper_end + 1, dx, dy)
        i2, f2 = self._chain_peak(self.upper_end, n - self.upper_end + 1, dx, dy)
        if f1 >= f2:
            return i1, f1
        return i2, f2

    def _chain_peak(self, start: int, count: int, dx: float, dy: float) -> tuple[int, float]:
        # Edge-direction dot products change sign at most once along a chain,
        # so dx*x + dy*y is unimodal over its vertices: bisect for the first
        # non-increasing edge.
        xs, ys = self.xs, self.ys
        n = len(xs)
        lo, hi = 0, count - 2
        first = count - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            i = start + mid
            if i >= n:
                i -= n
            j = i + 1
            if j >= n:
                j -= n
            if dx * (xs[j] - xs[i]) + dy * (ys[j] - ys[i]) <= 0.0:
                first = mid
                hi = mid - 1
            else:
                lo = mid + 1
        k = start + first
        if k >= n:
            k -= n
        return k, dx * xs[k] + dy * ys[k]


def convex_hull(points: Sequence[Sequence[float]]) -> ConvexPolygon:
    """Convex hull by Graham scan (monotone chain variant).

    Collinear points on hull edges are excluded, so every output vertex is
    extreme.  Returns a degenerate polygon tagged ``segment`` / ``point``
    when the input is collinear / coincident.
    """
    if not points:
        raise ValueError("convex_hull of empty point set")
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    for x, y in pts:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"non-finite input point ({x}, {y})")
    if len(pts) == 1:
        v = Point2(*pts[0])
        return ConvexPolygon((v,), 0, POINT)

    upper: list[tuple[float, float]] = []
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) >= -EPS:
            upper.pop()
        upper.append(p)
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= EPS:
            lower.pop()
        lower.append(p)

    if len(upper) == 2 and len(lower) == 2:
        return ConvexPolygon((Point2(*pts[0]), Point2(*pts[-1])), 1, SEGMENT)

    ring = upper + lower[-2:0:-1]
    return ConvexPolygon(tuple(Point2(*p) for p in ring), len(upper) - 1, FULL)


def canonical_ring(vertices: Sequence[Point2]) -> tuple[tuple[Point2, ...], int, list[int]]:
    """Normalize a convex ring (any rotation/orientation) to the clockwise
    leftmost-first form.  Returns (ring, upper_end, perm) where ``perm[i]``
    is the source index of output vertex i, for carrying edge tags along."""
    n = len(vertices)
    idx = list(range(n))
    area2 = 0.0
    for i in range(n):
        j = (i + 1) % n
        area2 += vertices[i].x * vertices[j].y - vertices[j].x * vertices[i].y
    if area2 > 0.0:  # counterclockwise: flip
        idx.reverse()
    start = min(range(n), key=lambda k: vertices[idx[k]])
    idx = idx[start:] + idx[:start]
    ring = tuple(vertices[i] for i in idx)
    upper_end = max(range(n), key=lambda k: ring[k])
    return ring, upper_end, idx


def perpendicular_bisector(p1: Sequence[float], p2: Sequence[float]) -> Line:
    """Locus of points equidistant from p1 and p2; positive side is p2's."""
    ax, ay = float(p1[0]), float(p1[1])
    bx, by = float(p2[0]), float(p2[1])
    dx = bx - ax
    dy = by - ay
    if dx == 0.0 and dy == 0.0:
        raise DegeneratePairError(f"bisector of coincident points ({ax}, {ay})")
    norm = math.hypot(dx, dy)
    a = dx / norm
    b = dy / norm
    c = a * (ax + bx) / 2.0 + b * (ay + by) / 2.0
    return Line(a, b, c)


def direction_extremes(hull: ConvexPolygon, dx: float, dy: float,
                       method: str = "auto") -> tuple[float, float]:
    """(min, max) of dx*x + dy*y over the hull vertices."""
    n = len(hull.vertices)
    if method == "linear" or (method == "auto" and n <= LINEAR_SCAN_THRESHOLD):
        xs, ys = hull.xs, hull.ys
        lo = hi = dx * xs[0] + dy * ys[0]
        for i in range(1, n):
            s = dx * xs[i] + dy * ys[i]
            if s < lo:
                lo = s
            elif s > hi:
                hi = s
        return lo, hi
    _, fmax = hull.support(dx, dy, method="binary")
    _, fneg = hull.support(-dx, -dy, method="binary")
    return -fneg, fmax


def line_hull_extremes(line: Line, hull: ConvexPolygon, method: str = "auto") -> tuple[float, float]:
    """(min, max) of the signed distance of hull vertices to the line."""
    lo, hi = direction_extremes(hull, line.a, line.b, method)
    return lo - line.c, hi - line.c


def line_intersects_interior(line: Line, hull: ConvexPolygon, method: str = "auto") -> bool:
    """True iff the line passes through the open interior of the hull.

    Uses the slope-ordered chains to locate a vertex strictly above and one
    strictly below in O(log n); boundary touches do not count.
    """
    if hull.degeneracy != FULL:
        return False
    lo, hi = line_hull_extremes(line, hull, method)
    return hi > EPS and lo < -EPS


def _point_on_segment(px, py, ax, ay, bx, by) -> bool:
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    seg_len = math.hypot(bx - ax, by - ay)
    if seg_len == 0.0:
        return math.hypot(px - ax, py - ay) <= EPS
    if abs(cross) / seg_len > EPS:
        return False
    t = ((px - ax) * (bx - ax) + (py - ay) * (by - ay)) / (seg_len * seg_len)
    return -EPS <= t * seg_len <= seg_len + EPS


def point_in_convex_polygon(p: Sequence[float], poly: ConvexPolygon) -> str:
    """Classify p against poly: ``interior`` / ``boundary`` / ``outside``.

    O(log n) wedge binary search around vertex 0.
    """
    px, py = float(p[0]), float(p[1])
    verts = poly.vertices
    n = len(verts)
    if poly.degeneracy == POINT:
        v = verts[0]
        return BOUNDARY if math.hypot(px - v.x, py - v.y) <= EPS else OUTSIDE
    if poly.degeneracy == SEGMENT:
        a, b = verts[0], verts[1]
        return BOUNDARY if _point_on_segment(px, py, a.x, a.y, b.x, b.y) else OUTSIDE

    v0 = verts[0]
    # Fan boundaries: the first ring edge (v0 -> v1) and the last (v_{n-1} -> v0).
    c_first = orient(v0, verts[1], (px, py))
    len_first = math.hypot(verts[1].x - v0.x, verts[1].y - v0.y)
    if c_first > EPS * len_first:
        return OUTSIDE
    c_last = orient(v0, verts[n - 1], (px, py))
    len_last = math.hypot(verts[n - 1].x - v0.x, verts[n - 1].y - v0.y)
    if c_last < -EPS * len_last:
        return OUTSIDE
    if abs(c_first) <= EPS * len_first:
        return BOUNDARY if _point_on_segment(px, py, v0.x, v0.y, verts[1].x, verts[1].y) else OUTSIDE
    if abs(c_last) <= EPS * len_last:
        return BOUNDARY if _point_on_segment(px, py, verts[n - 1].x, verts[n - 1].y, v0.x, v0.y) else OUTSIDE

    lo, hi = 1, n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if orient(v0, verts[mid], (px, py)) <= 0.0:
            lo = mid
        else:
            hi = mid
    a, b = verts[lo], verts[hi]
    ce = orient(a, b, (px, py))
    edge_len = math.hypot(b.x - a.x, b.y - a.y)
    if ce < -EPS * edge_len:
        return INTERIOR
    if ce <= EPS * edge_len:
        return BOUNDARY
    return OUTSIDE


class SegmentExit(NamedTuple):
    """Forward exit of a directed segment from a convex polygon.

    ``t`` is the parameter along the segment (math.inf when the far endpoint
    never leaves); ``edge`` is the ring edge index crossed; ``vertex`` is the
    ring vertex index when the exit passes through (within EPS of) a corner.
    """

    t: float
    edge: int
    vertex: int | None


def _cyrus_beck_exit(poly: ConvexPolygon, ax, ay, dx, dy, t_min: float) -> SegmentExit:
    xs, ys = poly.xs, poly.ys
    n = len(xs)
    best_t = math.inf
    best_edge = -1
    for i in range(n):
        j = (i + 1) % n
        ex = xs[j] - xs[i]
        ey = ys[j] - ys[i]
        # outward normal of a clockwise ring edge
        nx_, ny_ = -ey, ex
        denom = nx_ * dx + ny_ * dy
        if denom > 1e-300:
            t = (nx_ * (xs[i] - ax) + ny_ * (ys[i] - ay)) / denom
            if t < best_t and t >= t_min - EPS:
                best_t = t
                best_edge = i
    if best_edge < 0 or best_t is math.inf:
        return SegmentExit(math.inf, -1, None)
    return _snap_exit(poly, ax, ay, dx, dy, best_t, best_edge)


def _snap_exit(poly: ConvexPolygon, ax, ay, dx, dy, t: float, edge: int) -> SegmentExit:
    xs, ys = poly.xs, poly.ys
    n = len(xs)
    hx = ax + dx * t
    hy = ay + dy * t
    j = (edge + 1) % n
    if math.hypot(hx - xs[edge], hy - ys[edge]) <= EPS:
        return SegmentExit(t, edge, edge)
    if math.hypot(hx - xs[j], hy - ys[j]) <= EPS:
        return SegmentExit(t, edge, j)
    return SegmentExit(t, edge, None)


def segment_exit(poly: ConvexPolygon, a: Sequence[float], b: Sequence[float],
                 t_min: float = 0.0, method: str = "auto") -> SegmentExit:
    """Where the directed segment a->b leaves poly, assuming the point at
    parameter ``t_min`` lies in the closed polygon.

    Large polygons are answered in O(log n): the two tangent vertices of the
    ray bracket its front-facing arc, over which the lateral offset of the
    vertices is monotone.
    """
    ax, ay = float(a[0]), float(a[1])
    dx = float(b[0]) - ax
    dy = float(b[1]) - ay
    n = len(poly.vertices)
    if dx == 0.0 and dy == 0.0:
        return SegmentExit(math.inf, -1, None)
    if method == "linear" or (method == "auto" and n <= LINEAR_SCAN_THRESHOLD):
        return _cyrus_beck_exit(poly, ax, ay, dx, dy, t_min)

    xs, ys = poly.xs, poly.ys
    iL, hL = poly.support(-dy, dx, method="binary")
    iR, hR = poly.support(dy, -dx, method="binary")
    base = -dy * ax + dx * ay
    hL -= base      # max lateral offset (left of the ray)
    hR = -hR - base  # min lateral offset
    scale = math.hypot(dx, dy)
    if hL <= EPS * scale or hR >= -EPS * scale:
        # grazing / tangent configuration: fall back to the linear clip
        return _cyrus_beck_exit(poly, ax, ay, dx, dy, t_min)

    count = (iR - iL) % n + 1

    def h(k: int) -> float:
        i = (iL + k) % n
        return -dy * xs[i] + dx * ys[i] - base

    lo, hi = 0, count - 1
    # h is monotone non-increasing from iL to iR along the front arc;
    # find the first vertex strictly right of the ray.
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if h(mid) < 0.0:
            hi = mid
        else:
            lo = mid
    i = (iL + lo) % n
    j = (iL + hi) % n
    # intersect ray with edge (i, j)
    ex = xs[j] - xs[i]
    ey = ys[j] - ys[i]
    nx_, ny_ = -ey, ex
    den = nx_ * dx + ny_ * dy
    if den <= 0.0:
        return _cyrus_beck_exit(poly, ax, ay, dx, dy, t_min)
    t = (nx_ * (xs[i] - ax) + ny_ * (ys[i] - ay)) / den
    if t < t_min - EPS:
        return _cyrus_beck_exit(poly, ax, ay, dx, dy, t_min)
    return _snap_exit(poly, ax, ay, dx, dy, t, i)
