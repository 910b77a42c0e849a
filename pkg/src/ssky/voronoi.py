"""Voronoi diagram of the dataset, clipped to a finite box.

Cells are convex polygons carrying one neighbor site id per edge (the
Delaunay pointer used to hop between cells in constant time), with a
sentinel for edges lying on the clip box.  The diagram is immutable after
construction; location, walks and floods are read-only.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from .geom import (
    BOUNDARY,
    EPS,
    OUTSIDE,
    ConvexPolygon,
    Point2,
    Rect,
    canonical_ring,
    orient,
    point_in_convex_polygon,
    segment_exit,
)

CLIP_EDGE = -1          # neighbor id for clip-box edges
CLIP_MARGIN_FACTOR = 3.0  # default box: data bbox grown by 3x its diagonal
_WELD = 1e-9            # vertices closer than this are merged


class DuplicateSiteError(ValueError):
    def __init__(self, offenders):
        self.offenders = list(offenders)
        super().__init__(f"duplicate sites at indices {self.offenders}")


class OutOfDomainError(ValueError):
    """Query point outside the diagram's clip box."""


class ClipEscapeError(RuntimeError):
    """A boundary walk tried to leave the clip box."""


@dataclass(frozen=True)
class VoronoiCell:
    site_id: int
    site: Point2
    polygon: ConvexPolygon
    # neighbor_ids[i] is the site sharing edge (v_i, v_{i+1}), CLIP_EDGE for box edges
    neighbor_ids: tuple[int, ...]


@dataclass(frozen=True)
class VoronoiDiagram:
    sites: tuple[Point2, ...]
    cells: tuple[VoronoiCell, ...]
    clip_box: Rect
    # Delaunay graph; a superset of the edge-sharing relation because
    # cocircular degeneracies contribute links across zero-length edges.
    adjacency: tuple[frozenset[int], ...]

    def __len__(self) -> int:
        return len(self.sites)

    def cell_mbrs(self) -> list[Rect]:
        return [c.polygon.bounding_rect() for c in self.cells]


def _get_cell(diagram: VoronoiDiagram, cells, metrics, site_id: int) -> VoronoiCell:
    if cells is not None:
        return cells.read_cell(site_id)
    if metrics is not None:
        metrics.cell_reads += 1
    return diagram.cells[site_id]


def _incircle(pa, pb, pc, pd) -> float:
    """Positive iff pd lies inside the circumcircle of CCW triangle (pa,pb,pc)."""
    adx = pa[0] - pd[0]
    ady = pa[1] - pd[1]
    bdx = pb[0] - pd[0]
    bdy = pb[1] - pd[1]
    cdx = pc[0] - pd[0]
    cdy = pc[1] - pd[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    return (alift * (bdx * cdy - cdx * bdy)
            + blift * (cdx * ady - adx * cdy)
            + clift * (adx * bdy - bdx * ady))


def _delaunay_edges(pts: np.ndarray) -> set[tuple[int, int]]:
    """Delaunay graph edges with cocircular ties broken deterministically.

    Qhull's choice of diagonal inside a cocircular pocket is arbitrary; we
    re-triangulate such pockets by flipping every degenerate quad toward the
    diagonal with the smallest (min id, max id) key, which converges to the
    fan from the lowest site id.
    """
    tri = Delaunay(pts)
    triangles: list[list[int] | None] = [[int(v) for v in s] for s in tri.simplices]
    edge_tris: dict[tuple[int, int], set[int]] = {}

    def edge_key(u: int, v: int) -> tuple[int, int]:
        return (u, v) if u < v else (v, u)

    def link(t_idx: int):
        a, b, c = triangles[t_idx]
        for u, v in ((a, b), (b, c), (c, a)):
            edge_tris.setdefault(edge_key(u, v), set()).add(t_idx)

    def unlink(t_idx: int):
        a, b, c = triangles[t_idx]
        for u, v in ((a, b), (b, c), (c, a)):
            edge_tris[edge_key(u, v)].discard(t_idx)

    for t_idx in range(len(triangles)):
        link(t_idx)

    work = deque(k for k, ts in edge_tris.items() if len(ts) == 2)
    while work:
        key = work.popleft()
        ts = edge_tris.get(key)
        if ts is None or len(ts) != 2:
            continue
        t1, t2 = sorted(ts)
        a, b = key
        c = next(v for v in triangles[t1] if v not in key)
        d = next(v for v in triangles[t2] if v not in key)
        new_key = edge_key(c, d)
        if new_key >= key:
            continue
        pa, pb, pc, pd = pts[a], pts[b], pts[c], pts[d]
        spread = max(abs(pa[0] - pb[0]), abs(pa[1] - pb[1]),
                     abs(pc[0] - pd[0]), abs(pc[1] - pd[1]), 1e-30)
        # orient the triangle CCW before the incircle sign test
        tri1 = (pa, pb, pc) if orient(pa, pb, pc) > 0 else (pb, pa, pc)
        if abs(_incircle(*tri1, pd)) > 1e-9 * spread ** 4:
            continue
        # flippable only if a and b sit on opposite sides of (c, d)
        sa = orient(pc, pd, pa)
        sb = orient(pc, pd, pb)
        if sa * sb >= 0:
            continue
        unlink(t1)
        unlink(t2)
        triangles[t1] = [c, d, a]
        triangles[t2] = [c, d, b]
        link(t1)
        link(t2)
        for u, v in ((a, c), (c, b), (b, d), (d, a), (c, d)):
            k2 = edge_key(u, v)
            if len(edge_tris.get(k2, ())) == 2:
                work.append(k2)

    return {k for k, ts in edge_tris.items() if ts}


def _collinear_neighbors(pts: np.ndarray) -> set[tuple[int, int]] | None:
    """Consecutive-pair adjacency when all sites are collinear, else None."""
    n = len(pts)
    if n == 1:
        return set()
    i0 = min(range(n), key=lambda i: (pts[i][0], pts[i][1]))
    i1 = max(range(n), key=lambda i: (pts[i][0], pts[i][1]))
    base = pts[i0]
    axis = pts[i1] - base
    length = math.hypot(axis[0], axis[1])
    if n > 2:
        cross = np.abs((pts[:, 0] - base[0]) * axis[1] - (pts[:, 1] - base[1]) * axis[0])
        if np.max(cross) / length > EPS:
            return None
    proj = (pts[:, 0] - base[0]) * axis[0] + (pts[:, 1] - base[1]) * axis[1]
    order = sorted(range(n), key=lambda i: (proj[i], i))
    return {(min(a, b), max(a, b)) for a, b in zip(order, order[1:])}


def _halfplane_clip(pts, tags, a: float, b: float, c: float, new_tag: int):
    """Clip a tagged polygon ring to the side a*x + b*y <= c.

    tags[i] labels the edge from vertex i to vertex i+1; the cut edge gets
    new_tag.
    """
    vals = [a * x + b * y - c for (x, y) in pts]
    out_p: list[tuple[float, float]] = []
    out_t: list[int] = []
    n = len(pts)
    for i in range(n):
        j = (i + 1) % n
        vi = vals[i]
        vj = vals[j]
        if vi <= 0.0:
            out_p.append(pts[i])
            out_t.append(tags[i])
            if vj > 0.0:
                t = vi / (vi - vj)
                out_p.append((pts[i][0] + t * (pts[j][0] - pts[i][0]),
                              pts[i][1] + t * (pts[j][1] - pts[i][1])))
                out_t.append(new_tag)
        elif vj <= 0.0:
            t = vi / (vi - vj)
            out_p.append((pts[i][0] + t * (pts[j][0] - pts[i][0]),
                          pts[i][1] + t * (pts[j][1] - pts[i][1])))
            out_t.append(tags[i])
    return out_p, out_t


def _weld(pts, tags):
    out_p = []
    out_t = []
    n = len(pts)
    for i in range(n):
        j = (i + 1) % n
        if (abs(pts[i][0] - pts[j][0]) <= _WELD
                and abs(pts[i][1] - pts[j][1]) <= _WELD):
            continue  # zero-length edge: merge vertex i into its successor
        out_p.append(pts[i])
        out_t.append(tags[i])
    return out_p, out_t


def _build_cell(site_id: int, pts: np.ndarray, neighbors: list[int],
                box: Rect) -> VoronoiCell:
    sx = float(pts[site_id][0])
    sy = float(pts[site_id][1])
    ring = [(box.xmin, box.ymin), (box.xmin, box.ymax),
            (box.xmax, box.ymax), (box.xmax, box.ymin)]
    tags = [CLIP_EDGE] * 4
    # closest bisectors first so the working polygon shrinks quickly
    for nb in sorted(neighbors, key=lambda t: (pts[t][0] - sx) ** 2 + (pts[t][1] - sy) ** 2):
        tx = float(pts[nb][0])
        ty = float(pts[nb][1])
        a = tx - sx
        b = ty - sy
        c = (a * (sx + tx) + b * (sy + ty)) / 2.0
        ring, tags = _halfplane_clip(ring, tags, a, b, c, nb)
        if not ring:
            raise RuntimeError(f"cell of site {site_id} collapsed during clipping")
    ring, tags = _weld(ring, tags)
    if len(ring) < 3:
        raise RuntimeError(f"cell of site {site_id} degenerated to {len(ring)} vertices")
    verts = [Point2(x, y) for x, y in ring]
    canon, upper_end, perm = canonical_ring(verts)
    pair_tag = {}
    n = len(ring)
    for i in range(n):
        j = (i + 1) % n
        pair_tag[(i, j)] = tags[i]
        pair_tag[(j, i)] = tags[i]
    new_tags = tuple(pair_tag[(perm[k], perm[(k + 1) % n])] for k in range(n))
    return VoronoiCell(site_id, Point2(sx, sy), ConvexPolygon(canon, upper_end), new_tags)


def default_clip_box(sites) -> Rect:
    box = Rect.from_points(sites)
    return box.expanded(max(CLIP_MARGIN_FACTOR * box.diagonal, 1.0))


def build_voronoi(sites, clip_box: Rect | None = None) -> VoronoiDiagram:
    """Voronoi diagram of distinct sites, every cell clipped to the box.

    The box defaults to the site bounding box grown by 3x its diagonal, which
    keeps every query hull the benchmark generates strictly inside it.
    """
    pts = np.asarray(sites, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] != 2:
        raise ValueError("sites must be a non-empty sequence of 2-D points")
    if not np.all(np.isfinite(pts)):
        raise ValueError("sites contain non-finite coordinates")
    n = len(pts)

    seen: dict[tuple[float, float], int] = {}
    offenders = []
    for i, (x, y) in enumerate(pts):
        key = (float(x), float(y))
        if key in seen:
            offenders.append(i)
        else:
            seen[key] = i
    if offenders:
        raise DuplicateSiteError(offenders)

    if clip_box is None:
        clip_box = default_clip_box(pts)
    else:
        clip_box = Rect(*map(float, clip_box))
        for i, (x, y) in enumerate(pts):
            if not (clip_box.xmin < x < clip_box.xmax and clip_box.ymin < y < clip_box.ymax):
                raise ValueError(f"site {i} not strictly inside the clip box")

    edges = _collinear_neighbors(pts)
    if edges is None:
        edges = _delaunay_edges(pts)

    neighbor_sets: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        neighbor_sets[a].add(b)
        neighbor_sets[b].add(a)

    cells = tuple(_build_cell(i, pts, sorted(neighbor_sets[i]), clip_box)
                  for i in range(n))
    adjacency = tuple(frozenset(s) for s in neighbor_sets)
    site_pts = tuple(Point2(float(x), float(y)) for x, y in pts)
    return VoronoiDiagram(site_pts, cells, clip_box, adjacency)


def locate_cell(diagram: VoronoiDiagram, index, q, metrics=None, cells=None) -> int:
    """Site id of the cell containing q; boundary ties go to the lowest id.

    ``index`` is a spatial index over the cell bounding rectangles.
    """
    qx, qy = float(q[0]), float(q[1])
    if not diagram.clip_box.contains_point(qx, qy):
        raise OutOfDomainError(f"query point ({qx}, {qy}) outside clip box")
    counter = metrics if metrics is not None else None
    candidates = index.range_query(Rect(qx, qy, qx, qy), counter=counter)
    for sid in sorted(candidates):
        cell = _get_cell(diagram, cells, metrics, sid)
        if point_in_convex_polygon((qx, qy), cell.polygon) != OUTSIDE:
            return sid
    raise RuntimeError(f"no cell found for in-box point ({qx}, {qy})")


def _vertex_index(poly: ConvexPolygon, v) -> int | None:
    for i, (x, y) in enumerate(zip(poly.xs, poly.ys)):
        if abs(x - v[0]) <= EPS and abs(y - v[1]) <= EPS:
            return i
    return None


def _cells_around_vertex(diagram, cells, metrics, start_id: int, v) -> list[int]:
    """All cells incident to the Voronoi vertex v, found by rotating through
    the shared edges (both ways when the fan is interrupted by the clip box).
    """
    found = [start_id]
    seen = {start_id}
    for direction in (0, 1):
        # if the first sweep wraps all the way around, the second one stops
        # immediately on the seen-check
        sid = start_id
        while True:
            cell = _get_cell(diagram, cells, metrics, sid)
            k = _vertex_index(cell.polygon, v)
            if k is None:
                break
            edge = k if direction == 0 else (k - 1) % len(cell.polygon)
            nb = cell.neighbor_ids[edge]
            if nb == CLIP_EDGE or nb in seen:
                break
            seen.add(nb)
            found.append(nb)
            sid = nb
    return found


def _fan_cyclic(diagram, fan: list[int], v) -> list[int]:
    """Fan cells sorted counterclockwise by site direction around v."""
    def angle(sid: int) -> float:
        s = diagram.sites[sid]
        return math.atan2(s.y - v[1], s.x - v[0])
    return sorted(fan, key=angle)


def boundary_walk(diagram: VoronoiDiagram, start_cell: int, segment,
                  metrics=None, cells=None) -> list[int]:
    """Every cell the closed segment intersects, in traversal order.

    The walk exits each convex cell through the edge found by ``segment_exit``
    and hops to the neighbor in constant time; passing exactly through a
    Voronoi vertex enumerates the whole fan of incident cells.
    """
    a = (float(segment[0][0]), float(segment[0][1]))
    b = (float(segment[1][0]), float(segment[1][1]))
    order: list[int] = []
    seen: set[int] = set()

    def visit(sid: int):
        if sid not in seen:
            seen.add(sid)
            order.append(sid)

    visit(start_cell)
    seg_len = math.hypot(b[0] - a[0], b[1] - a[1])
    if seg_len == 0.0:
        return order
    eps_t = EPS / seg_len
    current = start_cell
    t = 0.0
    for _ in range(4 * len(diagram.cells) + 16):
        cell = _get_cell(diagram, cells, metrics, current)
        hit = segment_exit(cell.polygon, a, b, t)
        if hit.t > 1.0 + eps_t:
            break  # far endpoint strictly inside the current cell
        if hit.vertex is not None:
            v = cell.polygon.vertices[hit.vertex]
            fan = _cells_around_vertex(diagram, cells, metrics, current, v)
            if hit.t >= 1.0 - eps_t:
                for sid in fan:
                    visit(sid)
                break
            nxt = _fan_continuation(diagram, cells, metrics, fan, a, b, hit.t, eps_t)
            _visit_fan(diagram, fan, v, current, nxt, visit)
            current = nxt
            t = hit.t
            continue
        nb = cell.neighbor_ids[hit.edge]
        if hit.t >= 1.0 - eps_t:
            # endpoint lands on the exit edge: the closed segment touches the
            # neighbor across it as well
            if nb != CLIP_EDGE:
                visit(nb)
            break
        if nb == CLIP_EDGE:
            raise ClipEscapeError(
                f"segment leaves the clip box from cell {current} at t={hit.t:.6g}")
        visit(nb)
        current = nb
        t = hit.t
    else:
        raise RuntimeError("boundary walk failed to terminate")
    return order


def _fan_continuation(diagram, cells, metrics, fan, a, b, t_hit, eps_t) -> int:
    probe_t = min(1.0, t_hit + max(1e-7, 10.0 * eps_t))
    probe = (a[0] + (b[0] - a[0]) * probe_t, a[1] + (b[1] - a[1]) * probe_t)
    interior_match = None
    boundary_match = None
    for sid in sorted(fan):
        cell = _get_cell(diagram, cells, metrics, sid)
        side = point_in_convex_polygon(probe, cell.polygon)
        if side == OUTSIDE:
            continue
        if side == BOUNDARY:
            if boundary_match is None:
                boundary_match = sid
        else:
            interior_match = sid
            break
    if interior_match is not None:
        return interior_match
    if boundary_match is not None:
        return boundary_match
    raise RuntimeError("walk lost the segment at a Voronoi vertex")


def _visit_fan(diagram, fan, v, entry, cont, visit):
    """Emit a vertex fan so that walking the segment backwards yields exactly
    the reversed order: counterclockwise arc from entry to continuation first,
    then the clockwise arc as traversed."""
    cyc = _fan_cyclic(diagram, fan, v)
    if entry in cyc:
        k = cyc.index(entry)
        cyc = cyc[k:] + cyc[:k]
    try:
        j = cyc.index(cont)
    except ValueError:
        j = len(cyc)
    for sid in cyc[1:j]:
        visit(sid)
    for sid in reversed(cyc[j + 1:]):
        visit(sid)
    visit(cont)


def interior_flood(diagram: VoronoiDiagram, boundary_cells, hull,
                   metrics=None, cells=None) -> set[int]:
    """Cells lying inside the closed hull, reached by Delaunay traversal from
    the boundary cells; never expands past a cell that is not inside."""
    inside: set[int] = set()
    boundary = set(boundary_cells)
    tested = set(boundary)
    queue = deque(boundary)
    while queue:
        sid = queue.popleft()
        for nb in diagram.adjacency[sid]:
            if nb in tested:
                continue
            tested.add(nb)
            cell = _get_cell(diagram, cells, metrics, nb)
            if all(point_in_convex_polygon(v, hull) != OUTSIDE
                   for v in cell.polygon.vertices):
                inside.add(nb)
                queue.append(nb)
    return inside
