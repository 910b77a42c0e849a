"""Bounding-rectangle hierarchy over points or cell rectangles.

Bulk-loaded by Hilbert-curve order of the entry centers, which gives a
deterministic tree with good locality; queries count node visits so callers
can account I/O the way the benchmark does.  Immutable after build.
"""

from __future__ import annotations

import heapq
import math

from .geom import Rect

DEFAULT_FANOUT = 32
MIN_FILL = 0.4

_HILBERT_ORDER = 16  # entry centers are snapped to a 2^16 x 2^16 grid


class EmptyIndexError(ValueError):
    """Query against an index with no entries."""


class _Node:
    __slots__ = ("rect", "children", "entries")

    def __init__(self, rect: Rect, children=None, entries=None):
        self.rect = rect
        self.children = children  # list[_Node] for internal nodes, else None
        self.entries = entries    # list[(Rect, id)] for leaves, else None

    @property
    def is_leaf(self) -> bool:
        return self.entries is not None


def _hilbert_d(order: int, x: int, y: int) -> int:
    """Distance along the Hilbert curve of the 2^order grid cell (x, y)."""
    rx = ry = 0
    d = 0
    s = 1 << (order - 1)
    while s > 0:
        rx = 1 if (x & s) > 0 else 0
        ry = 1 if (y & s) > 0 else 0
        d += s * s * ((3 * rx) ^ ry)
        if ry == 0:
            if rx == 1:
                x = s - 1 - x
                y = s - 1 - y
            x, y = y, x
        s >>= 1
    return d


def _group_sizes(m: int, fanout: int) -> list[int]:
    """Chunk m children into groups of at most ``fanout``; every group except
    a lone root meets the minimum fill by rebalancing the tail."""
    if m <= fanout:
        return [m]
    min_fill = math.ceil(fanout * MIN_FILL)
    sizes = [fanout] * (m // fanout)
    tail = m % fanout
    if tail:
        if tail >= min_fill:
            sizes.append(tail)
        else:
            combined = fanout + tail
            sizes[-1] = combined // 2
            sizes.append(combined - combined // 2)
    return sizes


def _bound(rects) -> Rect:
    xmin = min(r.xmin for r in rects)
    ymin = min(r.ymin for r in rects)
    xmax = max(r.xmax for r in rects)
    ymax = max(r.ymax for r in rects)
    return Rect(xmin, ymin, xmax, ymax)


class SpatialIndex:
    """Packed rectangle tree; build with :func:`build_index`."""

    def __init__(self, root: _Node, fanout: int, height: int, node_count: int,
                 size: int):
        self.root = root
        self.fanout = fanout
        self.height = height
        self.node_count = node_count
        self.size = size

    def nearest(self, q, counter=None) -> int:
        """Entry id at minimum rectangle distance from q; ties by lowest id."""
        if self.size == 0:
            raise EmptyIndexError("nearest() on empty index")
        qx, qy = float(q[0]), float(q[1])
        heap: list[tuple[float, int, int, object]] = []
        seq = 0
        heapq.heappush(heap, (self.root.rect.dist2_to_point(qx, qy), 0, seq, self.root))
        best_d = math.inf
        best_id = -1
        while heap:
            d, is_entry, tie, obj = heapq.heappop(heap)
            if d > best_d:
                break
            if is_entry:
                if d < best_d or (d == best_d and tie < best_id):
                    best_d = d
                    best_id = tie
                continue
            node: _Node = obj
            if counter is not None:
                counter.index_node_reads += 1
            if node.is_leaf:
                for rect, eid in node.entries:
                    dd = rect.dist2_to_point(qx, qy)
                    if dd <= best_d:
                        heapq.heappush(heap, (dd, 1, eid, None))
            else:
                for child in node.children:
                    dd = child.rect.dist2_to_point(qx, qy)
                    if dd <= best_d:
                        seq += 1
                        heapq.heappush(heap, (dd, 0, seq, child))
        return best_id

    def range_query(self, rect: Rect, counter=None) -> list[int]:
        """Ids of entries whose rectangles intersect rect."""
        rect = Rect(*rect)
        out: list[int] = []
        if self.size == 0:
            return out
        stack = [self.root]
        while stack:
            node = stack.pop()
            if counter is not None:
                counter.index_node_reads += 1
            if node.is_leaf:
                for r, eid in node.entries:
                    if r.intersects(rect):
                        out.append(eid)
            else:
                for child in node.children:
                    if child.rect.intersects(rect):
                        stack.append(child)
        return out


def build_index(entries, fanout: int = DEFAULT_FANOUT) -> SpatialIndex:
    """Bulk-load an index over (rect, id) entries.

    Points are passed as zero-area rectangles.  Entries are packed bottom-up
    in Hilbert order of their rectangle centers.
    """
    if fanout < 4:
        raise ValueError(f"fanout must be >= 4, got {fanout}")
    items = [(Rect(*r), int(i)) for r, i in entries]
    if not items:
        raise ValueError("cannot build an index over zero entries")

    bound = _bound([r for r, _ in items])
    span_x = max(bound.xmax - bound.xmin, 1e-300)
    span_y = max(bound.ymax - bound.ymin, 1e-300)
    grid = (1 << _HILBERT_ORDER) - 1

    def key(item):
        r, eid = item
        cx = (r.xmin + r.xmax) / 2.0
        cy = (r.ymin + r.ymax) / 2.0
        gx = int((cx - bound.xmin) / span_x * grid)
        gy = int((cy - bound.ymin) / span_y * grid)
        return (_hilbert_d(_HILBERT_ORDER, gx, gy), eid)

    items.sort(key=key)

    nodes: list[_Node] = []
    pos = 0
    for size in _group_sizes(len(items), fanout):
        chunk = items[pos:pos + size]
        pos += size
        nodes.append(_Node(_bound([r for r, _ in chunk]), entries=chunk))
    node_count = len(nodes)
    height = 1
    while len(nodes) > 1:
        nxt: list[_Node] = []
        pos = 0
        for size in _group_sizes(len(nodes), fanout):
            chunk = nodes[pos:pos + size]
            pos += size
            nxt.append(_Node(_bound([n.rect for n in chunk]), children=chunk))
        nodes = nxt
        node_count += len(nodes)
        height += 1
    return SpatialIndex(nodes[0], fanout, height, node_count, len(items))
