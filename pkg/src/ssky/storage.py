"""Per-cell binary storage for Voronoi diagrams.

Layout (little-endian):

    header   magic ``SSKYVD1\\0`` | u32 cell count | u32 precision tag (64)
             | 4 x f64 clip box (xmin, ymin, xmax, ymax)
    offsets  u64 absolute byte offset per cell block
    block    u32 site id | 2 x f64 site | u32 vertex count k
             | 2k x f64 vertices (boundary order) | k x u32 edge neighbors

Neighbor id ``0xFFFFFFFF`` marks a clip-box edge.  Coordinates are stored as
raw IEEE doubles, so a round-trip is bit-exact.  A handle supports direct
access to single blocks and counts every read; there is no cache unless one
is asked for explicitly, so ``cell_reads`` matches physical block reads.
"""

from __future__ import annotations

import os
import struct
from collections import OrderedDict

from .geom import ConvexPolygon, Point2, Rect
from .voronoi import CLIP_EDGE, VoronoiCell, VoronoiDiagram

MAGIC = b"SSKYVD1\x00"
PRECISION_TAG = 64
SENTINEL = 0xFFFFFFFF

_HEADER = struct.Struct("<8sII4d")
_BLOCK_HEAD = struct.Struct("<IddI")

# sanity bound when parsing: a cell with more vertices than this is corrupt
_MAX_VERTICES = 1 << 24


class CellFormatError(ValueError):
    """Block data failed to parse; the message names the byte offset."""


def _canonical_upper_end(vertices: tuple[Point2, ...]) -> int:
    return max(range(len(vertices)), key=lambda k: vertices[k])


class CellFile:
    """Open handle over a cell file with the offset table resident."""

    def __init__(self, path, cache_size: int = 0):
        self.path = os.fspath(path)
        self.cell_reads = 0
        self._fh = open(self.path, "rb")
        header = self._fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise CellFormatError(f"{self.path}: truncated header")
        magic, count, precision, bx0, by0, bx1, by1 = _HEADER.unpack(header)
        if magic != MAGIC:
            raise CellFormatError(f"{self.path}: bad magic {magic!r}")
        if precision != PRECISION_TAG:
            raise CellFormatError(f"{self.path}: unsupported precision tag {precision}")
        self.cell_count = count
        self.clip_box = Rect(bx0, by0, bx1, by1)
        table = self._fh.read(8 * count)
        if len(table) < 8 * count:
            raise CellFormatError(f"{self.path}: truncated offset table")
        self.offsets = struct.unpack(f"<{count}Q", table)
        if any(b <= a for a, b in zip(self.offsets, self.offsets[1:])):
            raise CellFormatError(f"{self.path}: offsets not strictly increasing")
        self._cache: OrderedDict[int, VoronoiCell] | None = (
            OrderedDict() if cache_size > 0 else None)
        self._cache_size = cache_size

    def __enter__(self) -> "CellFile":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def read_cell(self, site_id: int) -> VoronoiCell:
        """Read one cell block; counts one read unless served from an
        explicitly enabled cache."""
        if not 0 <= site_id < self.cell_count:
            raise IndexError(f"site id {site_id} out of range 0..{self.cell_count - 1}")
        if self._cache is not None and site_id in self._cache:
            self._cache.move_to_end(site_id)
            return self._cache[site_id]
        offset = self.offsets[site_id]
        self._fh.seek(offset)
        head = self._fh.read(_BLOCK_HEAD.size)
        if len(head) < _BLOCK_HEAD.size:
            raise CellFormatError(f"{self.path}: truncated block at offset {offset}")
        sid, sx, sy, k = _BLOCK_HEAD.unpack(head)
        if sid != site_id:
            raise CellFormatError(
                f"{self.path}: block at offset {offset} has site id {sid}, expected {site_id}")
        if not 3 <= k <= _MAX_VERTICES:
            raise CellFormatError(
                f"{self.path}: block at offset {offset} has vertex count {k}")
        body = self._fh.read(16 * k + 4 * k)
        if len(body) < 16 * k + 4 * k:
            raise CellFormatError(f"{self.path}: truncated block at offset {offset}")
        coords = struct.unpack_from(f"<{2 * k}d", body, 0)
        raw_nbrs = struct.unpack_from(f"<{k}I", body, 16 * k)
        self.cell_reads += 1
        try:
            verts = tuple(Point2(coords[2 * i], coords[2 * i + 1]) for i in range(k))
        except ValueError as exc:
            raise CellFormatError(
                f"{self.path}: block at offset {offset}: {exc}") from exc
        poly = ConvexPolygon(verts, _canonical_upper_end(verts))
        nbrs = tuple(CLIP_EDGE if v == SENTINEL else int(v) for v in raw_nbrs)
        cell = VoronoiCell(site_id, Point2(sx, sy), poly, nbrs)
        if self._cache is not None:
            self._cache[site_id] = cell
            if len(self._cache) > self._cache_size:
                self._cache.popitem(last=False)
        return cell

    def read_diagram(self) -> VoronoiDiagram:
        """Read every block and reassemble the diagram.

        Adjacency is rebuilt from the stored per-edge pointers, i.e. the
        edge-sharing relation.
        """
        cells = tuple(self.read_cell(i) for i in range(self.cell_count))
        neighbor_sets: list[set[int]] = [set() for _ in range(self.cell_count)]
        for cell in cells:
            for nb in cell.neighbor_ids:
                if nb != CLIP_EDGE:
                    neighbor_sets[cell.site_id].add(nb)
        return VoronoiDiagram(
            sites=tuple(c.site for c in cells),
            cells=cells,
            clip_box=self.clip_box,
            adjacency=tuple(frozenset(s) for s in neighbor_sets),
        )


def write_cells(diagram: VoronoiDiagram, destination) -> CellFile:
    """Serialize the diagram and return an open read handle on the result."""
    path = os.fspath(destination)
    count = len(diagram.cells)
    blocks: list[bytes] = []
    for cell in diagram.cells:
        verts = cell.polygon.vertices
        k = len(verts)
        coords = [c for v in verts for c in (v.x, v.y)]
        nbrs = [SENTINEL if t == CLIP_EDGE else t for t in cell.neighbor_ids]
        blocks.append(
            _BLOCK_HEAD.pack(cell.site_id, cell.site.x, cell.site.y, k)
            + struct.pack(f"<{2 * k}d", *coords)
            + struct.pack(f"<{k}I", *nbrs))
    base = _HEADER.size + 8 * count
    offsets = []
    pos = base
    for b in blocks:
        offsets.append(pos)
        pos += len(b)
    box = diagram.clip_box
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, count, PRECISION_TAG,
                              box.xmin, box.ymin, box.xmax, box.ymax))
        fh.write(struct.pack(f"<{count}Q", *offsets))
        for b in blocks:
            fh.write(b)
    return CellFile(path)


def read_cell(handle: CellFile, site_id: int) -> VoronoiCell:
    return handle.read_cell(site_id)
