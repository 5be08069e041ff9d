"""Executable oracles: curvature audit, raster masks, inscribed-disk test,
morphological-opening baseline and subset comparisons.

Raster operations are numpy scanline fills plus scipy distance transforms;
a cell is set iff its center lies inside the region by crossing parity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import geom
from .boundary import CONCAVE, CONVEX, Region
from .errors import GridMismatch, ResolutionTooCoarse
from .geom import Point

VIOLATION_RADIUS = "ConvexArcRadiusBelow1"
VIOLATION_VERTEX = "ConvexVertex"
VIOLATION_PROVENANCE = "ConcaveFeatureNotOnInput"


@dataclass
class CurvatureReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def kinds(self):
        return sorted({v[1] for v in self.violations})


def curvature_audit(region: Region) -> CurvatureReport:
    """Flag convex arcs under unit radius, convex vertices, and concave
    features that did not come from the input boundary."""
    rep = CurvatureReport()
    for loop in region.loops():
        for a in loop:
            if a.geom.is_convex() and a.geom.radius < 1.0 - 1e-9:
                rep.violations.append(("arc", VIOLATION_RADIUS, a.id, 1.0 - a.geom.radius))
            if a.geom.is_concave() and not a.is_input():
                rep.violations.append(("arc", VIOLATION_PROVENANCE, a.id, 0.0))
            v = a.src
            cls = region.classify_vertex(v)
            if cls == CONVEX:
                rep.violations.append(("vertex", VIOLATION_VERTEX, v.id, 0.0))
            elif cls == CONCAVE and not v.on_input:
                rep.violations.append(("vertex", VIOLATION_PROVENANCE, v.id, 0.0))
    return rep


@dataclass
class RasterMask:
    ox: float
    oy: float
    h: float
    grid: np.ndarray  # bool [ny, nx]

    def area(self):
        return float(self.grid.sum()) * self.h * self.h

    def same_frame(self, other):
        return (abs(self.ox - other.ox) < 1e-12 and abs(self.oy - other.oy) < 1e-12
                and abs(self.h - other.h) < 1e-15 and self.grid.shape == other.grid.shape)


def _row_crossings(arcs, ys):
    """Per-row sorted x-crossings of a set of arcs with horizontal lines.

    Rows that graze an endpoint or an extremum are retried with a small
    deterministic jitter.
    """
    ny = len(ys)
    rows = [[] for _ in range(ny)]

    def gather(y, out):
        for g in arcs:
            if g.kind == "seg":
                y0, y1 = g.start.y, g.end.y
                if y0 == y1:
                    continue
                lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
                if lo <= y < hi:  # half-open: vertex-sharing rows count once
                    t = (y - y0) / (y1 - y0)
                    out.append(g.start.x + t * (g.end.x - g.start.x))
            else:
                cy, r = g.center.y, g.radius
                dy = y - cy
                if abs(dy) >= r:
                    continue
                s = math.sqrt(r * r - dy * dy)
                for x in (g.center.x - s, g.center.x + s):
                    p = Point(x, y)
                    t = g.param_of(p)
                    if 0.0 <= t <= 1.0:
                        # count only if the arc locally crosses the row
                        h = max(1e-7, 1e-6 / max(g.length(), 1e-9))
                        ya = g.point_at(max(t - h, 0.0)).y
                        yb = g.point_at(min(t + h, 1.0)).y
                        if t <= h:
                            ya = g.point_at(t - h).y  # extrapolate for endpoint rows
                        if t >= 1.0 - h:
                            yb = g.point_at(t + h).y
                        if (ya - y) * (yb - y) < 0.0:
                            out.append(x)
        out.sort()

    near = set()
    feat_y = []
    for g in arcs:
        feat_y.append(g.start.y)
        feat_y.append(g.end.y)
        if g.kind == "arc":
            feat_y.append(g.center.y - g.radius)
            feat_y.append(g.center.y + g.radius)
    feat_y = np.array(sorted(set(feat_y)))
    for i, y in enumerate(ys):
        k = np.searchsorted(feat_y, y)
        for kk in (k - 1, k):
            if 0 <= kk < len(feat_y) and abs(feat_y[kk] - y) < 1e-7:
                near.add(i)
                break

    for i, y in enumerate(ys):
        yq = y + (1.37e-4 * (ys[1] - ys[0] if ny > 1 else 1e-3) if i in near else 0.0)
        out = []
        gather(yq, out)
        tries = 0
        while len(out) % 2 == 1 and tries < 4:
            tries += 1
            yq += 3.1e-4 * (ys[1] - ys[0] if ny > 1 else 1e-3)
            out = []
            gather(yq, out)
        if len(out) % 2 == 1:
            raise ArithmeticError(f"odd crossing count at row y={y}")
        rows[i] = out
    return rows


def rasterize(arcs, h=0.01, pad=0.25, frame=None) -> RasterMask:
    """Occupancy mask of the region bounded by the given loops of arcs."""
    if not arcs:
        if frame is None:
            return RasterMask(0.0, 0.0, h, np.zeros((1, 1), dtype=bool))
        ox, oy, nx, ny = frame
        return RasterMask(ox, oy, h, np.zeros((ny, nx), dtype=bool))
    if frame is None:
        xs0 = min(g.bbox()[0] for g in arcs) - pad
        ys0 = min(g.bbox()[1] for g in arcs) - pad
        xs1 = max(g.bbox()[2] for g in arcs) + pad
        ys1 = max(g.bbox()[3] for g in arcs) + pad
        nx = int(math.ceil((xs1 - xs0) / h))
        ny = int(math.ceil((ys1 - ys0) / h))
        ox, oy = xs0, ys0
    else:
        ox, oy, nx, ny = frame
    ys = oy + (np.arange(ny) + 0.5) * h
    grid = np.zeros((ny, nx), dtype=bool)
    rows = _row_crossings(arcs, ys)
    for i, xs in enumerate(rows):
        for k in range(0, len(xs), 2):
            a = int(math.ceil((xs[k] - ox) / h - 0.5))
            b = int(math.floor((xs[k + 1] - ox) / h - 0.5))
            if b >= a:
                grid[i, max(a, 0):min(b + 1, nx)] = True
    return RasterMask(ox, oy, h, grid)


def rasterize_region(region: Region, h=0.01, pad=0.25, frame=None) -> RasterMask:
    arcs = [a.geom for loop in region.loops() for a in loop]
    if frame is None and not arcs:
        return RasterMask(0.0, 0.0, h, np.zeros((1, 1), dtype=bool))
    return rasterize(arcs, h, pad, frame)


def frame_of(mask: RasterMask):
    return (mask.ox, mask.oy, mask.h, mask.grid.shape[1], mask.grid.shape[0])


def frame_tuple(mask: RasterMask):
    return (mask.ox, mask.oy, mask.grid.shape[1], mask.grid.shape[0])


def opening(mask: RasterMask, radius: float = 1.0) -> RasterMask:
    """Morphological opening by a Euclidean disk (erode then dilate)."""
    rc = radius / mask.h
    inside = ndimage.distance_transform_edt(mask.grid)
    eroded = inside > rc
    if not eroded.any():
        return RasterMask(mask.ox, mask.oy, mask.h, eroded)
    outside = ndimage.distance_transform_edt(~eroded)
    dilated = outside <= rc
    return RasterMask(mask.ox, mask.oy, mask.h, dilated)


def double_offset_baseline(region: Region, h=0.01) -> RasterMask:
    """Offset inward by 1 then outward by 1, on the raster."""
    if h > 0.02:
        raise ResolutionTooCoarse(f"h={h} too coarse for the baseline")
    return opening(rasterize_region(region, h, pad=1.5))


def raster_subset(A: RasterMask, B: RasterMask, slack_cells: int = 0) -> bool:
    """True iff every set cell of A is within `slack_cells` (Chebyshev) of a
    set cell of B."""
    if not A.same_frame(B):
        raise GridMismatch("raster frames differ")
    if slack_cells == 0:
        allowed = B.grid
    else:
        k = 2 * slack_cells + 1
        allowed = ndimage.binary_dilation(B.grid, structure=np.ones((k, k), dtype=bool))
    return bool((A.grid & ~allowed).sum() == 0)


def inscribed_unit_disk(loop_arcs, h=0.01) -> bool:
    """True iff the loop's interior admits an open unit disk (raster test)."""
    if h > 0.05:
        raise ResolutionTooCoarse(f"h={h} exceeds the 0.05 limit")
    mask = rasterize(loop_arcs, h, pad=0.1)
    if not mask.grid.any():
        return False
    inside = ndimage.distance_transform_edt(mask.grid) * h
    return bool(inside.max() >= 1.0 - 2.0 * h)


def region_components_pass_disk(region: Region, h=0.01):
    results = []
    for loop in region.loops():
        results.append(inscribed_unit_disk([a.geom for a in loop], h))
    return results
