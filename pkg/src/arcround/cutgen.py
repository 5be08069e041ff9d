"""Turn a violating object popped from the stack into a cut specification."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import bisector, geom
from .bisector import OscSide, PinSide, build_bisector, first_unit_clearance, intersect_sub_bisectors
from .boundary import CONCAVE, CONVEX, Region
from .errors import ChordTooLong, NumericalFailure, PerfectArc
from .geom import ArcGeom, Circle, Point, add, dist, mul, rot90, sub, unit


@dataclass
class CutSpec:
    """Either a unit-radius cut arc with located endpoints, or a whole loop."""

    remove_anchor: object = None     # vertex/arc whose loop is removed entirely
    circle: Optional[Circle] = None
    s_loc: tuple = None              # ('vertex', vid) | ('arc', aid, t)
    t_loc: tuple = None
    s_pt: Point = None
    t_pt: Point = None

    @property
    def is_remove(self):
        return self.remove_anchor is not None

    def span_angle(self):
        a0 = geom.angle_of(sub(self.s_pt, self.circle.center))
        a1 = geom.angle_of(sub(self.t_pt, self.circle.center))
        return geom.norm_angle(a1 - a0)


def _osc_side(a):
    return OscSide(a.geom, a.id, a.src.id, a.dst.id)


def _spec_from_clearance(region, fc) -> CutSpec:
    span_s = geom.angle_of(sub(fc.p0, fc.x))
    span_t = geom.angle_of(sub(fc.p1, fc.x))
    span = geom.norm_angle(span_t - span_s)
    if dist(fc.p0, fc.p1) <= region.tol.eps_coord * 8:
        raise NumericalFailure("degenerate zero-span cut arc")
    if span > math.pi + 1e-6:
        raise NumericalFailure(f"cut arc spans {span} > pi")
    return CutSpec(circle=Circle(fc.x, 1.0), s_loc=fc.p0_loc, t_loc=fc.p1_loc,
                   s_pt=fc.p0, t_pt=fc.p1)


def cut_for_small_convex_arc(region: Region, a) -> CutSpec:
    """Case (a): replace a convex arc of radius < 1 by the unit arc over its chord."""
    g = a.geom
    s, t = g.start, g.end
    ch = dist(s, t)
    if ch > 2.0 + region.tol.eps_coord:
        raise ChordTooLong(f"chord {ch} > 2 on a small convex arc")
    h = ch / 2.0
    m = mul(add(s, t), 0.5)
    up = unit(rot90(sub(t, s)))
    x3 = add(m, mul(up, math.sqrt(max(1.0 - h * h, 0.0))))
    fc = bisector.ClearancePoint(x3, 1.0, s, t, ("vertex", a.src.id), ("vertex", a.dst.id))
    return _spec_from_clearance(region, fc)


def cut_for_convex_vertex(region: Region, v) -> CutSpec:
    """Case (b): clear the first unit-clearance point of the vertex bisector."""
    a0, a1 = v.in_arc, v.out_arc
    xi = build_bisector(_osc_side(a0), _osc_side(a1), v.pos, region.tol)
    fc = first_unit_clearance(xi, region.tol)
    if fc is None:
        return CutSpec(remove_anchor=v)
    return _spec_from_clearance(region, fc)


def cut_for_cut_arc(region: Region, b) -> CutSpec:
    """Case (c): eliminate a non-perfect cut arc.

    A concave endpoint delegates to the vertex case on the other endpoint;
    otherwise the two sub-bisectors across the arc are intersected and the
    combined bisector is traced from there.
    """
    cs = region.classify_vertex(b.src)
    ct = region.classify_vertex(b.dst)
    if cs != CONVEX and ct != CONVEX:
        raise PerfectArc(f"arc {b.id} is perfect")
    if cs == CONCAVE:
        return cut_for_convex_vertex(region, b.dst)
    if ct == CONCAVE:
        return cut_for_convex_vertex(region, b.src)

    a0 = b.src.in_arc
    a1 = b.dst.out_arc
    xi0 = build_bisector(_osc_side(a0), _osc_side(b), b.src.pos, region.tol)
    xi1 = build_bisector(_osc_side(b), _osc_side(a1), b.dst.pos, region.tol)
    x0, r, pc0, pc1 = intersect_sub_bisectors(xi0, xi1, b.geom, region.tol)
    if r > 1.0 + 1e-6:
        raise NumericalFailure(f"sub-bisector clearance {r} exceeds 1 over a cut arc")
    xi = build_bisector(_osc_side(a0), _osc_side(a1), x0, region.tol)
    fc = first_unit_clearance(xi, region.tol)
    if fc is None:
        return CutSpec(remove_anchor=b)
    try:
        return _spec_from_clearance(region, fc)
    except NumericalFailure:
        # degenerate shared-contact ray reached radius 1: the disk touches the
        # boundary once only, so no cut arc exists and the component goes
        return CutSpec(remove_anchor=b)
