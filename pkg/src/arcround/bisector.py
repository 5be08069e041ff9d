"""Clearance bisector between two boundary sites.

The curve starts at a given point and consists of up to three intervals:
both sites osculated, one endpoint pinned, both endpoints pinned (a
half-line).  Pieces are stored implicitly as (site pair, parameter window);
every query reduces to line/circle work on the sites, so no explicit conic
coefficients are ever formed.

Parameterization per piece:
  'a1'   contact point on the second site's arc, moving forward
  'a0'   contact point on the first site's arc, moving backward
  'ray'  degenerate shared-contact states (tangential vertex or a repeated
         site): straight ray along the common normal, param = clearance gain
  'line' both endpoints pinned: the half-line, param = signed position along
         the direction, measured from the chord midpoint
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from . import geom
from .geom import (ArcGeom, Circle, Point, Tolerance, DEFAULT_TOL,
                   add, sub, mul, dot, cross, dist, unit, rot90)
from .errors import InvalidStart, NumericalFailure, PointNotOnCurve


class PinSide(NamedTuple):
    point: Point
    vref: object  # vertex id (or None in site-only tests)


class OscSide(NamedTuple):
    geom_: ArcGeom
    aref: object        # arc id (or None)
    src_vref: object    # vertex id at geom_.start
    dst_vref: object    # vertex id at geom_.end


def _is_pin(side):
    return isinstance(side, PinSide)


class ClearancePoint(NamedTuple):
    x: Point
    radius: float
    p0: Point
    p1: Point
    p0_loc: tuple  # ('vertex', vref) | ('arc', aref, t)
    p1_loc: tuple


# -- scalar site helpers ------------------------------------------------------


def _solve_c(side, a, n, tol):
    """Clearance c so that a + c*n is equidistant from `side` (osculation metric).

    a is the contact on the other (axis) site, n its left normal.  Returns
    None when no consistent c >= 0 exists.
    """
    if _is_pin(side):
        w = sub(side.point, a)
        den = 2.0 * dot(w, n)
        if den <= tol.eps_coord:
            return None
        c = dot(w, w) / den
        return c if c >= -tol.eps_coord else None
    g = side.geom_
    if g.kind == "seg":
        m = g.left_normal_at(0.0)
        den = 1.0 - dot(n, m)
        if abs(den) < 1e-12:
            return None
        c = dot(sub(a, g.start), m) / den
    else:
        w = sub(a, g.center)
        if g.ccw:
            den = 2.0 * (dot(w, n) + g.radius)
        else:
            den = 2.0 * (dot(w, n) - g.radius)
        if abs(den) < 1e-12:
            return None
        c = (g.radius * g.radius - dot(w, w)) / den
    if c < -tol.eps_coord:
        return None
    if g.kind == "arc" and g.ccw and c > g.radius + tol.eps_coord:
        return None
    return c


def _contact(side, x, tol):
    """Contact point of side's carrier for a center x: (point, param) or None."""
    if _is_pin(side):
        return side.point, None
    g = side.geom_
    if g.kind == "seg":
        t = g.param_of(x)
        return g.point_at(t), t
    r = dist(x, g.center)
    if r <= tol.eps_coord:
        return None
    if g.ccw and r > g.radius + tol.eps_coord * 8:
        return None
    p = add(g.center, mul(sub(x, g.center), g.radius / r))
    return p, g.param_of(p)


def _side_dist(side, x):
    """Signed osculation distance from center x to the side."""
    if _is_pin(side):
        return dist(x, side.point)
    g = side.geom_
    if g.kind == "seg":
        return dot(sub(x, g.start), g.left_normal_at(0.0))
    r = dist(x, g.center)
    return (g.radius - r) if g.ccw else (r - g.radius)


def _loc_of(side, t, p, tol):
    """Location descriptor for a contact: snaps to the arc's end vertices."""
    if _is_pin(side):
        return ("vertex", side.vref)
    g = side.geom_
    slack = tol.eps_coord / max(g.length(), tol.eps_coord) + 1e-12
    if t is not None:
        if t <= slack:
            return ("vertex", side.src_vref)
        if t >= 1.0 - slack:
            return ("vertex", side.dst_vref)
    return ("arc", side.aref, min(max(t, 0.0), 1.0))


# -- pieces -------------------------------------------------------------------


@dataclass
class Piece:
    axis: str              # 'a1' | 'a0' | 'ray' | 'line'
    side0: object
    side1: object
    q0: float              # start raw param
    q1: Optional[float]    # end raw param (None = unbounded)
    x_start: Point
    d_start: float
    # ray pieces
    anchor: Point = None   # contact point (ray), chord midpoint (line)
    direction: Point = None
    half_chord: float = 0.0  # line pieces

    def interval_kind(self):
        pins = int(_is_pin(self.side0)) + int(_is_pin(self.side1))
        return 1 + pins

    def progress(self, q):
        """Monotone traversal key from the piece start."""
        if self.axis == "a0":
            return self.q0 - q
        return q - self.q0

    def in_window(self, q, slack):
        if self.axis == "a0":
            hi = self.q0 + slack
            lo = (self.q1 - slack) if self.q1 is not None else -math.inf
            return lo <= q <= hi
        lo = self.q0 - slack
        hi = (self.q1 + slack) if self.q1 is not None else math.inf
        return lo <= q <= hi

    def eval(self, q, tol):
        """(x, clearance, p0, p1) at raw param q, or None off the locus."""
        if self.axis == "line":
            x = add(self.anchor, mul(self.direction, q))
            d = math.hypot(self.half_chord, q)
            return x, d, self.side0.point, self.side1.point
        if self.axis == "ray":
            x = add(self.anchor, mul(self.direction, self.d_start + q))
            d = self.d_start + q
            c0 = self.side0.point if _is_pin(self.side0) else self.anchor
            c1 = self.side1.point if _is_pin(self.side1) else self.anchor
            return x, d, c0, c1
        if self.axis == "a1":
            g = self.side1.geom_
            a = g.point_at(q)
            n = g.left_normal_at(q)
            c = _solve_c(self.side0, a, n, tol)
            if c is None:
                return None
            x = add(a, mul(n, c))
            ct = _contact(self.side0, x, tol)
            if ct is None:
                return None
            return x, c, ct[0], a
        g = self.side0.geom_
        a = g.point_at(q)
        n = g.left_normal_at(q)
        c = _solve_c(self.side1, a, n, tol)
        if c is None:
            return None
        x = add(a, mul(n, c))
        ct = _contact(self.side1, x, tol)
        if ct is None:
            return None
        return x, c, a, ct[0]

    def locate(self, x, tol):
        """Raw param of a point assumed to lie on the piece."""
        if self.axis == "line":
            return dot(sub(x, self.anchor), self.direction)
        if self.axis == "ray":
            return dot(sub(x, self.anchor), self.direction) - self.d_start
        g = self.side1.geom_ if self.axis == "a1" else self.side0.geom_
        side = self.side1 if self.axis == "a1" else self.side0
        ct = _contact(side, x, tol)
        return None if ct is None else ct[1]


@dataclass
class BisectorCurve:
    side0_start: object
    side1_start: object
    x0: Point
    pieces: list
    terminated: bool       # stopped at the first pin with s(A0) == t(A1)
    start_interval: int

    def sample(self, per_piece=40, tail=2.0, tol=DEFAULT_TOL):
        """Ordered (x, d, p0, p1) samples along the curve, for tests."""
        out = []
        for pc in self.pieces:
            q1 = pc.q1
            if q1 is None:
                q1 = pc.q0 + tail if pc.axis in ("ray", "line") else pc.q0 + 1.0
            for k in range(per_piece + 1):
                q = pc.q0 + (q1 - pc.q0) * k / per_piece
                got = pc.eval(q, tol)
                if got is not None:
                    out.append(got)
        return out


# -- construction -------------------------------------------------------------


_BISECT_ITERS = 80


def _pin_candidates(side0, side1):
    """Pin targets: s(A0) for side0, t(A1) for side1 (None when already pinned)."""
    p0 = None if _is_pin(side0) else (side0.geom_.start, side0.src_vref)
    p1 = None if _is_pin(side1) else (side1.geom_.end, side1.dst_vref)
    return p0, p1


def _ray_pin_param(anchor, n, d0, p):
    """Clearance at which the circle centered on the ray first contains p."""
    w = sub(p, anchor)
    den = 2.0 * dot(w, n)
    if den <= 1e-12:
        return None
    d = dot(w, w) / den
    return d - d0 if d >= d0 - 1e-12 else None


def build_bisector(side0, side1, x0: Point, tol: Tolerance = DEFAULT_TOL,
                   max_pieces: int = 8) -> BisectorCurve:
    """Trace the bisector from x0 until both sides pin (or it terminates)."""
    s0, s1 = side0, side1
    d_parts = []
    for s in (s0, s1):
        d_parts.append(_side_dist(s, x0))
    d = max(min(d_parts), 0.0)
    if abs(d_parts[0] - d_parts[1]) > 1e-6 + 1e-6 * max(1.0, d):
        raise InvalidStart(f"x0 not equidistant: {d_parts}")

    # promote sides whose osculation contact is already off the arc, or whose
    # pin target already lies on the clearance circle
    def normalize(s0, s1, x, d):
        changed = True
        first_pin_terminates = False
        while changed:
            changed = False
            for idx in (0, 1):
                s = s0 if idx == 0 else s1
                if _is_pin(s):
                    continue
                g = s.geom_
                slack = tol.eps_coord / max(g.length(), tol.eps_coord) * 64 + 1e-9
                ct = _contact(s, x, tol)
                pin_pt = g.start if idx == 0 else g.end
                pin_ref = s.src_vref if idx == 0 else s.dst_vref
                off_arc = ct is None or ct[1] < -slack or ct[1] > 1.0 + slack
                pin_now = abs(dist(x, pin_pt) - d) <= 1e-7 + 1e-7 * d and d > tol.eps_coord
                if off_arc or (pin_now and off_arc is False and _near(ct[0], pin_pt, tol)):
                    ps = PinSide(pin_pt, pin_ref)
                    if idx == 0:
                        s0 = ps
                    else:
                        s1 = ps
                    changed = True
        return s0, s1

    s0, s1 = normalize(s0, s1, x0, d)

    pieces = []
    terminated = False
    x_cur, d_cur = x0, d
    start_interval = 1 + int(_is_pin(s0)) + int(_is_pin(s1))
    first_pin_done = start_interval > 1

    def other_endpoint_same(ps_point, ps_ref, s_other, other_is_side1):
        if _is_pin(s_other):
            op, oref = s_other.point, s_other.vref
        else:
            op = s_other.geom_.end if other_is_side1 else s_other.geom_.start
            oref = s_other.dst_vref if other_is_side1 else s_other.src_vref
        if ps_ref is not None and oref is not None:
            return ps_ref == oref
        return dist(ps_point, op) <= tol.eps_coord * 8

    guard = 0
    while True:
        guard += 1
        if guard > max_pieces:
            raise NumericalFailure("bisector produced too many pieces")

        if _is_pin(s0) and _is_pin(s1):
            p0, p1 = s0.point, s1.point
            ch = dist(p0, p1)
            if ch <= tol.eps_coord:
                terminated = True
                break
            w = unit(rot90(sub(p1, p0)))
            m = mul(add(p0, p1), 0.5)
            q0 = dot(sub(x_cur, m), w)
            pieces.append(Piece("line", s0, s1, q0, None, x_cur, d_cur,
                                anchor=m, direction=w, half_chord=ch / 2.0))
            break

        # degenerate shared-contact states -> ray along the common normal
        ray_info = _ray_state(s0, s1, x_cur, d_cur, tol)
        if ray_info is not None:
            anchor, n = ray_info
            pin0, pin1 = _pin_candidates(s0, s1)
            ev = []
            if pin0 is not None:
                q = _ray_pin_param(anchor, n, d_cur, pin0[0])
                if q is not None:
                    ev.append((q, 0, pin0))
            if pin1 is not None:
                q = _ray_pin_param(anchor, n, d_cur, pin1[0])
                if q is not None:
                    ev.append((q, 1, pin1))
            if not ev:
                pieces.append(Piece("ray", s0, s1, 0.0, None, x_cur, d_cur,
                                    anchor=anchor, direction=n))
                break
            ev.sort(key=lambda e: e[0])
            q_end, which, pin = ev[0]
            pieces.append(Piece("ray", s0, s1, 0.0, q_end, x_cur, d_cur,
                                anchor=anchor, direction=n))
            x_cur = add(anchor, mul(n, d_cur + q_end))
            d_cur = d_cur + q_end
            newpin = PinSide(pin[0], pin[1])
            if which == 0:
                other = s1
                s0 = newpin
            else:
                other = s0
                s1 = newpin
            if not first_pin_done:
                first_pin_done = True
                if other_endpoint_same(pin[0], pin[1], other, which == 0):
                    terminated = True
                    break
            # simultaneous pin of the other side
            if len(ev) > 1 and abs(ev[1][0] - q_end) <= tol.eps_param * 8:
                q2, which2, pin2 = ev[1]
                if which2 == 0:
                    s0 = PinSide(pin2[0], pin2[1])
                else:
                    s1 = PinSide(pin2[0], pin2[1])
            continue

        # generic interval 1 / 2 piece
        if not _is_pin(s1):
            axis, osc_side, other = "a1", s1, s0
        else:
            axis, osc_side, other = "a0", s0, s1
        g = osc_side.geom_
        ct = _contact(osc_side, x_cur, tol)
        if ct is None:
            raise NumericalFailure("lost osculation contact")
        q_start = ct[1]
        q_far = 1.0 if axis == "a1" else 0.0

        def val(q):
            pc = Piece(axis, s0, s1, q_start, None, x_cur, d_cur)
            return pc.eval(q, tol)

        # validity prefix toward q_far
        q_lim = q_far
        if val(q_far) is None:
            lo, hi = q_start, q_far
            for _ in range(_BISECT_ITERS):
                mid = 0.5 * (lo + hi)
                if val(mid) is not None:
                    lo = mid
                else:
                    hi = mid
                if abs(hi - lo) < tol.eps_param:
                    break
            q_lim = lo

        got_lim = val(q_lim)
        if got_lim is None:
            got_lim = val(q_lim - math.copysign(tol.eps_param, q_lim - q_start))

        # pin event of the non-axis side: its contact crosses the arc end
        # (|x - pin| - clearance only touches zero there, so bisect the
        # contact parameter instead, which changes sign at the event)
        pin_other = _pin_candidates(s0, s1)[0 if axis == "a1" else 1]
        q_pin_other = None
        if pin_other is not None and not _is_pin(other):
            def hfun(q):
                got = val(q)
                if got is None:
                    return None
                ct = _contact(other, got[0], tol)
                if ct is None:
                    return None
                # positive before the pin, negative after
                return ct[1] if axis == "a1" else (1.0 - ct[1])
            h_end = hfun(q_lim)
            h_beg = hfun(q_start)
            if h_beg is not None and h_beg <= 1e-12:
                q_pin_other = q_start
            elif h_end is not None and h_end <= 0.0:
                lo, hi = q_start, q_lim
                for _ in range(_BISECT_ITERS):
                    mid = 0.5 * (lo + hi)
                    hm = hfun(mid)
                    if hm is None or hm > 0.0:
                        lo = mid
                    else:
                        hi = mid
                    if abs(hi - lo) < tol.eps_param:
                        break
                q_pin_other = hi
            elif h_end is not None and h_end <= 1e-7:
                q_pin_other = q_lim  # contact ends exactly on the pin

        # pin event of the axis side: contact reaches the far end of its arc;
        # a validity pole at the far end with the pin condition holding there
        # is the same event (the clearance solver degenerates exactly then)
        q_pin_axis = None
        if abs(q_lim - q_far) < tol.eps_param * 4:
            q_pin_axis = q_lim
        elif got_lim is not None:
            far_pt = g.end if axis == "a1" else g.start
            if abs(dist(got_lim[0], far_pt) - got_lim[1]) <= 1e-6:
                q_pin_axis = q_lim

        events = []
        if q_pin_other is not None:
            events.append((abs(q_pin_other - q_start), "other", q_pin_other))
        if q_pin_axis is not None:
            events.append((abs(q_pin_axis - q_start), "axis", q_pin_axis))
        if not events:
            # validity pole before any event: clearance blows up inside this
            # piece; emit it open-ended (a radius-1 crossing must live here)
            pieces.append(Piece(axis, s0, s1, q_start, q_lim, x_cur, d_cur))
            break
        events.sort(key=lambda e: e[0])
        _, which_ev, q_end = events[0]
        both = len(events) > 1 and abs(events[1][0] - events[0][0]) <= tol.eps_param * 8
        pieces.append(Piece(axis, s0, s1, q_start, q_end, x_cur, d_cur))
        got = val(q_end)
        if got is None:
            got = val(q_end - math.copysign(tol.eps_param, q_end - q_start))
        if got is None:
            raise NumericalFailure("could not evaluate piece end")
        x_cur, d_cur = got[0], got[1]

        def apply_pin(ev_name):
            nonlocal s0, s1
            if ev_name == "axis":
                pin_pt = g.end if axis == "a1" else g.start
                pin_ref = osc_side.dst_vref if axis == "a1" else osc_side.src_vref
                if axis == "a1":
                    s1 = PinSide(pin_pt, pin_ref)
                else:
                    s0 = PinSide(pin_pt, pin_ref)
                return pin_pt, pin_ref, (axis == "a0")
            pin_pt, pin_ref = pin_other
            if axis == "a1":
                s0 = PinSide(pin_pt, pin_ref)
            else:
                s1 = PinSide(pin_pt, pin_ref)
            return pin_pt, pin_ref, (axis == "a1")

        pin_pt, pin_ref, pinned_is_side0 = apply_pin(which_ev)
        if both:
            apply_pin(events[1][1])
        if not first_pin_done:
            first_pin_done = True
            other_now = s1 if pinned_is_side0 else s0
            if other_endpoint_same(pin_pt, pin_ref, other_now, pinned_is_side0):
                terminated = True
                break

    return BisectorCurve(side0, side1, x0, pieces, terminated, start_interval)


def _near(p, q, tol):
    return dist(p, q) <= tol.eps_coord * 8


def _ray_state(s0, s1, x, d, tol):
    """Detect shared-contact degeneracy; returns (contact, normal) or None."""
    if _is_pin(s0) or _is_pin(s1):
        return None
    c0 = _contact(s0, x, tol)
    c1 = _contact(s1, x, tol)
    same_site = s1.aref is not None and s0.aref == s1.aref
    if c0 is None or c1 is None:
        if same_site and (c0 or c1):
            ct = c0 or c1
            n = unit(sub(x, ct[0])) if d > tol.eps_coord else s0.geom_.left_normal_at(ct[1])
            return ct[0], n
        return None
    if dist(c0[0], c1[0]) > max(tol.eps_coord * 64, d * 1e-6, 1e-9):
        return None
    anchor = c0[0]
    if d > tol.eps_coord:
        n = unit(sub(x, anchor))
    else:
        # start at the shared vertex: tangential iff the normals agree
        n0 = s0.geom_.left_normal_at(1.0)
        n1 = s1.geom_.left_normal_at(0.0)
        if math.atan2(abs(cross(n0, n1)), dot(n0, n1)) > tol.eps_angle * 64:
            return None
        n = n0
    return anchor, n


# -- queries ------------------------------------------------------------------


def clearance_at(xi: BisectorCurve, x: Point, tol: Tolerance = DEFAULT_TOL) -> ClearancePoint:
    """Clearance circle data for a point on the curve."""
    best = None
    for pc in xi.pieces:
        q = pc.locate(x, tol)
        if q is None or not pc.in_window(q, 1e-7):
            continue
        got = pc.eval(q, tol)
        if got is None:
            continue
        xx, c, p0, p1 = got
        err = dist(xx, x)
        if best is None or err < best[0]:
            loc0 = _loc_of(pc.side0, pc.side0 and (None if _is_pin(pc.side0) else _contact(pc.side0, xx, tol)[1]), p0, tol)
            loc1 = _loc_of(pc.side1, (None if _is_pin(pc.side1) else _contact(pc.side1, xx, tol)[1]), p1, tol)
            best = (err, ClearancePoint(xx, c, p0, p1, loc0, loc1))
    if best is None or best[0] > 1e-6:
        raise PointNotOnCurve(f"point {x} not located on the bisector")
    return best[1]


def _offset_locus_of(side, tol):
    if _is_pin(side):
        return [geom.CircleLocus(Circle(side.point, 1.0))]
    return geom.unit_offset_locus(side.geom_, tol)


def _axis_window_slack(pc, tol):
    if pc.axis in ("ray", "line"):
        return 1e-9
    g = pc.side1.geom_ if pc.axis == "a1" else pc.side0.geom_
    return tol.eps_coord / max(g.length(), tol.eps_coord) * 64 + 1e-9


def _candidate_on_piece(pc, x, tol):
    """Validate a radius-1 center against a piece; returns ClearancePoint or None."""
    q = pc.locate(x, tol)
    if q is None:
        return None
    slack = _axis_window_slack(pc, tol)
    if not pc.in_window(q, slack):
        return None
    got = pc.eval(q, tol)
    if got is None:
        return None
    xx, c, p0, p1 = got
    if dist(xx, x) > 1e-7 or abs(c - 1.0) > 1e-6:
        return None
    # membership of the non-axis contact
    for side, p in ((pc.side0, p0), (pc.side1, p1)):
        if _is_pin(side):
            continue
        ct = _contact(side, xx, tol)
        if ct is None:
            return None
        s = tol.eps_coord / max(side.geom_.length(), tol.eps_coord) * 64 + 1e-9
        if ct[1] < -s or ct[1] > 1.0 + s:
            return None
    t0 = None if _is_pin(pc.side0) else _contact(pc.side0, xx, tol)[1]
    t1 = None if _is_pin(pc.side1) else _contact(pc.side1, xx, tol)[1]
    return q, ClearancePoint(xx, 1.0, p0, p1,
                             _loc_of(pc.side0, t0, p0, tol),
                             _loc_of(pc.side1, t1, p1, tol))


def first_unit_clearance(xi: BisectorCurve, tol: Tolerance = DEFAULT_TOL) -> Optional[ClearancePoint]:
    """First point along the curve with clearance exactly 1.

    None means the curve terminated before reaching unit clearance (the
    whole component is to be removed).  A shared-contact ray reaching unit
    clearance without pinning yields None as well: the unit disk there
    touches the boundary only once, so no valid cut arc exists.
    """
    for pc in xi.pieces:
        if pc.axis == "ray":
            q = 1.0 - pc.d_start
            if q >= -tol.eps_coord and (pc.q1 is None or q <= pc.q1 + tol.eps_param * 8):
                if pc.q1 is not None and abs(q - pc.q1) <= tol.eps_param * 8:
                    continue  # reaches radius 1 exactly at the transition
                return None  # degenerate: projections coincide
            continue
        if pc.axis == "line":
            h = pc.half_chord
            if h > 1.0 + 1e-9:
                continue
            s = math.sqrt(max(1.0 - h * h, 0.0))
            cands = [c for c in (-s, s) if c >= pc.q0 - 1e-9]
            if not cands:
                continue
            q = min(cands)
            x = add(pc.anchor, mul(pc.direction, q))
            return ClearancePoint(x, 1.0, pc.side0.point, pc.side1.point,
                                  ("vertex", pc.side0.vref), ("vertex", pc.side1.vref))
        loci0 = _offset_locus_of(pc.side0, tol)
        loci1 = _offset_locus_of(pc.side1, tol)
        found = []
        for l0 in loci0:
            for l1 in loci1:
                for x in geom.locus_intersections(l0, l1, tol):
                    got = _candidate_on_piece(pc, x, tol)
                    if got is not None:
                        found.append(got)
        if found:
            found.sort(key=lambda it: pc.progress(it[0]))
            return found[0][1]
    if xi.terminated:
        return None
    if xi.pieces and xi.pieces[-1].q1 is not None:
        raise NumericalFailure("bisector ended at a pole without unit clearance")
    return None


# -- ray intersection (case c) ------------------------------------------------


def _side_scalar(side):
    """(kind, data) scalar form: affine ('aff', origin, normal) or radical
    ('rad', center, e, g) meaning f(y) = e*|y-center| + g."""
    if _is_pin(side):
        return ("rad", side.point, 1.0, 0.0)
    g = side.geom_
    if g.kind == "seg":
        return ("aff", g.start, g.left_normal_at(0.0))
    if g.ccw:
        return ("rad", g.center, -1.0, g.radius)
    return ("rad", g.center, 1.0, -g.radius)


def _ray_equidistant_roots(side0, side1, b, nd):
    """Parameters r >= 0 along b + r*nd where the two side distances agree."""
    f0 = _side_scalar(side0)
    f1 = _side_scalar(side1)
    roots = []

    def quad(A, B, C):
        if abs(A) < 1e-14:
            if abs(B) < 1e-14:
                return []
            return [-C / B]
        disc = B * B - 4 * A * C
        if disc < 0:
            return []
        s = math.sqrt(disc)
        return [(-B - s) / (2 * A), (-B + s) / (2 * A)]

    if f0[0] == "aff" and f1[0] == "aff":
        _, o0, m0 = f0
        _, o1, m1 = f1
        A = dot(nd, m0) - dot(nd, m1)
        Bq = dot(sub(b, o0), m0) - dot(sub(b, o1), m1)
        if abs(A) > 1e-14:
            roots.append(-Bq / A)
    elif f0[0] == "aff" or f1[0] == "aff":
        aff = f0 if f0[0] == "aff" else f1
        rad = f1 if f0[0] == "aff" else f0
        _, o, m = aff
        _, cc, e, gg = rad
        # e*|y-cc| = (y-o).m - gg ; square both sides
        w = sub(b, cc)
        a2 = 1.0  # |nd| = 1
        b2 = 2.0 * dot(w, nd)
        c2 = dot(w, w)
        lin_b = dot(nd, m)
        lin_c = dot(sub(b, o), m) - gg
        A = a2 - lin_b * lin_b
        B = b2 - 2.0 * lin_b * lin_c
        C = c2 - lin_c * lin_c
        roots.extend(quad(A, B, C))
    else:
        _, c0, e0, g0 = f0
        _, c1, e1, g1 = f1
        w0 = sub(b, c0)
        w1 = sub(b, c1)
        k = g1 - g0
        # U^2 - V^2 is linear in r
        L1 = 2.0 * (dot(w0, nd) - dot(w1, nd))
        L0 = dot(w0, w0) - dot(w1, w1)
        if abs(k) < 1e-12:
            if abs(e0 - e1) < 1e-12 or abs(e0 + e1) < 1e-12:
                # |y-c0| = +-|y-c1|: perpendicular bisector line
                if abs(L1) > 1e-14:
                    roots.append(-L0 / L1)
            # opposite-sign zero-k case also reduces to U = V = 0: skip
        else:
            # e0*U - e1*V = k and (e0*U)^2 = U^2 etc.
            # e0*U + e1*V*e0^2... use U = e0*(k + L/k)/2 with L = L0 + L1*r
            # U^2 = quadratic in r; expand (k^2 + L)^2/(4k^2) = U^2
            # ((L + k^2)/(2k*e0))^2 = |w0 + r*nd|^2
            A = (L1 * L1) / (4.0 * k * k) - 1.0
            B = (2.0 * L1 * (L0 + k * k)) / (4.0 * k * k) - 2.0 * dot(w0, nd)
            C = ((L0 + k * k) ** 2) / (4.0 * k * k) - dot(w0, w0)
            roots.extend(quad(A, B, C))
    return roots


def ray_first_hit(xi: BisectorCurve, b: Point, nd: Point, tol: Tolerance = DEFAULT_TOL):
    """First intersection of the ray b + r*nd (r >= 0) with the curve.

    Returns (r, piece, x) or None.
    """
    best = None
    for pc in xi.pieces:
        cands = []
        if pc.axis in ("ray", "line"):
            d = cross(nd, pc.direction)
            w = sub(pc.anchor, b)
            if abs(d) > 1e-14:
                r = cross(w, pc.direction) / d
                cands.append(r)
            elif abs(cross(w, nd)) < tol.eps_coord * 8:
                cands.append(dot(w, nd))  # collinear: nearest anchor point
        else:
            cands = _ray_equidistant_roots(pc.side0, pc.side1, b, nd)
        for r in cands:
            if r < -tol.eps_coord * 8:
                continue
            x = add(b, mul(nd, r))
            q = pc.locate(x, tol)
            if q is None or not pc.in_window(q, _axis_window_slack(pc, tol)):
                continue
            got = pc.eval(q, tol)
            if got is None:
                continue
            # the hit must reproduce x, and its clearance must equal the ray
            # distance (then the clearance circle osculates the queried arc
            # exactly at the ray origin, which is what the march needs)
            if dist(got[0], x) > 1e-6 or abs(got[1] - r) > 1e-6 * max(1.0, r):
                continue
            ok = True
            for side in (pc.side0, pc.side1):
                if _is_pin(side):
                    continue
                ct = _contact(side, x, tol)
                if ct is None:
                    ok = False
                    break
                s = tol.eps_coord / max(side.geom_.length(), tol.eps_coord) * 64 + 1e-9
                if ct[1] < -s or ct[1] > 1.0 + s:
                    ok = False
                    break
            if not ok:
                continue
            r = max(r, 0.0)
            if best is None or r < best[0]:
                best = (r, pc, x)
    return best


def intersect_sub_bisectors(xi0: BisectorCurve, xi1: BisectorCurve, B: ArcGeom,
                            tol: Tolerance = DEFAULT_TOL):
    """Point with equal clearance to the neighbors on both sides of a cut arc.

    Marches the normal ray of B, bisecting the sign change of the two
    first-hit distances; a candidate is accepted when it is equidistant from
    all three sites (the degenerate tangential configurations put the true
    crossing exactly on an endpoint ray, where the marched distances jump).
    Returns (x, radius).
    """
    from . import geom as _g

    sites = []
    for side in (xi0.side0_start, B, xi1.side1_start):
        g = side if isinstance(side, ArcGeom) else (side.geom_ if not _is_pin(side) else None)
        sites.append(g)

    def resid(x):
        ds = []
        for g in sites:
            if g is None:
                continue
            _p, d, _t = _g.closest_point(g, x, tol)
            ds.append(d)
        return max(ds) - min(ds), sum(ds) / len(ds)

    def hits(s):
        b = B.point_at(s)
        nd = B.left_normal_at(s)
        return (b, nd, ray_first_hit(xi0, b, nd, tol), ray_first_hit(xi1, b, nd, tol))

    def f(s):
        _b, _nd, h0, h1 = hits(s)
        d0 = h0[0] if h0 else math.inf
        d1 = h1[0] if h1 else math.inf
        if math.isinf(d0) and math.isinf(d1):
            return None
        return d0 - d1

    lo, hi = 0.0, 1.0
    flo, fhi = f(lo), f(hi)
    if flo is None or fhi is None or flo > 0.0 or fhi < 0.0:
        prev_s, prev_f = lo, flo
        found = False
        for k in range(1, 65):
            s = k / 64.0
            fs = f(s)
            if fs is None:
                continue
            if prev_f is not None and prev_f <= 0.0 <= fs:
                lo, hi, flo, fhi = prev_s, s, prev_f, fs
                found = True
                break
            prev_s, prev_f = s, fs
        if not found:
            raise NumericalFailure("no bracket for sub-bisector intersection")
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm is None:
            break
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol.eps_param:
            break

    best = None
    for s in (0.5 * (lo + hi), lo, hi):
        b, nd, h0, h1 = hits(s)
        for h in (h0, h1):
            if h is None:
                continue
            x = h[2]
            err, d = resid(x)
            if best is None or err < best[0]:
                best = (err, x, d)
    if best is None or best[0] > 1e-5:
        raise NumericalFailure(
            f"sub-bisector intersection residual {None if best is None else best[0]}")
    return best[1], best[2]
