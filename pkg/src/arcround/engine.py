"""Main loop and boundary surgery.

The driver pops violating objects from a stack, builds a cut specification
for each, and applies it by walking only the boundary being removed.  The
walk consults two indexes: a uniform grid over the immutable input boundary
for circular ray shooting, and a dynamic set of theta points for detecting
crossings with existing cut arcs (rectangle emptiness queries).
"""
from __future__ import annotations

import bisect as _bisect
import math
import time
from dataclasses import dataclass, field

from . import cutgen, geom
from .boundary import CONVEX, Region
from .cutgen import CutSpec
from .errors import (InconsistentIndex, IterationBudgetExceeded, NoHit,
                     TopologyError)
from .geom import Circle, Point, Tolerance, dist, sub

SMALL_RADIUS_LIMIT = 1.0 - 1e-9


@dataclass
class RunStats:
    iterations: int = 0
    cuts_performed: int = 0
    cut_arcs_created: int = 0
    components_removed: int = 0
    wall_time: float = 0.0
    stale_pops: int = 0
    perfect_skips: int = 0
    graze_events: int = 0
    degenerate_removals: int = 0

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


class ThetaIndex:
    """Dynamic 2D point set over (u, v) = theta values, keyed on u.

    Ordered list with bisection; reports are filtered on v.  Expected report
    size is 0 or 1, so no secondary structure is needed at these sizes.
    """

    def __init__(self):
        self._keys = []     # (u, v, arc_id) sorted
        self._by_arc = {}

    def __len__(self):
        return len(self._keys)

    def insert(self, arc_id, u, v):
        key = (u, v, arc_id)
        self._by_arc[arc_id] = key
        _bisect.insort(self._keys, key)

    def delete(self, arc_id):
        key = self._by_arc.pop(arc_id, None)
        if key is None:
            return False
        i = _bisect.bisect_left(self._keys, key)
        if i < len(self._keys) and self._keys[i] == key:
            del self._keys[i]
            return True
        raise InconsistentIndex("theta entry missing from ordered list")

    def contains(self, arc_id):
        return arc_id in self._by_arc

    def query(self, rects):
        """Arc ids whose theta point lies in any rectangle.

        A rectangle is (ulo, uhi, u_lo_closed, u_hi_closed, vlo, vhi); v
        bounds are always open, matching the index conventions.
        """
        out = []
        for (ulo, uhi, lo_closed, hi_closed, vlo, vhi) in rects:
            i = _bisect.bisect_left(self._keys, (ulo, -math.inf, -1))
            while i < len(self._keys):
                u, v, aid = self._keys[i]
                if u > uhi or (u == uhi and not hi_closed):
                    break
                if (u > ulo or (u == ulo and lo_closed)) and vlo < v < vhi:
                    out.append(aid)
                i += 1
        return out

    def snapshot(self):
        return sorted(self._by_arc.items())


def theta_rects_backward(x, y, n):
    """Rectangles containing theta(A) iff A crosses the side of the query arc
    behind the entry point (toward its start)."""
    if y < n:
        return [(0.0, x, True, False, x, y), (y, n, False, False, x + n, y + n)]
    return [(y - n, x, False, False, x, y)]


def theta_rects_forward(x, y, n):
    if y < n:
        return [(x, y, False, False, y, x + n)]
    return [(0.0, y - n, True, False, y - n, x), (x, n, False, False, y, x + n)]


class RayShooter:
    """Uniform grid over the input arcs answering first-hit queries along a
    unit circle.  A query circle covers a bounded cell patch, so candidate
    gathering is O(local arc density)."""

    def __init__(self, input_arcs, cell=0.75):
        self.arcs = input_arcs
        self.cell = cell
        self.grid = {}
        for j, a in enumerate(input_arcs):
            x0, y0, x1, y1 = a.bbox()
            for ix in range(int(math.floor(x0 / cell)), int(math.floor(x1 / cell)) + 1):
                for iy in range(int(math.floor(y0 / cell)), int(math.floor(y1 / cell)) + 1):
                    self.grid.setdefault((ix, iy), []).append(j)

    def _candidates(self, circle):
        cell = self.cell
        cx, cy, r = circle.center.x, circle.center.y, circle.radius
        seen = set()
        for ix in range(int(math.floor((cx - r) / cell)), int(math.floor((cx + r) / cell)) + 1):
            for iy in range(int(math.floor((cy - r) / cell)), int(math.floor((cy + r) / cell)) + 1):
                for j in self.grid.get((ix, iy), ()):
                    seen.add(j)
        return seen

    def circle_hits(self, circle, tol):
        """All (j, t_on_arc, point, tangential) intersections with input arcs."""
        out = []
        for j in self._candidates(circle):
            for p, t, tang in geom.circle_arc_intersections(circle, self.arcs[j], tol):
                out.append((j, t, p, tang))
        return out

    def first_hit(self, start, circle, ccw_dir, tol, min_delta=1e-9):
        """First transversal intersection with the input boundary when moving
        from `start` along the circle in the given direction.

        Returns (delta_angle, point, j, t) or None when the circle closes on
        itself without a transversal hit.
        """
        a_from = geom.angle_of(sub(start, circle.center))
        best = None
        grazes = 0
        for j, t, p, tang in self.circle_hits(circle, tol):
            if tang or not _transversal(circle, self.arcs[j], t, tol):
                grazes += 1
                continue
            a_hit = geom.angle_of(sub(p, circle.center))
            delta = geom.norm_angle(a_hit - a_from) if ccw_dir else geom.norm_angle(a_from - a_hit)
            if delta < min_delta or delta > geom.TWO_PI - min_delta:
                continue
            if best is None or delta < best[0]:
                best = (delta, p, j, t)
        return best


def _transversal(circle, arc_geom, t, tol):
    """True when the arc genuinely crosses the circle at parameter t."""
    h = max(tol.eps_coord * 1e3 / max(arc_geom.length(), tol.eps_coord), 1e-7)
    lo = arc_geom.point_at(max(t - h, 0.0) if t - h > 0 else t - h)
    hi = arc_geom.point_at(t + h)
    s_lo = dist(lo, circle.center) - circle.radius
    s_hi = dist(hi, circle.center) - circle.radius
    return s_lo * s_hi < 0.0


def ray_shoot(shooter: RayShooter, start: Point, circle: Circle, ccw_dir: bool,
              tol: Tolerance = geom.DEFAULT_TOL):
    """First intersection of the directed unit arc with the input boundary.

    Returns (point, input_arc_id, t, delta_angle); None is the full-circle
    marker (only possible when the circle lies strictly inside the region).
    """
    hit = shooter.first_hit(start, circle, ccw_dir, tol)
    if hit is None:
        return None
    delta, p, j, t = hit
    return (p, j, t, delta)


# -- surgery -------------------------------------------------------------------


def _split(region, theta_idx, arc, t, pos=None):
    had_theta = arc.in_theta
    if had_theta:
        theta_idx.delete(arc.id)
        arc.in_theta = False
    v, sib = region.split_arc(arc, t, pos)
    sib.span_tag = arc.span_tag
    return v, sib


def _kill_arc(region, theta_idx, arc):
    if arc.in_theta:
        theta_idx.delete(arc.id)
        arc.in_theta = False
    region.kill_arc(arc)


def _snap_param(arc, t, tol):
    s = tol.eps_coord / max(arc.geom.length(), tol.eps_coord) * 8 + 1e-12
    if t <= s:
        return 0.0
    if t >= 1.0 - s:
        return 1.0
    return t


def _ensure_vertex(region, theta_idx, loc, pt, cutid):
    """Vertex at a cut-endpoint location, splitting its host arc if interior."""
    if loc[0] == "vertex":
        v = region.vertices[loc[1]]
        if not v.alive:
            raise TopologyError("cut endpoint at a dead vertex")
        v.cut_tag = cutid
        return v, []
    aid, t = loc[1], loc[2]
    a = region.arcs[aid]
    if not a.alive:
        raise TopologyError("cut endpoint on a dead arc")
    t = a.geom.param_of(pt) if pt is not None else t
    ts = _snap_param(a, t, region.tol)
    if ts == 0.0:
        a.src.cut_tag = cutid
        return a.src, []
    if ts == 1.0:
        a.dst.cut_tag = cutid
        return a.dst, []
    v, sib = _split(region, theta_idx, a, t, pt)
    v.cut_tag = cutid
    return v, [sib]


def _locate_for_second(region, loc, pt):
    """Re-locate an arc-interior location after the first endpoint's split."""
    if loc[0] == "vertex":
        return loc
    a = region.arcs[loc[1]]
    cands = [a]
    if a.dst.out_arc is not None and a.dst.out_arc.alive:
        cands.append(a.dst.out_arc)
    best = None
    for c in cands:
        t = c.geom.param_of(pt)
        if -1e-7 <= t <= 1.0 + 1e-7 and dist(c.geom.point_at(min(max(t, 0.0), 1.0)), pt) < 1e-6:
            d = abs(min(max(t, 0.0), 1.0) - t)
            if best is None or d < best[0]:
                best = (d, ("arc", c.id, min(max(t, 0.0), 1.0)))
    if best is None:
        raise TopologyError("could not relocate second cut endpoint")
    return best[1]


def _flag_span(region, vs, vt, cutid):
    arcs = []
    cur = vs.out_arc
    for _ in range(8):
        arcs.append(cur)
        cur.span_tag = cutid
        if cur.dst is vt:
            return arcs
        cur = cur.dst.out_arc
    raise TopologyError("removal span longer than the structural bound")


def _arc_crossings(C, barc, tol):
    """Genuine transversal crossings of the cut arc C with a boundary arc.

    Returns [(t_on_barc, point, t_on_C)], sorted along the boundary arc;
    hits at the boundary arc's own endpoints are excluded (vertex logic owns
    those), as are hits off C's angular span.
    """
    g = barc.geom
    circle = Circle(C.center, C.radius)
    out = []
    for p, t, tang in geom.circle_arc_intersections(circle, g, tol):
        if tang:
            continue
        if dist(p, g.start) <= tol.eps_coord * 1e3 or dist(p, g.end) <= tol.eps_coord * 1e3:
            continue
        tc = C.param_of(p)
        if tc < 1e-9 or tc > 1.0 - 1e-9:
            continue
        if not _transversal(circle, g, t, tol):
            continue
        out.append((t, p, tc))
    return out


def _vertex_on_cut(region, v, C, tol):
    """Vertex-coincident crossing test: on the cut circle, inside its span,
    with the incident arcs on opposite sides."""
    if abs(dist(v.pos, C.center) - C.radius) > tol.eps_coord * 1e3:
        return False
    tc = C.param_of(v.pos)
    if tc < 1e-9 or tc > 1.0 - 1e-9:
        return False
    ga, gb = v.in_arc.geom, v.out_arc.geom
    ha = max(1e-7, tol.eps_coord * 1e3 / max(ga.length(), tol.eps_coord))
    hb = max(1e-7, tol.eps_coord * 1e3 / max(gb.length(), tol.eps_coord))
    s_in = dist(ga.point_at(1.0 - ha), C.center) - C.radius
    s_out = dist(gb.point_at(hb), C.center) - C.radius
    return s_in * s_out < 0.0


def _traverse_p(region, C, a, a_out, e, vs, vt, cutid, theta_idx):
    """Walk the old chain forward from `a` to the next stop.

    Returns (b, reason, walked_arcs) where reason is 'closed' (met e) or
    'on_c' (a point where the cut arc meets the boundary).
    """
    tol = region.tol
    walked = []
    arc = a_out
    guard = region.alive_arc_count + 8
    while True:
        guard -= 1
        if guard < 0:
            raise TopologyError("removal walk did not terminate")
        hits = _arc_crossings(C, arc, tol)
        if hits:
            t, p, _tc = hits[0]
            v, _sib = _split(region, theta_idx, arc, t, p)
            v.cut_tag = cutid
            walked.append(arc)
            return v, "on_c", walked
        walked.append(arc)
        v = arc.dst
        if v is e:
            return v, "closed", walked
        if v is vs or v is vt or v.cut_tag == cutid:
            return v, "on_c", walked
        if _vertex_on_cut(region, v, C, tol):
            v.cut_tag = cutid
            return v, "on_c", walked
        arc = v.out_arc


def _into_p_direction(region, C, b, vs, vt):
    """True to follow C forward (increasing param) into the region from b."""
    if b is vs:
        return True
    if b is vt:
        return False
    tb = C.param_of(b.pos)
    d = C.tangent_at(tb)
    t_in = b.in_arc.geom.tangent_at(1.0)
    t_out = b.out_arc.geom.tangent_at(0.0)
    a_out = geom.angle_of(t_out)
    wedge = geom.norm_angle(geom.angle_of(Point(-t_in.x, -t_in.y)) - a_out)
    fw = geom.norm_angle(geom.angle_of(d) - a_out)
    bw = geom.norm_angle(geom.angle_of(Point(-d.x, -d.y)) - a_out)
    fwd_in = fw < wedge
    bwd_in = bw < wedge
    if fwd_in == bwd_in:
        raise TopologyError("ambiguous cut direction at a crossing vertex")
    return fwd_in


def _shoot_clip(region, shooter, C, b, fwd):
    """First input-boundary crossing along C from b, clipped to C's span.

    Returns ('endpoint', vertex) or ('hit', point, j, t_on_j)."""
    tol = region.tol
    circle = Circle(C.center, C.radius)
    tb = C.param_of(b.pos)
    span = C.span_angle()
    hit = shooter.first_hit(b.pos, circle, fwd, tol)
    if fwd:
        room = (1.0 - tb) * span
    else:
        room = tb * span
    if hit is not None and hit[0] < room - tol.eps_coord * 1e3:
        _, p, j, t = hit
        return ("hit", p, j, t)
    return ("endpoint", None)


def _phi_of_clip(region, clip, endpoint_vertex):
    if clip[0] == "endpoint":
        v = endpoint_vertex
        if v.input_phi is None:
            raise TopologyError("cut endpoint off the input boundary")
        return v.input_phi
    _, p, j, t = clip
    return region.phi_of_input(j, min(max(t, 0.0), 1.0))


def _crossings_in_window(C, g, tb, tz, tol):
    """Crossings of C's circle with geometry g inside C-param window (tb, tz]."""
    circle = Circle(C.center, C.radius)
    lo, hi = (tb, tz) if tb <= tz else (tz, tb)
    out = []
    for p, t, tang in geom.circle_arc_intersections(circle, g, tol):
        if tang or not _transversal(circle, g, t, tol):
            continue
        tc = C.param_of(p)
        if lo + 1e-9 < tc < hi - 1e-9:
            out.append((abs(tc - tb), t, p, tc))
    out.sort()
    return out


def _traverse_c(region, C, b, theta_idx, shooter, cutid, stats):
    """Follow the cut arc from b through the region to its first exit.

    Returns (a_vertex, a_old_out_arc)."""
    tol = region.tol
    vs_vt = getattr(region, "_cur_endpoints")
    vs, vt = vs_vt
    fwd = _into_p_direction(region, C, b, vs, vt)
    clip_ahead = _shoot_clip(region, shooter, C, b, fwd)
    clip_back = _shoot_clip(region, shooter, C, b, not fwd)
    tb = C.param_of(b.pos)
    if clip_ahead[0] == "endpoint":
        tz = 1.0 if fwd else 0.0
    else:
        tz = C.param_of(clip_ahead[1])

    # (2) re-crossing of the arc b itself lies on
    host_candidates = []
    for cand in (b.host_arc, b.in_arc, b.out_arc):
        if cand is not None and cand.is_cut() and cand not in host_candidates:
            host_candidates.append(cand)
    for cand in host_candidates:
        wins = _crossings_in_window(C, cand.geom, tb, tz, tol)
        wins = [w for w in wins if dist(w[2], b.pos) > tol.eps_coord * 1e3]
        if wins:
            _, t, p, _tc = wins[0]
            v, sib = _split(region, theta_idx, cand, t, p)
            v.cut_tag = cutid
            return v, v.out_arc

    # (3) theta rectangle query for a crossing cut arc
    phi_fwd = _phi_of_clip(region, clip_ahead, vt if fwd else vs)
    phi_bwd = _phi_of_clip(region, clip_back, vs if fwd else vt)
    phi_s, phi_t = (phi_bwd, phi_fwd) if fwd else (phi_fwd, phi_bwd)
    n = float(region.n)
    x = phi_s
    y = phi_t if phi_s < phi_t else phi_t + n
    rects = theta_rects_forward(x, y, n) if fwd else theta_rects_backward(x, y, n)
    cands = theta_idx.query(rects)
    cands = [aid for aid in cands if region.arcs[aid].alive]
    if len(cands) > 1:
        raise InconsistentIndex(f"theta query reported {len(cands)} arcs")
    if cands:
        arc = region.arcs[cands[0]]
        wins = _crossings_in_window(C, arc.geom, tb, tz, tol)
        if wins:
            _, t, p, _tc = wins[0]
            v, sib = _split(region, theta_idx, arc, t, p)
            v.cut_tag = cutid
            return v, v.out_arc
        stats.graze_events += 1  # index said cross, geometry says graze

    # (4) exit through the input boundary at z
    if clip_ahead[0] == "endpoint":
        v = vt if fwd else vs
        return v, v.out_arc
    _, p, j, t = clip_ahead
    pieces = region.pieces_by_input.get(j, {})
    best = None
    for aid, (t0, t1) in pieces.items():
        if t0 - 1e-9 <= t <= t1 + 1e-9:
            local = (t - t0) / (t1 - t0)
            d = 0.0 if 0.0 <= local <= 1.0 else min(abs(local), abs(local - 1.0))
            if best is None or d < best[0]:
                best = (d, aid, local)
    if best is None:
        raise InconsistentIndex("exit point lies on a removed piece of the input boundary")
    _, aid, local = best
    arc = region.arcs[aid]
    ls = _snap_param(arc, local, tol)
    if ls == 0.0:
        v = arc.src
    elif ls == 1.0:
        v = arc.dst
    else:
        v, _sib = _split(region, theta_idx, arc, local, p)
    v.cut_tag = cutid
    return v, v.out_arc


def _patch(region, theta_idx, C, a_v, b_v, cutid, created):
    """Insert the kept-side cut arc between two stop vertices."""
    ta = C.param_of(a_v.pos)
    tb = C.param_of(b_v.pos)
    if ta >= tb - 1e-12:
        raise TopologyError("cut patch endpoints out of order along the arc")
    g = C.subarc(ta, tb, a_v.pos, b_v.pos)
    arc = region.new_arc(g, a_v, b_v, ("cut", cutid))
    a_v.out_arc = arc
    b_v.in_arc = arc
    created.append(arc)
    if a_v.input_phi is not None and b_v.input_phi is not None:
        u, v = region.theta(arc)
        theta_idx.insert(arc.id, u, v)
        arc.in_theta = True
    return arc


def perform_cut(region: Region, spec: CutSpec, theta_idx: ThetaIndex,
                shooter: RayShooter, stats: RunStats):
    """Apply a cut specification; returns (new_cut_arcs, sibling_pieces)."""
    if spec.is_remove:
        anchor = spec.remove_anchor
        loop = region.loop_of(anchor)
        for a in loop:
            _kill_arc(region, theta_idx, a)
            region.kill_vertex(a.src)
        stats.components_removed += 1
        return [], []

    C = geom.ArcGeom("arc", spec.s_pt, spec.t_pt, spec.circle.center,
                     spec.circle.radius, True)
    if C.span_angle() > math.pi + 1e-6:
        raise TopologyError(f"cut arc span {C.span_angle()} exceeds pi")
    cutid = region.next_cut_serial()
    siblings = []
    vs, svs = _ensure_vertex(region, theta_idx, spec.s_loc, spec.s_pt, cutid)
    t_loc = _locate_for_second(region, spec.t_loc, spec.t_pt)
    vt, svt = _ensure_vertex(region, theta_idx, t_loc, spec.t_pt, cutid)
    siblings.extend(svs)
    siblings.extend(svt)
    if vs is vt:
        raise TopologyError("cut endpoints coincide")
    region._cur_endpoints = (vs, vt)
    _flag_span(region, vs, vt, cutid)

    created = []
    worklist = [(vs, vs.out_arc)]
    dead_arcs = []
    while worklist:
        e, e_out = worklist.pop()
        if not e_out.alive:
            continue  # region already consumed via another entry
        a, a_out = e, e_out
        repeat_guard = region.alive_arc_count + 8
        while True:
            repeat_guard -= 1
            if repeat_guard < 0:
                raise TopologyError("cut repeat loop did not terminate")
            b, reason, walked = _traverse_p(region, C, a, a_out, e, vs, vt, cutid, theta_idx)
            for w in walked:
                dead_arcs.append(w)
            if reason == "closed":
                break
            if b is not vs and b is not vt and \
                    (b.in_arc.span_tag == cutid or b.out_arc.span_tag == cutid or
                     (b.host_arc is not None and b.host_arc.span_tag == cutid)):
                worklist.append((b, b.out_arc))
            a2, a2_out = _traverse_c(region, C, b, theta_idx, shooter, cutid, stats)
            _patch(region, theta_idx, C, a2, b, cutid, created)
            if a2 is e:
                break
            a, a_out = a2, a2_out

    for w in dead_arcs:
        _kill_arc(region, theta_idx, w)
    killed = {w.id for w in dead_arcs}
    for w in dead_arcs:
        for v in (w.src, w.dst):
            if v is vs or v is vt:
                continue
            vin, vout = v.in_arc, v.out_arc
            if (vin is None or vin.id in killed or not vin.alive) and \
                    (vout is None or vout.id in killed or not vout.alive):
                region.kill_vertex(v)
    stats.cut_arcs_created += len(created)
    return created, [s for s in siblings if s.alive]


# -- driver --------------------------------------------------------------------


def _push_initial(region, sigma):
    loops = region.loops()
    for loop in loops:
        for a in loop:
            if a.geom.is_convex() and a.geom.radius < SMALL_RADIUS_LIMIT:
                sigma.append(("small", a.id))
    for loop in loops:
        for a in loop:
            if region.classify_vertex(a.src) == CONVEX:
                sigma.append(("vertex", a.src.id))


def _is_perfect(region, arc):
    return region.classify_vertex(arc.src) != CONVEX and \
        region.classify_vertex(arc.dst) != CONVEX


def run(region: Region, budget: int = 50, on_cut=None, debug_checks=False):
    """Carve the region down to its maximum bounded-convex-curvature subset.

    Returns RunStats; the region is mutated in place.
    """
    t0 = time.perf_counter()
    stats = RunStats()
    shooter = RayShooter(region.input_arcs)
    theta_idx = ThetaIndex()
    sigma = []
    _push_initial(region, sigma)
    limit = max(budget * max(region.n, 1), 64)

    while sigma:
        stats.iterations += 1
        if stats.iterations > limit:
            raise IterationBudgetExceeded(
                f"{stats.iterations} iterations on n={region.n}",
                dump=_dump_state(region, sigma))
        kind, oid = sigma.pop()
        if kind == "small":
            obj = region.arcs[oid]
            if not obj.alive:
                stats.stale_pops += 1
                continue
            spec = cutgen.cut_for_small_convex_arc(region, obj)
        elif kind == "vertex":
            v = region.vertices[oid]
            if not v.alive or region.classify_vertex(v) != CONVEX:
                stats.stale_pops += 1
                continue
            spec = cutgen.cut_for_convex_vertex(region, v)
        else:
            arc = region.arcs[oid]
            if not arc.alive:
                stats.stale_pops += 1
                continue
            if _is_perfect(region, arc):
                stats.perfect_skips += 1
                continue
            spec = cutgen.cut_for_cut_arc(region, arc)

        new_arcs, siblings = perform_cut(region, spec, theta_idx, shooter, stats)
        stats.cuts_performed += 1
        for s in siblings:
            if not s.alive:
                continue
            if s.is_cut():
                sigma.append(("cut", s.id))
            elif s.geom.is_convex() and s.geom.radius < SMALL_RADIUS_LIMIT:
                sigma.append(("small", s.id))
        for a in new_arcs:
            sigma.append(("cut", a.id))
        if debug_checks:
            region.check_loops()
            _check_theta(region, theta_idx)
        if on_cut is not None:
            on_cut(stats.iterations, region, spec)

    stats.wall_time = time.perf_counter() - t0
    return stats


def _check_theta(region, theta_idx):
    expect = {}
    for loop in region.loops():
        for a in loop:
            if a.is_cut() and a.src.input_phi is not None and a.dst.input_phi is not None:
                expect[a.id] = region.theta(a)
    got = {aid: (key[0], key[1]) for aid, key in theta_idx._by_arc.items()}
    if set(expect) != set(got):
        raise InconsistentIndex(f"theta index mismatch: {set(expect) ^ set(got)}")


def _dump_state(region, sigma):
    return {
        "n": region.n,
        "alive_arcs": region.alive_arc_count,
        "sigma_depth": len(sigma),
    }
