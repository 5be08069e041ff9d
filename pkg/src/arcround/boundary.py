"""The evolving region: loops of vertices and arcs with provenance and the
input-boundary parameterization used by the range index.

A Region is a set of circular doubly-linked loops alternating vertex and arc.
Arcs carry provenance back to the immutable post-split input boundary, which
is what phi/theta are defined over.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from . import geom
from .geom import ArcGeom, Point, Tolerance, DEFAULT_TOL
from .errors import (DegenerateElement, EndpointNotOnInput, NonFinite,
                     NotClosed, PointNotOnCarrier, SelfIntersecting, TopologyError)

CONVEX = "convex"
CONCAVE = "concave"
TANGENTIAL = "tangential"


class Vertex:
    __slots__ = ("id", "pos", "in_arc", "out_arc", "alive", "on_input",
                 "input_phi", "cut_tag", "host_arc")

    def __init__(self, vid, pos, on_input=False, input_phi=None):
        self.id = vid
        self.pos = pos
        self.in_arc = None
        self.out_arc = None
        self.alive = True
        self.on_input = on_input
        self.input_phi = input_phi
        self.cut_tag = 0       # serial of the cut whose circle this vertex lies on
        self.host_arc = None   # arc the vertex was created on (crossing context)

    def __repr__(self):
        return f"V{self.id}({self.pos.x:.4g},{self.pos.y:.4g})"


class BArc:
    __slots__ = ("id", "geom", "src", "dst", "alive", "prov", "in_theta", "span_tag")

    def __init__(self, aid, g, src, dst, prov):
        self.id = aid
        self.geom = g
        self.src = src
        self.dst = dst
        self.alive = True
        self.prov = prov        # ('input', j, t0, t1) or ('cut', generation)
        self.in_theta = False
        self.span_tag = 0       # serial of the cut whose removal span this arc is on

    def is_cut(self):
        return self.prov[0] == "cut"

    def is_input(self):
        return self.prov[0] == "input"

    def __repr__(self):
        return f"A{self.id}[{self.prov[0]}]"


@dataclass
class Region:
    """Disjoint simple loops bounding the open set being carved down."""

    tol: Tolerance = DEFAULT_TOL
    scale: float = 1.0                      # input normalization factor (tool radius)
    n: int = 0                              # input vertex count after splitting
    input_arcs: list = field(default_factory=list)   # immutable ArcGeom snapshot
    vertices: dict = field(default_factory=dict)
    arcs: dict = field(default_factory=dict)
    _next_vid: int = 0
    _next_aid: int = 0
    _next_cut: int = 0
    alive_arc_count: int = 0
    # alive ('input', j) pieces: j -> {arc_id: (t0, t1)}
    pieces_by_input: dict = field(default_factory=dict)

    # -- construction -------------------------------------------------------

    def new_vertex(self, pos, on_input=False, input_phi=None):
        v = Vertex(self._next_vid, pos, on_input, input_phi)
        self._next_vid += 1
        self.vertices[v.id] = v
        return v

    def new_arc(self, g, src, dst, prov):
        a = BArc(self._next_aid, g, src, dst, prov)
        self._next_aid += 1
        self.arcs[a.id] = a
        self.alive_arc_count += 1
        if prov[0] == "input":
            self.pieces_by_input.setdefault(prov[1], {})[a.id] = (prov[2], prov[3])
        return a

    def next_cut_serial(self):
        self._next_cut += 1
        return self._next_cut

    def link(self, v, a_out):
        v.out_arc = a_out
        a_out.src = v

    # -- mutation -----------------------------------------------------------

    def kill_arc(self, a):
        if a.alive:
            a.alive = False
            self.alive_arc_count -= 1
            if a.is_input():
                d = self.pieces_by_input.get(a.prov[1])
                if d is not None:
                    d.pop(a.id, None)

    def kill_vertex(self, v):
        v.alive = False

    def split_arc(self, a, t, pos=None):
        """Split a at parameter t; a shrinks in place to the first piece.

        Returns (new_vertex, sibling_arc) where sibling covers (t, 1].
        """
        if not a.alive:
            raise TopologyError("split of dead arc")
        pos = a.geom.point_at(t) if pos is None else pos
        g1, g2 = a.geom.split_at(t, pos)
        if a.is_input():
            _, j, t0, t1 = a.prov
            tm = t0 + t * (t1 - t0)
            v = self.new_vertex(pos, on_input=True, input_phi=self.phi_of_input(j, tm))
            prov1 = ("input", j, t0, tm)
            prov2 = ("input", j, tm, t1)
            self.pieces_by_input[j][a.id] = (t0, tm)
        else:
            v = self.new_vertex(pos, on_input=False)
            prov1 = a.prov
            prov2 = a.prov
        old_dst = a.dst
        a.geom = g1
        a.prov = prov1
        sib = self.new_arc(g2, v, old_dst, prov2)
        a.dst = v
        v.in_arc = a
        v.out_arc = sib
        old_dst.in_arc = sib
        v.host_arc = a
        return v, sib

    # -- queries ------------------------------------------------------------

    def loops(self):
        """List of loops, each a list of alive arcs in boundary order."""
        seen = set()
        out = []
        for a in self.arcs.values():
            if not a.alive or a.id in seen:
                continue
            loop = []
            cur = a
            guard = 0
            while True:
                loop.append(cur)
                seen.add(cur.id)
                cur = cur.dst.out_arc
                guard += 1
                if cur is None or not cur.alive:
                    raise TopologyError("broken loop linkage")
                if cur is a:
                    break
                if guard > self.alive_arc_count + 1:
                    raise TopologyError("loop walk did not close")
            out.append(loop)
        return out

    def loop_of(self, anchor):
        """Arcs of the loop containing a vertex or arc."""
        a = anchor if isinstance(anchor, BArc) else anchor.out_arc
        loop = [a]
        cur = a.dst.out_arc
        guard = 0
        while cur is not a:
            loop.append(cur)
            cur = cur.dst.out_arc
            guard += 1
            if guard > self.alive_arc_count + 1:
                raise TopologyError("loop walk did not close")
        return loop

    def classify_vertex(self, v):
        """Tangential / convex / concave from incident tangents."""
        ta = v.in_arc.geom.tangent_at(1.0)
        tb = v.out_arc.geom.tangent_at(0.0)
        c = geom.cross(ta, tb)
        d = geom.dot(ta, tb)
        ang = math.atan2(c, d)
        if abs(ang) <= self.tol.eps_angle:
            return TANGENTIAL
        return CONVEX if ang > 0.0 else CONCAVE

    def phi_of_input(self, j, t):
        """phi for the point at parameter t of input arc j."""
        n = self.n
        val = j + t
        if val >= n:
            val -= n
        return val

    def phi(self, p: Point, carrier: int) -> float:
        """phi of a point on input arc `carrier` (arc-length interpolation)."""
        A = self.input_arcs[carrier]
        t = A.param_of(p)
        slack = self.tol.eps_coord / max(A.length(), self.tol.eps_coord) * 16 + 1e-12
        if t < -slack or t > 1.0 + slack:
            raise PointNotOnCarrier(f"param {t} outside arc {carrier}")
        if geom.dist(A.point_at(min(max(t, 0.0), 1.0)), p) > 1e-6:
            raise PointNotOnCarrier("point is off the carrier arc")
        return self.phi_of_input(carrier, min(max(t, 0.0), 1.0))

    def theta(self, a: BArc):
        """theta for a cut arc with both endpoints on the input boundary."""
        if a.src.input_phi is None or a.dst.input_phi is None:
            raise EndpointNotOnInput(f"arc {a.id} endpoint off the input boundary")
        ps, pt = a.src.input_phi, a.dst.input_phi
        if ps < pt:
            return (ps, pt)
        return (ps, pt + self.n)

    # -- global checks (used by tests and debug mode) ------------------------

    def check_loops(self):
        """Walk every loop: closure, endpoint coincidence, turning = +2pi."""
        for loop in self.loops():
            turn = 0.0
            for a in loop:
                nxt = a.dst.out_arc
                if geom.dist(a.geom.end, a.dst.pos) > 1e-6 or geom.dist(a.geom.start, a.src.pos) > 1e-6:
                    raise TopologyError("arc endpoints drifted from vertices")
                if a.geom.kind == "arc":
                    turn += a.geom._sweep
                ta = a.geom.tangent_at(1.0)
                tb = nxt.geom.tangent_at(0.0)
                turn += math.atan2(geom.cross(ta, tb), geom.dot(ta, tb))
            if abs(turn - 2.0 * math.pi) > 1e-6:
                raise TopologyError(f"loop turning {turn} != 2pi")

    def signed_area(self):
        total = 0.0
        for loop in self.loops():
            total += _loop_area(loop)
        return total

    def improper_vertices(self):
        out = []
        for loop in self.loops():
            for a in loop:
                v = a.src
                if self.classify_vertex(v) == CONVEX and v.input_phi is None:
                    out.append(v)
        return out


def _loop_area(loop):
    s = 0.0
    for a in loop:
        g = a.geom
        s += geom.cross(g.start, g.end)
        if g.kind == "arc":
            th = g.span_angle()
            seg = 0.5 * g.radius * g.radius * (th - math.sin(th))
            s += 2.0 * seg if g.ccw else -2.0 * seg
    return 0.5 * s


def element_area(elements):
    """Signed area of a raw element chain (list of parsed elements)."""
    s = 0.0
    for e in elements:
        s += geom.cross(e[1], e[2])
        if e[0] == "arc":
            _, p0, p1, c, ccw = e
            r = geom.dist(p0, c)
            a0 = geom.angle_of(geom.sub(p0, c))
            a1 = geom.angle_of(geom.sub(p1, c))
            th = geom.norm_angle(a1 - a0) if ccw else geom.norm_angle(a0 - a1)
            if th == 0.0 and geom.dist(p0, p1) <= 1e-12:
                th = geom.TWO_PI
            seg = 0.5 * r * r * (th - math.sin(th))
            s += 2.0 * seg if ccw else -2.0 * seg
    return 0.5 * s


def _reverse_elements(elements):
    out = []
    for e in reversed(elements):
        if e[0] == "seg":
            out.append(("seg", e[2], e[1]))
        else:
            _, p0, p1, c, ccw = e
            out.append(("arc", p1, p0, c, not ccw))
    return out


def _split_element(e, pieces):
    """Split one raw element into `pieces` equal sub-elements."""
    if e[0] == "seg":
        _, p0, p1 = e
        pts = [geom.lerp(p0, p1, k / pieces) for k in range(pieces + 1)]
        return [("seg", pts[k], pts[k + 1]) for k in range(pieces)]
    _, p0, p1, c, ccw = e
    r = geom.dist(p0, c)
    a0 = geom.angle_of(geom.sub(p0, c))
    a1 = geom.angle_of(geom.sub(p1, c))
    th = geom.norm_angle(a1 - a0) if ccw else geom.norm_angle(a0 - a1)
    if th <= 1e-12:
        th = geom.TWO_PI
    out = []
    prev = p0
    for k in range(1, pieces + 1):
        ang = a0 + (th * k / pieces if ccw else -th * k / pieces)
        nxt = p1 if k == pieces else Point(c.x + r * math.cos(ang), c.y + r * math.sin(ang))
        out.append(("arc", prev, nxt, c, ccw))
        prev = nxt
    return out


def _element_geom(e):
    if e[0] == "seg":
        return ArcGeom("seg", e[1], e[2])
    _, p0, p1, c, ccw = e
    return ArcGeom("arc", p0, p1, c, geom.dist(p0, c), ccw)


def _pair_intersections(g1, g2, tol):
    """All intersection points between two elements (carrier-window filtered)."""
    pts = []
    if g1.kind == "seg" and g2.kind == "seg":
        d1 = geom.sub(g1.end, g1.start)
        d2 = geom.sub(g2.end, g2.start)
        den = geom.cross(d1, d2)
        w = geom.sub(g2.start, g1.start)
        if abs(den) < 1e-14:
            # parallel: overlap check via projection distance
            if abs(geom.cross(d1, w)) / geom.norm(d1) < tol.eps_coord:
                for q, other in ((g2.start, g1), (g2.end, g1), (g1.start, g2), (g1.end, g2)):
                    t = other.param_of(q)
                    if -1e-12 < t < 1.0 + 1e-12:
                        pts.append(q)
            return pts
        s = geom.cross(w, d2) / den
        u = geom.cross(w, d1) / den
        if -1e-12 <= s <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
            pts.append(geom.add(g1.start, geom.mul(d1, s)))
        return pts
    if g1.kind == "seg":
        g1, g2 = g2, g1
    C = Circle_of(g1)
    for p, t, _tang in geom.circle_arc_intersections(C, g2, tol):
        if -1e-9 <= g1.param_of(p) <= 1.0 + 1e-9 and abs(geom.dist(p, g1.center) - g1.radius) < 1e-7:
            pts.append(p)
    return pts


def Circle_of(g):
    return geom.Circle(g.center, g.radius)


def load_and_validate(elements, tool_radius, tol: Tolerance = DEFAULT_TOL):
    """Build a normalized Region from a raw closed element chain.

    Scales by 1/tool_radius, fixes orientation to CCW, splits arcs so each
    spans at most pi (full circles into three pieces), and verifies the chain
    is a simple curvilinear polygon.
    """
    if tool_radius <= 0 or not math.isfinite(tool_radius):
        raise NonFinite("tool radius must be positive and finite")
    if not elements:
        raise DegenerateElement("empty boundary")

    s = 1.0 / tool_radius

    def sp(p):
        return Point(p[0] * s, p[1] * s)

    scaled = []
    for e in elements:
        if e[0] == "seg":
            scaled.append(("seg", sp(e[1]), sp(e[2])))
        else:
            scaled.append(("arc", sp(e[1]), sp(e[2]), sp(e[3]), e[4]))

    for e in scaled:
        for p in e[1:3] + ((e[3],) if e[0] == "arc" else ()):
            if not geom.finite(p):
                raise NonFinite("non-finite coordinate")
        if e[0] == "arc":
            r1 = geom.dist(e[1], e[3])
            r2 = geom.dist(e[2], e[3])
            if r1 <= tol.eps_coord or abs(r1 - r2) > 1e-6 * max(1.0, r1):
                raise DegenerateElement("inconsistent arc radius")

    # chain continuity and closure
    for e, f in zip(scaled, scaled[1:]):
        if geom.dist(e[2], f[1]) > 1e-7:
            raise NotClosed("consecutive elements do not touch")
    if geom.dist(scaled[-1][2], scaled[0][1]) > 1e-7:
        raise NotClosed("chain does not close")

    full_circle = len(scaled) == 1 and scaled[0][0] == "arc" and \
        geom.dist(scaled[0][1], scaled[0][2]) <= tol.eps_coord
    if not full_circle:
        for e in scaled:
            L = _element_geom_len(e)
            if L <= tol.eps_coord:
                raise DegenerateElement("zero-length element")

    if element_area(scaled) < 0.0:
        scaled = _reverse_elements(scaled)

    # split arcs spanning over pi (three pieces for a full circle)
    split = []
    for e in scaled:
        if e[0] == "seg":
            split.append(e)
            continue
        _, p0, p1, c, ccw = e
        a0 = geom.angle_of(geom.sub(p0, c))
        a1 = geom.angle_of(geom.sub(p1, c))
        th = geom.norm_angle(a1 - a0) if ccw else geom.norm_angle(a0 - a1)
        if th <= 1e-12 and geom.dist(p0, p1) <= tol.eps_coord:
            split.extend(_split_element(e, 3))
        elif th > math.pi + tol.eps_angle:
            split.extend(_split_element(e, 2))
        else:
            split.append(e)

    geoms = [_element_geom(e) for e in split]
    _check_simple(geoms, tol)

    region = Region(tol=tol, scale=tool_radius)
    region.n = len(geoms)
    region.input_arcs = geoms
    verts = []
    for j, g in enumerate(geoms):
        verts.append(region.new_vertex(g.start, on_input=True, input_phi=float(j)))
    arcs = []
    for j, g in enumerate(geoms):
        a = region.new_arc(g, verts[j], verts[(j + 1) % len(geoms)], ("input", j, 0.0, 1.0))
        arcs.append(a)
    for j, a in enumerate(arcs):
        verts[j].out_arc = a
        verts[(j + 1) % len(geoms)].in_arc = a
    return region


def _element_geom_len(e):
    if e[0] == "seg":
        return geom.dist(e[1], e[2])
    _, p0, p1, c, ccw = e
    r = geom.dist(p0, c)
    a0 = geom.angle_of(geom.sub(p0, c))
    a1 = geom.angle_of(geom.sub(p1, c))
    th = geom.norm_angle(a1 - a0) if ccw else geom.norm_angle(a0 - a1)
    return r * th


def _check_simple(geoms, tol):
    """Reject self-intersections (grid-accelerated pairwise test)."""
    n = len(geoms)
    boxes = [g.bbox() for g in geoms]
    cell = max(max(b[2] - b[0], b[3] - b[1]) for b in boxes) + 1e-9
    grid = {}
    for i, b in enumerate(boxes):
        for ix in range(int(b[0] // cell), int(b[2] // cell) + 1):
            for iy in range(int(b[1] // cell), int(b[3] // cell) + 1):
                grid.setdefault((ix, iy), []).append(i)
    pairs = set()
    for bucket in grid.values():
        for i in range(len(bucket)):
            for k in range(i + 1, len(bucket)):
                pairs.add((min(bucket[i], bucket[k]), max(bucket[i], bucket[k])))
    for i, k in pairs:
        adjacent = (k == i + 1) or (i == 0 and k == n - 1)
        pts = _pair_intersections(geoms[i], geoms[k], tol)
        if not pts:
            continue
        if not adjacent:
            raise SelfIntersecting(f"elements {i} and {k} intersect")
        shared = geoms[i].start if (i == 0 and k == n - 1) else geoms[k].start
        for p in pts:
            if geom.dist(p, shared) > 1e-7:
                raise SelfIntersecting(f"adjacent elements {i},{k} touch off their joint")
