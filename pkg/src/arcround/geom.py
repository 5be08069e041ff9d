"""Planar primitives: points, circles, directed segments/arcs and their predicates.

Coordinates are plain doubles in normalized units (after input scaling the
curvature bound is 1).  Segments are a separate kind, never huge-radius arcs;
every predicate has an explicit segment branch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

TWO_PI = 2.0 * math.pi


class Point(NamedTuple):
    x: float
    y: float


class Circle(NamedTuple):
    center: Point
    radius: float


def add(p: Point, q: Point) -> Point:
    return Point(p.x + q.x, p.y + q.y)


def sub(p: Point, q: Point) -> Point:
    return Point(p.x - q.x, p.y - q.y)


def mul(p: Point, k: float) -> Point:
    return Point(p.x * k, p.y * k)


def dot(p: Point, q: Point) -> float:
    return p.x * q.x + p.y * q.y


def cross(p: Point, q: Point) -> float:
    return p.x * q.y - p.y * q.x


def norm(p: Point) -> float:
    return math.hypot(p.x, p.y)


def dist(p: Point, q: Point) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


def unit(p: Point) -> Point:
    n = math.hypot(p.x, p.y)
    if n == 0.0:
        raise ZeroDivisionError("zero vector has no direction")
    return Point(p.x / n, p.y / n)


def rot90(p: Point) -> Point:
    """Counterclockwise quarter turn."""
    return Point(-p.y, p.x)


def angle_of(p: Point) -> float:
    return math.atan2(p.y, p.x)


def lerp(p: Point, q: Point, t: float) -> Point:
    return Point(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t)


def norm_angle(a: float) -> float:
    """Reduce to [0, 2*pi)."""
    a = math.fmod(a, TWO_PI)
    return a + TWO_PI if a < 0.0 else a


def finite(p: Point) -> bool:
    return math.isfinite(p.x) and math.isfinite(p.y)


@dataclass(frozen=True)
class Tolerance:
    """Numeric slack for coincidence tests on normalized geometry."""

    eps_coord: float = 1e-9
    eps_angle: float = 1e-9
    eps_param: float = 1e-9

    def __post_init__(self):
        if min(self.eps_coord, self.eps_angle, self.eps_param) <= 0.0:
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class ArcGeom:
    """A directed line segment or circular arc.

    For arcs the angular span is derived from the endpoints and the
    orientation flag; the constructor rejects start == end, so full circles
    must be split before they reach this type.
    """

    kind: str  # 'seg' | 'arc'
    start: Point
    end: Point
    center: Optional[Point] = None
    radius: float = 0.0
    ccw: bool = True

    def __post_init__(self):
        if self.kind == "seg":
            L = dist(self.start, self.end)
            if L == 0.0:
                raise ValueError("zero-length segment")
            object.__setattr__(self, "_a0", 0.0)
            object.__setattr__(self, "_sweep", 0.0)
            object.__setattr__(self, "_len", L)
        elif self.kind == "arc":
            if self.center is None or self.radius <= 0.0:
                raise ValueError("arc needs a center and positive radius")
            a0 = angle_of(sub(self.start, self.center))
            a1 = angle_of(sub(self.end, self.center))
            if self.ccw:
                sweep = norm_angle(a1 - a0)
            else:
                sweep = -norm_angle(a0 - a1)
            if sweep == 0.0:
                raise ValueError("degenerate arc span (full circles must be pre-split)")
            object.__setattr__(self, "_a0", a0)
            object.__setattr__(self, "_sweep", sweep)
            object.__setattr__(self, "_len", self.radius * abs(sweep))
        else:
            raise ValueError(f"unknown kind {self.kind!r}")

    # -- basic measures ----------------------------------------------------

    def length(self) -> float:
        return self._len

    def span_angle(self) -> float:
        """Unsigned angular span; 0 for segments."""
        return abs(self._sweep)

    def angle_at(self, t: float) -> float:
        return self._a0 + t * self._sweep

    def is_convex(self) -> bool:
        """Left-turning when traversed forward (circular arcs only)."""
        return self.kind == "arc" and self.ccw

    def is_concave(self) -> bool:
        return self.kind == "arc" and not self.ccw

    # -- evaluation (t is unclamped: values outside [0,1] extrapolate) -----

    def point_at(self, t: float) -> Point:
        if self.kind == "seg":
            return lerp(self.start, self.end, t)
        a = self._a0 + t * self._sweep
        return Point(self.center.x + self.radius * math.cos(a),
                     self.center.y + self.radius * math.sin(a))

    def tangent_at(self, t: float) -> Point:
        """Unit tangent in the direction of travel."""
        if self.kind == "seg":
            return unit(sub(self.end, self.start))
        a = self._a0 + t * self._sweep
        if self.ccw:
            return Point(-math.sin(a), math.cos(a))
        return Point(math.sin(a), -math.cos(a))

    def left_normal_at(self, t: float) -> Point:
        return rot90(self.tangent_at(t))

    def param_of(self, p: Point) -> float:
        """Parameter of p's projection onto the carrier.

        For arcs the angular branch cut is placed opposite the span, so the
        result is continuous on a margin around [0, 1].
        """
        if self.kind == "seg":
            d = sub(self.end, self.start)
            return dot(sub(p, self.start), d) / (self._len * self._len)
        theta = angle_of(sub(p, self.center))
        span = abs(self._sweep)
        margin = (TWO_PI - span) / 2.0
        if self.ccw:
            delta = norm_angle(theta - self._a0)
        else:
            delta = norm_angle(self._a0 - theta)
        if delta > span + margin:
            delta -= TWO_PI
        return delta / span

    def param_of_angle(self, theta: float) -> float:
        span = abs(self._sweep)
        margin = (TWO_PI - span) / 2.0
        if self.ccw:
            delta = norm_angle(theta - self._a0)
        else:
            delta = norm_angle(self._a0 - theta)
        if delta > span + margin:
            delta -= TWO_PI
        return delta / span

    # -- construction ------------------------------------------------------

    def subarc(self, t0: float, t1: float, p0: Point = None, p1: Point = None) -> "ArcGeom":
        """Sub-element on the same carrier from t0 to t1 (t0 < t1).

        Endpoints may be passed in to keep shared vertices bit-identical.
        """
        a = self.point_at(t0) if p0 is None else p0
        b = self.point_at(t1) if p1 is None else p1
        if self.kind == "seg":
            return ArcGeom("seg", a, b)
        return ArcGeom("arc", a, b, self.center, self.radius, self.ccw)

    def split_at(self, t: float, p: Point = None):
        p = self.point_at(t) if p is None else p
        return (self.subarc(0.0, t, self.start, p), self.subarc(t, 1.0, p, self.end))

    def reversed_(self) -> "ArcGeom":
        if self.kind == "seg":
            return ArcGeom("seg", self.end, self.start)
        return ArcGeom("arc", self.end, self.start, self.center, self.radius, not self.ccw)

    def bbox(self):
        """(xmin, ymin, xmax, ymax), exact for arcs via axis extremes in span."""
        xs = [self.start.x, self.end.x]
        ys = [self.start.y, self.end.y]
        if self.kind == "arc":
            for k, ex, ey in ((0.0, 1.0, 0.0), (0.25, 0.0, 1.0), (0.5, -1.0, 0.0), (0.75, 0.0, -1.0)):
                theta = k * TWO_PI
                t = self.param_of_angle(theta)
                if 0.0 <= t <= 1.0:
                    xs.append(self.center.x + self.radius * ex)
                    ys.append(self.center.y + self.radius * ey)
        return (min(xs), min(ys), max(xs), max(ys))


# -- closest point / osculation --------------------------------------------


def closest_point(A: ArcGeom, x: Point, tol: Tolerance = DEFAULT_TOL):
    """Closest point on A (endpoints included): returns (p, d, t)."""
    if A.kind == "seg":
        t = A.param_of(x)
        t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
        p = A.point_at(t)
        return p, dist(x, p), t
    r = dist(x, A.center)
    if r <= tol.eps_coord:
        p = A.point_at(0.5)
        return p, A.radius, 0.5
    t = A.param_of(x)
    if 0.0 <= t <= 1.0:
        u = mul(sub(x, A.center), A.radius / r)
        p = add(A.center, u)
        return p, abs(r - A.radius), t
    d0 = dist(x, A.start)
    d1 = dist(x, A.end)
    return (A.start, d0, 0.0) if d0 <= d1 else (A.end, d1, 1.0)


def osculating_circle(A: ArcGeom, x: Point, tol: Tolerance = DEFAULT_TOL):
    """Circle centered at x osculating A, or None.

    Exists iff x lies on the left-normal ray of its closest point on A
    (c >= 0); the radius is then the distance to that closest point.
    Returns (Circle, contact_point, contact_t).
    """
    p, d, t = closest_point(A, x, tol)
    if d <= tol.eps_coord:
        return Circle(x, 0.0), p, t
    n = A.left_normal_at(t)
    v = sub(x, p)
    # x = p + d*n within tolerance
    if dist(v, mul(n, d)) <= max(tol.eps_coord, d * tol.eps_angle) * 8.0:
        return Circle(x, d), p, t
    return None


# -- intersections -----------------------------------------------------------


def _dedupe(points, tol):
    out = []
    for item in points:
        if all(dist(item[0], o[0]) > tol.eps_coord * 4.0 for o in out):
            out.append(item)
    return out


def circle_line_points(C: Circle, origin: Point, direction: Point, tol: Tolerance):
    """Intersections of a circle with an infinite line; list of (point, line_param, tangential)."""
    d = direction
    f = sub(origin, C.center)
    a = dot(d, d)
    b = 2.0 * dot(f, d)
    c = dot(f, f) - C.radius * C.radius
    disc = b * b - 4.0 * a * c
    lim = 4.0 * a * max(tol.eps_coord, tol.eps_coord * C.radius)
    if disc < -lim:
        return []
    if disc <= lim:
        s = -b / (2.0 * a)
        return [(add(origin, mul(d, s)), s, True)]
    q = math.sqrt(disc)
    s1 = (-b - q) / (2.0 * a)
    s2 = (-b + q) / (2.0 * a)
    return [(add(origin, mul(d, s1)), s1, False), (add(origin, mul(d, s2)), s2, False)]


def circle_circle_points(C1: Circle, C2: Circle, tol: Tolerance):
    """Intersections of two circles; list of (point, tangential). Same circle -> []."""
    d = dist(C1.center, C2.center)
    if d <= tol.eps_coord and abs(C1.radius - C2.radius) <= tol.eps_coord:
        return []  # identical carriers: overlap handled by callers as non-crossing
    if d <= tol.eps_coord:
        return []
    lo = abs(C1.radius - C2.radius)
    hi = C1.radius + C2.radius
    eps = max(tol.eps_coord, tol.eps_coord * max(C1.radius, C2.radius)) * 4.0
    if d > hi + eps or d < lo - eps:
        return []
    ex = mul(sub(C2.center, C1.center), 1.0 / d)
    a = (d * d + C1.radius * C1.radius - C2.radius * C2.radius) / (2.0 * d)
    h2 = C1.radius * C1.radius - a * a
    base = add(C1.center, mul(ex, a))
    if h2 <= eps * max(C1.radius, 1.0):
        return [(base, True)]
    h = math.sqrt(max(h2, 0.0))
    ey = rot90(ex)
    return [(add(base, mul(ey, h)), False), (add(base, mul(ey, -h)), False)]


def circle_arc_intersections(C: Circle, A: ArcGeom, tol: Tolerance = DEFAULT_TOL):
    """Points of A on circle C, sorted by A's parameter.

    Returns list of (point, t_on_A, tangential).  Tangential touches are
    reported once and flagged; coincident carriers yield no points.
    """
    if C.radius <= 0.0:
        raise ValueError("query circle must have positive radius")
    raw = []
    if A.kind == "seg":
        d = sub(A.end, A.start)
        for p, s, tang in circle_line_points(C, A.start, d, tol):
            raw.append((p, s, tang))
    else:
        for p, tang in circle_circle_points(C, Circle(A.center, A.radius), tol):
            raw.append((p, A.param_of(p), tang))
    out = []
    slack = tol.eps_coord / max(A.length(), tol.eps_coord)
    for p, t, tang in raw:
        if -slack <= t <= 1.0 + slack:
            tc = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
            out.append((A.point_at(tc) if abs(tc - t) > 0 else p, tc, tang))
    out.sort(key=lambda it: it[1])
    return _dedupe(out, tol)


# -- unit-offset loci ---------------------------------------------------------


class LineLocus(NamedTuple):
    origin: Point
    direction: Point  # unit


class CircleLocus(NamedTuple):
    circle: Circle


def unit_offset_locus(site, tol: Tolerance = DEFAULT_TOL):
    """Centers at osculation distance 1 from a site, on its left side.

    Segment -> one parallel line offset by the left normal; convex arc of
    radius rho -> concentric circle rho-1 (empty if rho < 1); concave arc ->
    concentric circle rho+1; a bare Point -> its unit circle.
    """
    if isinstance(site, Point):
        return [CircleLocus(Circle(site, 1.0))]
    A = site
    if A.kind == "seg":
        n = A.left_normal_at(0.0)
        return [LineLocus(add(A.start, n), A.tangent_at(0.0))]
    if A.ccw:  # convex: centers inside the carrier
        if A.radius < 1.0 - tol.eps_coord:
            return []
        return [CircleLocus(Circle(A.center, A.radius - 1.0))]
    return [CircleLocus(Circle(A.center, A.radius + 1.0))]


def locus_intersections(l0, l1, tol: Tolerance = DEFAULT_TOL):
    """Intersection points of two loci (lines/circles)."""
    if isinstance(l0, LineLocus) and isinstance(l1, LineLocus):
        d = cross(l0.direction, l1.direction)
        if abs(d) < 1e-14:
            return []
        w = sub(l1.origin, l0.origin)
        s = cross(w, l1.direction) / d
        return [add(l0.origin, mul(l0.direction, s))]
    if isinstance(l0, LineLocus):
        return [p for p, _, _ in circle_line_points(l1.circle, l0.origin, l0.direction, tol)]
    if isinstance(l1, LineLocus):
        return [p for p, _, _ in circle_line_points(l0.circle, l1.origin, l1.direction, tol)]
    c0, c1 = l0.circle, l1.circle
    if c0.radius <= tol.eps_coord:
        return [c0.center] if abs(dist(c0.center, c1.center) - c1.radius) <= tol.eps_coord * 8 else []
    if c1.radius <= tol.eps_coord:
        return [c1.center] if abs(dist(c0.center, c1.center) - c0.radius) <= tol.eps_coord * 8 else []
    return [p for p, _ in circle_circle_points(c0, c1, tol)]
