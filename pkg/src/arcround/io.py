"""Geometry/result document model (JSON) and conversions to regions.

Arcs are stored endpoint + center + direction to avoid wrap ambiguity; spans
over pi are legal in files and split at load.  Output coordinates are in
user units (rescaled by the tool radius).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import boundary, geom
from .boundary import Region, load_and_validate
from .errors import InputError, NotClosed
from .geom import ArcGeom, Point

FORMAT_VERSION = 1


@dataclass
class GeometryDocument:
    tool_radius: float
    start: tuple
    elements: list  # [{'kind': 'segment'|'arc', 'to': [x,y], 'center': [x,y], 'ccw': bool}]
    version: int = FORMAT_VERSION

    def to_json(self) -> str:
        return json.dumps({
            "version": self.version,
            "tool_radius": self.tool_radius,
            "start": list(self.start),
            "boundary": self.elements,
        }, indent=2)

    @staticmethod
    def from_json(text: str) -> "GeometryDocument":
        d = json.loads(text)
        return GeometryDocument(
            tool_radius=float(d["tool_radius"]),
            start=tuple(d["start"]),
            elements=d["boundary"],
            version=int(d.get("version", FORMAT_VERSION)),
        )

    def raw_elements(self):
        """Chain as (kind, p0, p1[, center, ccw]) tuples in user units."""
        out = []
        cur = Point(*self.start)
        for e in self.elements:
            to = Point(*e["to"])
            if e["kind"] == "segment":
                out.append(("seg", cur, to))
            elif e["kind"] == "arc":
                out.append(("arc", cur, to, Point(*e["center"]), bool(e["ccw"])))
            else:
                raise InputError(f"unknown element kind {e['kind']!r}")
            cur = to
        return out

    def to_region(self, tool_radius=None, tol=geom.DEFAULT_TOL) -> Region:
        r = self.tool_radius if tool_radius is None else tool_radius
        return load_and_validate(self.raw_elements(), r, tol)


@dataclass
class ResultDocument:
    tool_radius: float
    components: list   # [{'start': [x,y], 'boundary': [elements + 'provenance']}]
    stats: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION

    def to_json(self) -> str:
        return json.dumps({
            "version": self.version,
            "tool_radius": self.tool_radius,
            "components": self.components,
            "stats": self.stats,
        }, indent=2)

    @staticmethod
    def from_json(text: str) -> "ResultDocument":
        d = json.loads(text)
        return ResultDocument(
            tool_radius=float(d["tool_radius"]),
            components=d["components"],
            stats=d.get("stats", {}),
            version=int(d.get("version", FORMAT_VERSION)),
        )


def region_to_result(region: Region, stats=None) -> ResultDocument:
    """Serialize the current boundary, rescaled back to user units."""
    s = region.scale
    comps = []
    for loop in region.loops():
        elems = []
        start = loop[0].geom.start
        for a in loop:
            g = a.geom
            e = {"kind": "segment" if g.kind == "seg" else "arc",
                 "to": [g.end.x * s, g.end.y * s],
                 "provenance": "input" if a.is_input() else "cut"}
            if g.kind == "arc":
                e["center"] = [g.center.x * s, g.center.y * s]
                e["ccw"] = g.ccw
            elems.append(e)
        comps.append({"start": [start.x * s, start.y * s], "boundary": elems})
    return ResultDocument(tool_radius=s, components=comps,
                          stats=stats.as_dict() if stats is not None else {})


def result_loops_scaled(doc: ResultDocument):
    """Loops of (ArcGeom, provenance) in normalized units (divided by r)."""
    s = 1.0 / doc.tool_radius
    loops = []
    for comp in doc.components:
        cur = Point(comp["start"][0] * s, comp["start"][1] * s)
        loop = []
        for e in comp["boundary"]:
            to = Point(e["to"][0] * s, e["to"][1] * s)
            if e["kind"] == "segment":
                g = ArcGeom("seg", cur, to)
            else:
                c = Point(e["center"][0] * s, e["center"][1] * s)
                g = ArcGeom("arc", cur, to, c, geom.dist(cur, c), bool(e["ccw"]))
            loop.append((g, e.get("provenance", "input")))
            cur = to
        if geom.dist(cur, Point(comp["start"][0] * s, comp["start"][1] * s)) > 1e-7:
            raise NotClosed("result component does not close")
        loops.append(loop)
    return loops


# -- loop comparison (idempotence / identity tests) -----------------------------


def _canon_loop(gs, tol=1e-9):
    sigs = []
    for g in gs:
        if g.kind == "seg":
            sigs.append(("s", g.start.x, g.start.y, g.end.x, g.end.y, 0.0, 0.0, 0))
        else:
            sigs.append(("a", g.start.x, g.start.y, g.end.x, g.end.y,
                         g.center.x, g.center.y, 1 if g.ccw else -1))
    k = min(range(len(sigs)), key=lambda i: sigs[i][1:])
    return sigs[k:] + sigs[:k]


def loops_equal(loops_a, loops_b, tol=1e-9):
    """Element-wise match of two loop sets within a coordinate tolerance."""
    if len(loops_a) != len(loops_b):
        return False
    ca = sorted((_canon_loop(l) for l in loops_a), key=lambda l: l[0][1:])
    cb = sorted((_canon_loop(l) for l in loops_b), key=lambda l: l[0][1:])
    for la, lb in zip(ca, cb):
        if len(la) != len(lb):
            return False
        for ea, eb in zip(la, lb):
            if ea[0] != eb[0] or ea[7] != eb[7]:
                return False
            if any(abs(x - y) > tol for x, y in zip(ea[1:7], eb[1:7])):
                return False
    return True


def region_loops_geoms(region: Region):
    return [[a.geom for a in loop] for loop in region.loops()]
