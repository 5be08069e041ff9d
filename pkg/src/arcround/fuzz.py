"""Random curvilinear polygon generator for the structural test corpus.

Star-shaped base polygons (sorted angles, bounded radii) with a fraction of
edges bulged into circular arcs; candidates failing the simplicity check are
regenerated, so every returned document loads cleanly.
"""
from __future__ import annotations

import math
import random

from . import boundary, geom
from .errors import InputError
from .geom import Point
from .io import GeometryDocument


def _star_points(rng, n, r_lo, r_hi):
    gaps = [rng.uniform(0.2, 1.0) for _ in range(n)]
    total = sum(gaps)
    angles = []
    acc = rng.uniform(0.0, 2.0 * math.pi)
    for g in gaps:
        angles.append(acc)
        acc += 2.0 * math.pi * g / total
    pts = []
    for a in angles:
        r = rng.uniform(r_lo, r_hi)
        pts.append(Point(r * math.cos(a), r * math.sin(a)))
    return pts


def _bulge_elements(rng, pts, arc_fraction):
    elems = []
    n = len(pts)
    for i in range(n):
        p0, p1 = pts[i], pts[(i + 1) % n]
        L = geom.dist(p0, p1)
        if rng.random() < arc_fraction and L > 1e-3:
            sag = rng.uniform(-0.45, 0.45) * L
            if abs(sag) < 0.02 * L:
                elems.append(("seg", p0, p1))
                continue
            h = abs(sag)
            r = (L * L / 4.0 + h * h) / (2.0 * h)
            m = geom.mul(geom.add(p0, p1), 0.5)
            up = geom.unit(geom.rot90(geom.sub(p1, p0)))
            # sag > 0 bulges left of travel (convex), center on the right
            center = geom.add(m, geom.mul(up, (h - r) if sag > 0 else (r - h)))
            elems.append(("arc", p0, p1, center, sag > 0))
        else:
            elems.append(("seg", p0, p1))
    return elems


def random_document(seed: int, n_target: int = 24, scale: float = 1.0,
                    arc_fraction: float = 0.55, tool_radius: float = 1.0,
                    max_tries: int = 200) -> GeometryDocument:
    """A loadable random curvilinear polygon document.

    Sizes are in normalized units times `scale`: radii land in roughly
    [1.6, 3.4] * scale, so unit features interact with the shape.
    """
    rng = random.Random(seed)
    n = max(3, n_target)
    for _ in range(max_tries):
        pts = _star_points(rng, n, 1.6 * scale, 3.4 * scale)
        elems = _bulge_elements(rng, pts, arc_fraction)
        r = tool_radius
        doc = GeometryDocument(
            tool_radius=r,
            start=[pts[0].x * r, pts[0].y * r],
            elements=_to_doc_elements(elems, r),
        )
        try:
            doc.to_region()
        except InputError:
            continue
        return doc
    raise InputError(f"could not generate a simple polygon for seed {seed}")


def _to_doc_elements(elems, r):
    out = []
    for e in elems:
        if e[0] == "seg":
            out.append({"kind": "segment", "to": [e[2].x * r, e[2].y * r]})
        else:
            _, _p0, p1, c, ccw = e
            out.append({"kind": "arc", "to": [p1.x * r, p1.y * r],
                        "center": [c.x * r, c.y * r], "ccw": ccw})
    return out
