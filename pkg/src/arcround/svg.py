"""Static SVG rendering of boundaries and per-cut timelines."""
from __future__ import annotations

import math

from . import geom


def _path_of_loop(gs, scale=1.0):
    p0 = gs[0].start
    parts = [f"M {p0.x * scale:.6f} {p0.y * scale:.6f}"]
    for g in gs:
        e = g.end
        if g.kind == "seg":
            parts.append(f"L {e.x * scale:.6f} {e.y * scale:.6f}")
        else:
            large = 1 if g.span_angle() > math.pi else 0
            sweep = 1 if g.ccw else 0
            r = g.radius * scale
            parts.append(f"A {r:.6f} {r:.6f} 0 {large} {sweep} {e.x * scale:.6f} {e.y * scale:.6f}")
    parts.append("Z")
    return " ".join(parts)


def render(loops, extra_loops=(), highlight=None, width=640) -> str:
    """SVG document for loops of ArcGeom; extra loops drawn dashed, the
    highlight arc drawn on top in red."""
    all_gs = [g for loop in loops for g in loop] + \
             [g for loop in extra_loops for g in loop] + \
             ([highlight] if highlight is not None else [])
    if not all_gs:
        return '<svg xmlns="http://www.w3.org/2000/svg" width="64" height="64"/>'
    x0 = min(g.bbox()[0] for g in all_gs)
    y0 = min(g.bbox()[1] for g in all_gs)
    x1 = max(g.bbox()[2] for g in all_gs)
    y1 = max(g.bbox()[3] for g in all_gs)
    pad = 0.05 * max(x1 - x0, y1 - y0, 1e-6)
    x0, y0, x1, y1 = x0 - pad, y0 - pad, x1 + pad, y1 + pad
    w, h = x1 - x0, y1 - y0
    height = int(width * h / w) if w > 0 else width
    sw = max(w, h) / 300.0
    body = []
    for loop in extra_loops:
        body.append(f'<path d="{_path_of_loop(loop)}" fill="none" stroke="#999" '
                    f'stroke-width="{sw:.6f}" stroke-dasharray="{4*sw:.6f} {3*sw:.6f}"/>')
    for loop in loops:
        body.append(f'<path d="{_path_of_loop(loop)}" fill="#dce9f5" stroke="#234" '
                    f'stroke-width="{1.6*sw:.6f}"/>')
    if highlight is not None:
        body.append(f'<path d="{_path_of_loop([highlight])[:-2]}" fill="none" stroke="#c22" '
                    f'stroke-width="{1.6*sw:.6f}"/>')
    inner = "\n  ".join(body)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="{x0:.6f} {-y1:.6f} {w:.6f} {h:.6f}">\n'
            f'<g transform="scale(1,-1)">\n  {inner}\n</g>\n</svg>\n')


def render_region(region, highlight=None, input_loops=None, width=640) -> str:
    loops = [[a.geom for a in loop] for loop in region.loops()]
    extra = input_loops if input_loops is not None else []
    return render(loops, extra_loops=extra, highlight=highlight, width=width)
