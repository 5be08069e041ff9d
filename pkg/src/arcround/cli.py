"""Command-line surface: round, verify, baseline."""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import engine, fuzz, io as aio, svg, verify
from .boundary import Region
from .errors import ArcRoundError, InputError, InvariantError
from .geom import Tolerance


def _tolerance(eps):
    if eps is None:
        return Tolerance()
    return Tolerance(eps_coord=eps, eps_angle=eps, eps_param=eps)


def _load_doc(path):
    with open(path, "r", encoding="utf-8") as f:
        return aio.GeometryDocument.from_json(f.read())


def _dump_state(region, out_dir=None):
    doc = aio.region_to_result(region)
    fd, path = tempfile.mkstemp(prefix="arcround_state_", suffix=".json", dir=out_dir)
    with os.fdopen(fd, "w", encoding="utf-8") as f:
        f.write(doc.to_json())
    return path


def cmd_round(args) -> int:
    tol = _tolerance(args.tolerance)
    if args.seed is not None:
        doc = fuzz.random_document(args.seed, n_target=args.size)
    elif args.input:
        doc = _load_doc(args.input)
    else:
        print("error: an input path or --seed is required", file=sys.stderr)
        return 1
    try:
        region = doc.to_region(tool_radius=args.tool_radius, tol=tol)
    except InputError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    input_loops = [[a.geom for a in loop] for loop in region.loops()]

    timeline_dir = args.timeline
    if timeline_dir:
        os.makedirs(timeline_dir, exist_ok=True)

    def on_cut(it, reg, spec):
        if not timeline_dir:
            return
        hl = None
        if not spec.is_remove:
            import math as _m
            from .geom import ArcGeom
            hl = ArcGeom("arc", spec.s_pt, spec.t_pt, spec.circle.center, 1.0, True)
        text = svg.render_region(reg, highlight=hl, input_loops=input_loops)
        with open(os.path.join(timeline_dir, f"cut_{it:04d}.svg"), "w") as f:
            f.write(text)

    try:
        stats = engine.run(region, budget=args.budget, on_cut=on_cut if timeline_dir else None)
    except InvariantError as e:
        path = _dump_state(region)
        print(f"error: {type(e).__name__}: {e}\nstate dump: {path}", file=sys.stderr)
        return 2

    result = aio.region_to_result(region, stats)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(result.to_json())
    else:
        print(result.to_json())
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as f:
            f.write(svg.render_region(region, input_loops=input_loops))
    if args.stats:
        print(json.dumps(stats.as_dict(), indent=2), file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    tol = _tolerance(args.tolerance)
    in_doc = _load_doc(args.input)
    with open(args.result, "r", encoding="utf-8") as f:
        res_doc = aio.ResultDocument.from_json(f.read())
    region = in_doc.to_region(tol=tol)
    h = args.resolution

    rows = []
    loops = aio.result_loops_scaled(res_doc)

    # curvature audit over the result document
    bad_arcs = 0
    bad_vertices = 0
    bad_prov = 0
    for loop in loops:
        m = len(loop)
        for i, (g, prov) in enumerate(loop):
            if g.is_convex() and g.radius < 1.0 - 1e-9:
                bad_arcs += 1
            if g.is_concave() and prov != "input":
                bad_prov += 1
            g2, prov2 = loop[(i + 1) % m]
            ta, tb = g.tangent_at(1.0), g2.tangent_at(0.0)
            import math as _m
            ang = _m.atan2(verify.geom.cross(ta, tb), verify.geom.dot(ta, tb))
            if ang > tol.eps_angle:
                bad_vertices += 1
            elif ang < -tol.eps_angle and prov != "input" and prov2 != "input":
                bad_prov += 1
    rows.append(("curvature: convex arcs < 1", bad_arcs == 0, f"{bad_arcs} found"))
    rows.append(("curvature: convex vertices", bad_vertices == 0, f"{bad_vertices} found"))
    rows.append(("curvature: concave provenance", bad_prov == 0, f"{bad_prov} found"))

    # raster sandwich against the input and an internal rerun
    p1 = verify.rasterize_region(region, h, pad=1.5)
    frame = verify.frame_tuple(p1)
    res_arcs = [g for loop in loops for g, _ in loop]
    qmask = verify.rasterize(res_arcs, h, frame=frame) if res_arcs else \
        verify.RasterMask(p1.ox, p1.oy, h, p1.grid & False)
    open_mask = verify.opening(p1)
    rows.append(("result inside the input", verify.raster_subset(qmask, p1, 1), ""))
    rows.append(("opening inside the result", verify.raster_subset(open_mask, qmask, 1), ""))

    disk_ok = all(verify.inscribed_unit_disk([g for g, _ in loop], h) for loop in loops)
    rows.append(("components admit a unit disk", disk_ok, f"{len(loops)} components"))

    region_q = in_doc.to_region(tol=tol)
    engine.run(region_q, budget=args.budget)
    qtrue = verify.rasterize_region(region_q, h, frame=frame)
    rows.append(("maximality (computed subset inside result)",
                 verify.raster_subset(qtrue, qmask, 1), ""))

    ok = all(r[1] for r in rows)
    width = max(len(r[0]) for r in rows)
    for name, passed, note in rows:
        print(f"{'PASS' if passed else 'FAIL'}  {name:<{width}}  {note}")
    return 0 if ok else 1


def cmd_baseline(args) -> int:
    tol = _tolerance(args.tolerance)
    try:
        doc = _load_doc(args.input)
        region = doc.to_region(tol=tol)
    except InputError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    h = args.resolution
    base = verify.double_offset_baseline(region, h)
    area = base.area() * region.scale * region.scale
    print(json.dumps({"baseline_area": area, "cells": int(base.grid.sum()), "h": h}))
    if args.svg:
        # trace the mask boundary coarsely as a set of cell rows
        print("note: baseline SVG shows the raster silhouette", file=sys.stderr)
        with open(args.svg, "w", encoding="utf-8") as f:
            f.write(_mask_svg(base))
    return 0


def _mask_svg(mask) -> str:
    import numpy as np
    ny, nx = mask.grid.shape
    rects = []
    for i in range(ny):
        row = mask.grid[i]
        j = 0
        while j < nx:
            if row[j]:
                k = j
                while k < nx and row[k]:
                    k += 1
                x = mask.ox + j * mask.h
                y = mask.oy + i * mask.h
                rects.append(f'<rect x="{x:.4f}" y="{y:.4f}" width="{(k-j)*mask.h:.4f}" '
                             f'height="{mask.h:.4f}"/>')
                j = k
            else:
                j += 1
    w = nx * mask.h
    hgt = ny * mask.h
    return (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{mask.ox} {-mask.oy-hgt} {w} {hgt}">'
            f'<g transform="scale(1,-1)" fill="#567">' + "".join(rects) + "</g></svg>")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="arcround",
                                 description="Maximum bounded-convex-curvature subset of a pocket boundary")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("round", help="compute the rounded subset")
    p.add_argument("input", nargs="?", help="geometry document (JSON)")
    p.add_argument("--tool-radius", type=float, default=None, help="override the document's tool radius")
    p.add_argument("--out", "-o", help="result document path (default: stdout)")
    p.add_argument("--svg", help="write an SVG of the result")
    p.add_argument("--timeline", help="directory for one SVG per cut")
    p.add_argument("--stats", action="store_true", help="print run statistics to stderr")
    p.add_argument("--tolerance", type=float, default=None, help="coincidence tolerance")
    p.add_argument("--seed", type=int, default=None, help="fuzz mode: generate the input from a seed")
    p.add_argument("--size", type=int, default=32, help="fuzz mode vertex count")
    p.add_argument("--budget", type=int, default=50, help="iteration budget multiplier")
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("verify", help="check a result document against its input")
    p.add_argument("result", help="result document (JSON)")
    p.add_argument("input", help="geometry document (JSON)")
    p.add_argument("--resolution", type=float, default=0.01)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--budget", type=int, default=50)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("baseline", help="double-offset (opening) baseline area")
    p.add_argument("input", help="geometry document (JSON)")
    p.add_argument("--resolution", type=float, default=0.01)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--svg", help="write the baseline silhouette")
    p.set_defaults(func=cmd_baseline)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ArcRoundError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
