"""Standalone SVG figures with stable element ordering.

Hand-rolled writer: every coordinate is rounded to a fixed precision and
elements are emitted in deterministic order, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import math

import numpy as np

from .metrics import bfs_distances
from .percolation import ClusterSet

_HEX_ANGLES = [math.pi / 6 + k * math.pi / 3 for k in range(6)]
_HEX_R = 1.0 / math.sqrt(3.0)


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _hex_points(x: float, y: float) -> str:
    pts = [
        f"{_fmt(x + _HEX_R * math.cos(a))},{_fmt(y + _HEX_R * math.sin(a))}"
        for a in _HEX_ANGLES
    ]
    return " ".join(pts)


def _color_ramp(t: float) -> str:
    """Blue -> teal -> yellow ramp on [0, 1]."""
    t = min(max(t, 0.0), 1.0)
    r = int(round(40 + 215 * t))
    g = int(round(60 + 160 * t))
    b = int(round(180 - 140 * t))
    return f"#{r:02x}{g:02x}{b:02x}"


def _svg_header(n: float, width: int = 720) -> list:
    half = n + 2
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{width}" '
        f'viewBox="{_fmt(-half)} {_fmt(-half)} {_fmt(2 * half)} {_fmt(2 * half)}">',
        f'<rect x="{_fmt(-half)}" y="{_fmt(-half)}" width="{_fmt(2 * half)}" '
        f'height="{_fmt(2 * half)}" fill="#ffffff"/>',
    ]


def empty_canvas() -> str:
    return "\n".join(_svg_header(10) + ["</svg>"]) + "\n"


def percolation_svg(
    cs: ClusterSet,
    coloring: str = "cluster",
    with_loops: bool = False,
    distance_root: tuple | None = None,
) -> str:
    """Hexagonal-cell rendering of a configuration.

    coloring: "cluster" (one color per cluster), "open" (single tone), or
    "distance" (cells of the root's cluster shaded by graph distance to a
    center site, drawn in red).
    """
    lat = cs.lattice
    grid = cs.config.open_grid
    flats = np.flatnonzero(grid.ravel())
    xs, ys = lat.flat_xy(flats)
    labels = cs.cluster_grid.ravel()[flats]
    parts = _svg_header(lat.n)

    dist_map = {}
    root_flat = None
    if coloring == "distance":
        root_flat = _distance_root_flat(cs, distance_root)
        dist_map = _cluster_distances(cs, root_flat)
        dmax = max(dist_map.values()) if dist_map else 1
    order = np.argsort(flats)
    for i in order:
        flat, x, y, lab = int(flats[i]), xs[i], ys[i], int(labels[i])
        if coloring == "cluster":
            fill = _color_ramp((lab % 23) / 22.0)
        elif coloring == "distance":
            if flat not in dist_map:
                fill = "#e0e0e0"
            else:
                fill = _color_ramp(dist_map[flat] / max(dmax, 1))
        else:
            fill = "#4060b4"
        parts.append(f'<polygon points="{_hex_points(x, -y)}" fill="{fill}"/>')
    if root_flat is not None:
        rx, ry = lat.flat_xy(np.asarray([root_flat]))
        parts.append(
            f'<circle cx="{_fmt(float(rx[0]))}" cy="{_fmt(-float(ry[0]))}" '
            f'r="0.8" fill="#d02020"/>'
        )
    if with_loops:
        parts.extend(_loop_paths(cs))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _distance_root_flat(cs: ClusterSet, root: tuple | None) -> int:
    lat = cs.lattice
    if root is not None:
        return int(lat.qr_to_flat(*root))
    open_flats = np.flatnonzero(cs.config.open_grid.ravel())
    if open_flats.size == 0:
        raise ValueError("no open sites to root the distance coloring at")
    xs, ys = lat.flat_xy(open_flats)
    return int(open_flats[np.argmin(xs**2 + ys**2)])


def _cluster_distances(cs: ClusterSet, root_flat: int) -> dict:
    lat = cs.lattice
    cid = int(cs.cluster_grid.ravel()[root_flat])
    if cid == 0:
        raise ValueError("distance root must be an open site")
    member = cs.cluster_site_flats(cid)
    members = set(int(f) for f in member)
    adj = {}
    for f in members:
        adj[f] = tuple(f + int(o) for o in lat.dir_offsets if f + int(o) in members)
    return bfs_distances(adj, root_flat)


def _loop_paths(cs: ClusterSet) -> list:
    parts = []
    for cid in sorted(cs.loops):
        for lp in cs.loops[cid]:
            pts = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in lp.corners)
            color = "#202020" if lp.exterior else "#a03030"
            parts.append(
                f'<polygon points="{pts}" fill="none" stroke="{color}" stroke-width="0.12"/>'
            )
    return parts


def scaling_plot_svg(sizes, values, slope: float, intercept: float, label: str = "") -> str:
    """log-log scatter of medians against 1/n with the fitted line."""
    xs = [math.log(1.0 / s) for s in sizes]
    ys = [math.log(v) for v in values]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys + [slope * x0 + intercept, slope * x1 + intercept]), max(
        ys + [slope * x0 + intercept, slope * x1 + intercept]
    )
    pad = 0.1 * max(x1 - x0, y1 - y0, 1e-9)
    W = 640.0

    def sx(x):
        return (x - x0 + pad) / (x1 - x0 + 2 * pad) * W

    def sy(y):
        return W - (y - y0 + pad) / (y1 - y0 + 2 * pad) * W

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(W)}" height="{int(W)}" '
        f'viewBox="0 0 {int(W)} {int(W)}">',
        f'<rect x="0" y="0" width="{int(W)}" height="{int(W)}" fill="#ffffff"/>',
        f'<line x1="{_fmt(sx(x0))}" y1="{_fmt(sy(slope * x0 + intercept))}" '
        f'x2="{_fmt(sx(x1))}" y2="{_fmt(sy(slope * x1 + intercept))}" '
        f'stroke="#c04040" stroke-width="2"/>',
    ]
    for x, y, s in zip(xs, ys, sizes):
        parts.append(
            f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="5" fill="#3050a0"/>'
        )
        parts.append(
            f'<text x="{_fmt(sx(x) + 8)}" y="{_fmt(sy(y) - 8)}" font-size="14" '
            f'fill="#303030">n={s}</text>'
        )
    note = f"slope {slope:.3f}"
    if label:
        note = f"{label}: {note}"
    parts.append(f'<text x="20" y="30" font-size="18" fill="#303030">{note}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
