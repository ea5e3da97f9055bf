"""SVG output: lamination disk diagrams and turtle-traced tilings.

Everything here is deterministic: coordinates are printed with six decimals
and elements are emitted in a fixed order, so equal inputs give equal bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .angle import format_angle
from .relations import _passage_step
from . import kernels

SVG_HEADER = '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


class GeometryError(ValueError):
    """Edge vectors that cannot describe a closed 0-tile."""


def _num(x: float) -> str:
    text = f"{x:.6f}"
    return "0.000000" if text == "-0.000000" else text


def _svg_open(width: float, height: float, view: Sequence[float]) -> list[str]:
    return [
        SVG_HEADER.rstrip("\n"),
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_num(width)}" height="{_num(height)}" viewBox="{" ".join(_num(v) for v in view)}">',
    ]


# -- disk diagrams ---------------------------------------------------------------


@dataclass(frozen=True)
class DiskStyle:
    radius: float = 200.0
    margin: float = 20.0
    leaf: str = "polygon"  # or "chord"
    show_black: bool = True
    shade_gaps: bool = False
    white_fill: str = "#d9d9d9"
    stroke: str = "#000000"
    black_stroke: str = "#404040"
    tick: float = 6.0
    bump: float = 0.6  # height of the outermost black leaf, as a fraction of the radius

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.leaf not in ("polygon", "chord"):
            raise ValueError(f"leaf must be 'polygon' or 'chord', got {self.leaf!r}")


def _point(turns: float, radius: float, center: float) -> tuple[float, float]:
    theta = 2 * math.pi * turns
    return center + radius * math.cos(theta), center - radius * math.sin(theta)


def _outer_arc(a: float, b: float, style: DiskStyle, center: float, reference: float) -> list[tuple[float, float]]:
    """A bump outside the circle between a and b, over the side away from ``reference``."""
    length = (b - a) % 1
    if (reference - a) % 1 < length:
        a, length = b, 1 - length
    height = style.radius * style.bump * length ** 1.5
    samples = max(8, int(96 * length))
    pts = []
    for s in range(samples + 1):
        u = s / samples
        r = style.radius + height * math.sin(math.pi * u)
        pts.append(_point(a + u * length, r, center))
    return pts


def render_lamination(tower, n: int, colors: Sequence[str] = ("white", "black"), style: Optional[DiskStyle] = None) -> str:
    """Circle with the level-n angles ticked; white leaves inside, black ones outside."""
    style = style or DiskStyle()
    extent = style.radius * (1 + style.bump) + style.margin
    center = extent
    size = 2 * extent
    out = _svg_open(size, size, (0, 0, size, size))
    angles = tower.angles(n)
    turns = [float(a) for a in angles.angles()]
    names = [format_angle(a) for a in angles.angles()]
    out.append(
        f'<circle class="disk" cx="{_num(center)}" cy="{_num(center)}" r="{_num(style.radius)}" '
        f'fill="none" stroke="{style.stroke}" stroke-width="1"/>'
    )
    if style.shade_gaps and "white" in colors:
        gaps = tower.gaps("white", n)
        for g in range(gaps.count):
            corners = gaps.corners(g, len(angles))
            pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in (_point(turns[c], style.radius, center) for c in corners))
            fill = PALETTE[g % len(PALETTE)]
            out.append(f'<polygon class="gap white" data-gap="{g}" points="{pts}" fill="{fill}" fill-opacity="0.25" stroke="none"/>')
    for i, t in enumerate(turns):
        x0, y0 = _point(t, style.radius, center)
        x1, y1 = _point(t, style.radius + style.tick, center)
        out.append(
            f'<line class="tick" data-angle="{names[i]}" x1="{_num(x0)}" y1="{_num(y0)}" '
            f'x2="{_num(x1)}" y2="{_num(y1)}" stroke="{style.stroke}" stroke-width="1"/>'
        )
    reference = _reference_turn(angles)
    for color in colors:
        rel = tower.relation(color, n)
        for members in rel.classes():
            if len(members) < 2:
                continue
            members = members.tolist()
            label = " ".join(names[i] for i in members)
            if color == "white":
                pts = [_point(turns[i], style.radius, center) for i in members]
                text = " ".join(f"{_num(x)},{_num(y)}" for x, y in pts)
                if style.leaf == "polygon" and len(members) > 2:
                    out.append(
                        f'<polygon class="leaf white" data-angles="{label}" points="{text}" '
                        f'fill="{style.white_fill}" stroke="{style.stroke}" stroke-width="1"/>'
                    )
                else:
                    out.append(
                        f'<polyline class="leaf white" data-angles="{label}" points="{text}'
                        + (f' {_num(pts[0][0])},{_num(pts[0][1])}' if len(members) > 2 else "")
                        + f'" fill="none" stroke="{style.stroke}" stroke-width="1"/>'
                    )
            elif style.show_black:
                parts = []
                pairs = list(zip(members, members[1:] + members[:1])) if len(members) > 2 else [tuple(members)]
                for a, b in pairs:
                    pts = _outer_arc(turns[a], turns[b], style, center, reference)
                    parts.append("M " + " L ".join(f"{_num(x)} {_num(y)}" for x, y in pts))
                out.append(
                    f'<path class="leaf black" data-angles="{label}" d="{" ".join(parts)}" '
                    f'fill="none" stroke="{style.black_stroke}" stroke-width="1"/>'
                )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _reference_turn(angles) -> float:
    """A point of the circle that is not an angle: the middle of the arc through 0."""
    values = angles.values
    den = angles.denominator
    if len(values) == 0:
        return 0.0
    return ((int(values[-1]) + int(values[0]) + den) / 2 / den) % 1


# -- flat tile geometry and the turtle -------------------------------------------


@dataclass(frozen=True)
class Geometry:
    """Edge vectors of the white 0-tile, one per arc type, and the per-level shrink."""

    edges: tuple[tuple[float, float], ...]
    scale: float
    angle_rule: str = "corner"  # or "equiangular"
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.scale <= 1:
            raise GeometryError(f"scale must exceed 1, got {self.scale}")
        if self.angle_rule not in ("corner", "equiangular"):
            raise GeometryError(f"unknown angle rule {self.angle_rule!r}")
        gap = math.hypot(sum(x for x, _ in self.edges), sum(y for _, y in self.edges))
        if gap > self.tolerance:
            raise GeometryError(f"edge vectors do not close up (off by {gap:.3g})")
        if any(math.hypot(x, y) == 0 for x, y in self.edges):
            raise GeometryError("zero-length edge vector")

    @classmethod
    def from_config(cls, data: Optional[dict], degree: int, k: int) -> "Geometry":
        """Read the optional ``geometry`` block of a portrait; a regular k-gon by default."""
        data = dict(data or {})
        unknown = set(data) - {"edges", "scale", "angle_rule"}
        if unknown:
            raise GeometryError(f"unknown geometry fields: {', '.join(sorted(unknown))}")
        if "edges" in data:
            edges = tuple((float(x), float(y)) for x, y in data["edges"])
        else:
            edges = tuple((math.cos(2 * math.pi * j / k), math.sin(2 * math.pi * j / k)) for j in range(k))
        if len(edges) != k:
            raise GeometryError(f"expected {k} edge vectors, got {len(edges)}")
        scale = float(data.get("scale", math.sqrt(degree)))
        return cls(edges, scale, data.get("angle_rule", "corner"))

    def lengths(self) -> list[float]:
        return [math.hypot(x, y) for x, y in self.edges]

    def corner_angles(self) -> list[float]:
        """Interior angle of the 0-tile at the corner where edge b-1 meets edge b."""
        out = []
        k = len(self.edges)
        for b in range(k):
            px, py = self.edges[b - 1]
            qx, qy = self.edges[b]
            turn = math.atan2(px * qy - py * qx, px * qx + py * qy)
            out.append(math.pi - turn)
        return out


@dataclass(frozen=True)
class TurtleTrace:
    level: int
    points: tuple[tuple[float, float], ...]
    closure_error: float
    arc_starts: tuple[Fraction, ...] = field(repr=False, default=())


def incidence_positions(tower, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For every angle x: its position t in the passage cycle of its vertex, the cycle length,
    and the cycle successor (the next passage)."""
    step = _passage_step(tower, n)
    cycles = kernels.cycle_ids(step)
    size = len(step)
    position = np.full(size, -1, dtype=np.int64)
    lengths = np.bincount(cycles)
    # walk each cycle from its least member, which cycle_ids visits first
    _, first = np.unique(cycles, return_index=True)
    for start in first.tolist():
        x, t = start, 0
        while position[x] < 0:
            position[x] = t
            x = int(step[x])
            t += 1
    return position, lengths[cycles], step


def turtle_trace(tower, n: int, geometry: Geometry) -> TurtleTrace:
    """Walk the level-n arcs in circle order, turning at each vertex by its tile corners."""
    angles = tower.angles(n)
    types = angles.arc_types.tolist()
    size = len(types)
    white = tower.relation("white", n)
    position, cycle_len, step = incidence_positions(tower, n)
    corner = geometry.corner_angles()
    lengths = geometry.lengths()
    shrink = geometry.scale ** (-n)

    def sector_angle(x: int) -> float:
        """Angle of the tile corner where the arc starting at x leaves its vertex."""
        if geometry.angle_rule == "equiangular":
            return 2 * math.pi / (2 * int(cycle_len[x]))
        return corner[types[x]]

    ex, ey = geometry.edges[types[0]]
    heading = math.atan2(ey, ex)
    x_pos, y_pos = 0.0, 0.0
    points = [(x_pos, y_pos)]
    for i in range(size):
        if i > 0:
            heading += math.pi - _left_angle(i, white.pred, position, cycle_len, step, types, sector_angle)
        step_len = lengths[types[i]] * shrink
        x_pos += step_len * math.cos(heading)
        y_pos += step_len * math.sin(heading)
        points.append((x_pos, y_pos))
    error = math.hypot(points[-1][0] - points[0][0], points[-1][1] - points[0][1])
    return TurtleTrace(n, tuple(points), error, tuple(angles.angles()))


def _left_angle(alpha, pred_white, position, cycle_len, step, types, sector_angle) -> float:
    """Sum of the sector angles from the outgoing white sector round to the incoming one."""
    m = int(cycle_len[alpha])
    incoming = 2 * int(position[int(pred_white[alpha])])
    passages = _cycle_from(alpha, step, m, int(position[alpha]))
    total = 0.0
    idx = 2 * int(position[alpha])
    while True:
        t, odd = divmod(idx, 2)
        # white sector 2t sits at the start of x_t's arc, black sector 2t+1 at x_{t+1}'s
        total += sector_angle(passages[(t + odd) % m])
        if idx == incoming:
            return total
        idx = (idx + 1) % (2 * m)


def _cycle_from(alpha, step, m, t_alpha) -> list[int]:
    """Passages x_0..x_{m-1} of the vertex of alpha, given alpha = x_{t_alpha}."""
    seq = [0] * m
    x = alpha
    for s in range(m):
        seq[(t_alpha + s) % m] = x
        x = int(step[x])
    return seq


def render_tiling(trace: TurtleTrace, degree: int, coarse: int = 1, stroke_width: float = 0.0, size: float = 600.0) -> str:
    """Draw the trace, colouring each arc by the interval [j/d^c, (j+1)/d^c) holding its start."""
    xs = [p[0] for p in trace.points]
    ys = [p[1] for p in trace.points]
    lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y) or 1.0
    pad = 0.02 * span
    scale = size / (span + 2 * pad)
    width = (hi_x - lo_x + 2 * pad) * scale
    height = (hi_y - lo_y + 2 * pad) * scale
    stroke_width = stroke_width or max(0.5, 0.15 * scale * span / max(1, math.sqrt(len(trace.points))))

    def tx(p):
        return (p[0] - lo_x + pad) * scale, (hi_y - p[1] + pad) * scale

    buckets = degree ** coarse
    out = _svg_open(width, height, (0, 0, width, height))
    runs: list[tuple[int, list[int]]] = []
    for i, start in enumerate(trace.arc_starts):
        bucket = int(start * buckets) % buckets
        if runs and runs[-1][0] == bucket:
            runs[-1][1].append(i + 1)
        else:
            runs.append((bucket, [i, i + 1]))
    for bucket, idx in runs:
        pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in (tx(trace.points[j]) for j in idx))
        out.append(
            f'<polyline class="tile" data-interval="{bucket}" points="{pts}" fill="none" '
            f'stroke="{PALETTE[bucket % len(PALETTE)]}" stroke-width="{_num(stroke_width)}" '
            'stroke-linejoin="round" stroke-linecap="round"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
