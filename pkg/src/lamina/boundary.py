"""Nested gap chains around an angle and the boundary relation they induce.

The gap of level n+1 holding an angle s is the image of a level-1 gap under
the branch of mu^-n that carries the circle onto the level-n gap holding s:
an arc [a, b] of that level-1 gap, lying in 0-arc j, goes to
``start_j + (a - z_j) / d**n``.  So the chain can be followed to any depth
with exact fractions and without building the tower that far.

For a rational s the choices made at each step depend only on mu^n(s), which
is eventually periodic; over one block of periods every corner moves by a
geometric series, whose sum gives the corner limits exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .angle import Angle, as_angle, format_angle, mu, orbit
from .lamination import PERIODIC_FATOU, PREPERIODIC_FATOU

SIDES = ("left", "right")
DEFAULT_MAX_LEVELS = 256


class GapLifter:
    """Level-1 gap data of one colour, ready to be pulled back into deeper gaps."""

    def __init__(self, tower, color: str):
        self.d = tower.d
        self.k = tower.k
        self.zero = list(tower.zero.zero_angles)
        self.level1 = tower.angles(1)
        gaps = tower.gaps(color, 1)
        self.gap_of_arc = gaps.gap_of_arc.tolist()
        self.pieces = []  # per 1-gap: (0-arc holding it, offset inside that 0-arc) per type
        for g in range(gaps.count):
            row = []
            for i in gaps.arcs[g].tolist():
                j = int(self.level1.parent_arc[i])
                row.append((j, (self.level1.angle(i) - self.zero[j]) % 1))
            self.pieces.append(row)

    def first_gap(self, x: Angle, side: str) -> int:
        """Level-1 gap holding x, on the given side when x is a level-1 angle."""
        arc = self.level1.locate(x)
        if side == "left" and self.level1.index_of(x) is not None:
            arc = (arc - 1) % len(self.level1)
        return self.gap_of_arc[arc]

    def chain(self, s: Angle, side: str, levels: int):
        """Arc starts of the gaps holding s at levels 0..levels, and the parent type of each arc."""
        starts = [list(self.zero)]
        parents = []
        x = s
        for n in range(levels):
            g = self.first_gap(x, side)
            scale = Fraction(1, self.d ** n)
            prev = starts[-1]
            starts.append([prev[j] + off * scale for j, off in self.pieces[g]])
            parents.append([j for j, _ in self.pieces[g]])
            x = mu(x, self.d)
        return starts, parents


@dataclass(frozen=True)
class GapItinerary:
    angle: Angle
    color: str
    side: str
    chain: tuple[int, ...]  # tower gap ids at levels 1..m
    periodicity: Optional[tuple[int, int]]
    lifter: GapLifter = field(compare=False, repr=False)

    @property
    def depth(self) -> int:
        return len(self.chain)


@dataclass(frozen=True)
class BigGClass:
    angles: tuple[Angle, ...]
    exact: bool

    def __len__(self) -> int:
        return len(self.angles)

    def line(self) -> str:
        flag = "exact" if self.exact else "inexact"
        return " ".join(format_angle(a) for a in self.angles) + f" [{flag}]"


def in_some_level(s: Angle, tower, m: int) -> Optional[int]:
    """Least j <= m with s a level-j angle, else None."""
    for j in range(m + 1):
        if tower.angles(j).index_of(s) is not None:
            return j
    return None


def gap_itinerary(s, tower, m: int, color: str = "white", max_levels: int = DEFAULT_MAX_LEVELS) -> list[GapItinerary]:
    """The nested gaps holding s at levels 1..m; two chains when s is an angle by level m."""
    s = as_angle(s)
    if m < 0:
        raise ValueError("depth must be non-negative")
    tower.check_budget(m)
    lifter = GapLifter(tower, color)
    dec = orbit(s, tower.d)
    pre = len(dec.preperiod)
    cert = (pre, dec.period) if pre + dec.period <= max_levels else None
    j = in_some_level(s, tower, m)
    sides = SIDES if j is not None else ("right",)
    out = []
    for side in sides:
        ids = []
        for n in range(1, m + 1):
            angles = tower.angles(n)
            arc = angles.locate(s)
            if side == "left" and angles.index_of(s) is not None:
                arc = (arc - 1) % len(angles)
            ids.append(int(tower.gaps(color, n).gap_of_arc[arc]))
        out.append(GapItinerary(s, color, side, tuple(ids), cert, lifter))
    return out


def corner_limits(itinerary: GapItinerary, check: bool = True) -> Optional[list[Angle]]:
    """Exact limits of the k corner sequences, or None without a usable certificate."""
    if itinerary.periodicity is None:
        return None
    lifter = itinerary.lifter
    d, k = lifter.d, lifter.k
    pre, period = itinerary.periodicity
    # compose the parent maps over one period to learn the cycle lengths
    _, parents = lifter.chain(itinerary.angle, itinerary.side, pre + period)
    composite = _compose(parents[pre:pre + period], k)
    cycle_lcm = 1
    for t in range(k):
        cycle_lcm = math.lcm(cycle_lcm, _cycle_length(composite, t) or 1)
    block = period * cycle_lcm
    levels = pre + (3 if check else 2) * block
    starts, parents = lifter.chain(itinerary.angle, itinerary.side, levels)
    composite = _compose(parents[pre:pre + block], k)

    def limits_from(m: int) -> list[Optional[Angle]]:
        scale = d ** block
        out: list[Optional[Angle]] = []
        for t in range(k):
            if composite[t] != t:
                out.append(None)
                continue
            out.append(((scale * starts[m + block][t] - starts[m][t]) / (scale - 1)) % 1)
        return out

    first = limits_from(pre)
    if check and limits_from(pre + block) != first:
        return None
    # a type off every cycle shrinks onto the limit of the cycle it falls into
    result = set()
    for t in range(k):
        u = t
        for _ in range(k):
            u = composite[u]
        result.add(first[u])
    return sorted(result)


def _compose(maps, k: int) -> list[int]:
    """Type at the top of the block each type at the bottom descends from."""
    out = list(range(k))
    for level_map in maps:
        out = [out[j] for j in level_map]
    return out


def _cycle_length(step: list[int], t: int) -> Optional[int]:
    u = t
    for length in range(1, len(step) + 1):
        u = step[u]
        if u == t:
            return length
    return None


def deepest_corners(itinerary: GapItinerary, levels: Optional[int] = None) -> list[Angle]:
    """Corner angles of the deepest gap in the chain (start and end of every arc)."""
    lifter = itinerary.lifter
    levels = itinerary.depth if levels is None else levels
    starts, _ = lifter.chain(itinerary.angle, itinerary.side, levels)
    d = lifter.d
    scale = Fraction(1, d ** levels)
    out = set()
    for t, start in enumerate(starts[-1]):
        out.add(start % 1)
        out.add((start + lifter_length(lifter, t) * scale) % 1)
    return sorted(out)


def lifter_length(lifter: GapLifter, t: int) -> Fraction:
    z = lifter.zero
    return (z[(t + 1) % len(z)] - z[t]) % 1 or Fraction(1)


def big_g_class(itinerary: GapItinerary) -> BigGClass:
    limits = corner_limits(itinerary)
    if limits is not None:
        return BigGClass(tuple(limits), True)
    return BigGClass(tuple(deepest_corners(itinerary)), False)


# -- the relation generated by the chains ------------------------------------


@dataclass(frozen=True)
class BoundaryClass:
    angles: tuple[Angle, ...]
    exact: bool
    steps: int  # chain links used to close the class

    def line(self) -> str:
        flag = "exact" if self.exact else "inexact"
        return " ".join(format_angle(a) for a in self.angles) + f" [{flag}]"

    def on_level(self, tower, n: int) -> list[Angle]:
        level = tower.angles(n)
        return [a for a in self.angles if level.index_of(a) is not None]


def size_bound(tower) -> int:
    return (tower.k - 1) * 2 ** (tower.d - 1)


def approx_class(s, tower, depth: int, color: str = "white") -> BoundaryClass:
    """Close {s} under sharing a nested-chain limit set, with at most 2^(d-1) links."""
    s = as_angle(s)
    cap = 2 ** (tower.d - 1)
    found = {s}
    frontier = [s]
    exact = True
    steps = 0
    seen_chain = set()
    while frontier and steps < cap:
        steps += 1
        nxt = []
        for a in frontier:
            for it in gap_itinerary(a, tower, depth, color):
                key = (it.angle, it.side)
                if key in seen_chain:
                    continue
                seen_chain.add(key)
                cls = big_g_class(it)
                exact &= cls.exact
                for b in cls.angles:
                    if b not in found:
                        found.add(b)
                        nxt.append(b)
        frontier = nxt
    if frontier:
        exact = False
    return BoundaryClass(tuple(sorted(found)), exact, steps)


def fatou_class(s, tower, depth: int, color: str = "white") -> BoundaryClass:
    """approx_class, widened by every depth-level gap touching a Fatou-type class it meets."""
    base = approx_class(s, tower, depth, color)
    rel = tower.relation(color, depth)
    types = tower.dyn_types(color, depth)
    level = tower.angles(depth)
    fatou_labels = set()
    for a in base.angles:
        i = level.index_of(a)
        if i is not None and types[rel.labels[i]] in (PERIODIC_FATOU, PREPERIODIC_FATOU):
            fatou_labels.add(int(rel.labels[i]))
    if not fatou_labels:
        return base
    gaps = tower.gaps(color, depth)
    size = len(level)
    found = set(base.angles)
    for g in range(gaps.count):
        corners = gaps.corners(g, size)
        if any(int(rel.labels[c]) in fatou_labels for c in corners):
            found.update(level.angle(c) for c in corners)
    return BoundaryClass(tuple(sorted(found)), False, base.steps)
