"""The level-n circuit: every n-arc tagged with its type, vertices and gaps.

Arcs are kept in circle order; arc i runs from angle i to angle i+1.  The
edge an arc stands for is named by (white gap, type).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .angle import format_angle
from .relations import vertex_labels


@dataclass(eq=False)
class Circuit:
    level: int
    types: np.ndarray
    vstart: np.ndarray
    vend: np.ndarray
    wgap: np.ndarray
    bgap: np.ndarray
    corners: np.ndarray  # corners[g, j]: vertex shared by the type-j and type-(j+1) arcs of white gap g

    def __len__(self) -> int:
        return len(self.types)

    def type_counts(self) -> np.ndarray:
        return np.bincount(self.types, minlength=self.corners.shape[1])

    def edge_ids(self) -> np.ndarray:
        """Edge number wgap * k + type of every arc."""
        return self.wgap * self.corners.shape[1] + self.types

    def problems(self) -> list[str]:
        out = []
        size = len(self)
        k = self.corners.shape[1]
        d_n = size // k
        counts = self.type_counts()
        if not (counts == d_n).all():
            out.append(f"arcs per type {counts.tolist()}, expected {d_n} each")
        if not np.array_equal(self.vend, np.roll(self.vstart, -1)):
            out.append("consecutive arcs do not share a vertex")
        if len(np.unique(self.edge_ids())) != size:
            out.append("two arcs stand for the same (white gap, type) edge")
        return out


def circuit(tower, n: int) -> Circuit:
    angles = tower.angles(n)
    size = len(angles)
    vert = vertex_labels(tower, n)
    white = tower.gaps("white", n)
    black = tower.gaps("black", n)
    vstart = vert
    vend = np.roll(vert, -1)
    # arc of type j ends where the type-(j+1) arc of the same gap starts, up to the white relation
    corners = vend[white.arcs]
    following = vstart[np.roll(white.arcs, -1, axis=1)]
    if not np.array_equal(corners, following):
        g, j = map(int, np.argwhere(corners != following)[0])
        raise ValueError(f"level {n}: white gap {g} does not close up at its type-{j} corner")
    return Circuit(n, angles.arc_types.copy(), vstart, vend, white.gap_of_arc, black.gap_of_arc, corners)


def dump_circuit(tower, n: int) -> list[str]:
    circ = circuit(tower, n)
    angles = tower.angles(n)
    size = len(circ)
    lines = []
    for i in range(size):
        start = format_angle(angles.angle(i))
        end = format_angle(angles.angle((i + 1) % size))
        lines.append(
            f"{i} [{start},{end}] type={circ.types[i]} wgap={circ.wgap[i]} "
            f"bgap={circ.bgap[i]} vstart={circ.vstart[i]} vend={circ.vend[i]}"
        )
    return lines


@dataclass(frozen=True)
class SemiconjugacyReport:
    level: int
    arc_failures: tuple[int, ...]  # level-(n+1) arcs not mapped onto one n-arc of their type
    vertex_failures: tuple[tuple[int, int], ...]  # equivalent (n+1)-angles with inequivalent images

    @property
    def ok(self) -> bool:
        return not self.arc_failures and not self.vertex_failures


def check_semiconjugacy(tower, n: int, limit: int = 20) -> SemiconjugacyReport:
    """Does mu carry the level-(n+1) circuit onto the level-n one?"""
    up, here = tower.angles(n + 1), tower.angles(n)
    image = tower.image_index(n + 1)
    size = len(here)
    nxt = np.roll(image, -1)
    onto = (nxt == (image + 1) % size) & (up.arc_types == here.arc_types[image])
    arc_failures = tuple(int(i) for i in np.nonzero(~onto)[0][:limit])

    vert_up = vertex_labels(tower, n + 1)
    vert_here = vertex_labels(tower, n)
    pushed = vert_here[image]
    _, first = np.unique(vert_up, return_index=True)
    expected = pushed[first][vert_up]
    bad = np.nonzero(pushed != expected)[0][:limit]
    vertex_failures = tuple((int(first[vert_up[i]]), int(i)) for i in bad)
    return SemiconjugacyReport(n, arc_failures, vertex_failures)


def arc_lengths(tower, n: int) -> np.ndarray:
    """Exact lengths of the n-arcs in units of 1/denominator."""
    values = tower.angles(n).values
    den = tower.angles(n).denominator
    return (np.roll(values, -1) - values) % den if len(values) > 1 else np.array([den], dtype=np.int64)


def gap_boundary_measure(tower, color: str, n: int, g: int) -> Fraction:
    """Total length of the circle arcs bounding gap g."""
    lengths = arc_lengths(tower, n)
    arcs = tower.gaps(color, n).arcs[g]
    return Fraction(int(lengths[arcs].sum()), tower.angles(n).denominator)


def gap_measures(tower, color: str, n: int) -> list[Fraction]:
    gaps = tower.gaps(color, n)
    lengths = arc_lengths(tower, n)
    totals = lengths[gaps.arcs].sum(axis=1)
    den = tower.angles(n).denominator
    return [Fraction(int(t), den) for t in totals]


def type_length(tower, n: int, arc_type: int) -> Fraction:
    """Length an n-arc of the given type must have: its 0-arc length over d^n."""
    return tower.zero.arc_lengths[arc_type] / tower.d ** n


@dataclass(frozen=True)
class MeasureReport:
    level: int
    expected: Fraction
    gap_measures: dict  # colour -> tuple of Fractions, by gap id
    fibers: tuple[tuple[int, int, int, int], ...]  # (image vertex, |image|, preimage classes, preimage angles)
    degree: int

    @property
    def measures_ok(self) -> bool:
        return all(m == self.expected for ms in self.gap_measures.values() for m in ms)

    @property
    def fibers_ok(self) -> bool:
        return all(total == self.degree * size for _, size, _, total in self.fibers)

    @property
    def ok(self) -> bool:
        return self.measures_ok and self.fibers_ok


def entropy_measure_report(tower, n: int) -> MeasureReport:
    measures = {color: tuple(gap_measures(tower, color, n)) for color in ("white", "black")}
    fibers = []
    if n > 0:
        vert_here = vertex_labels(tower, n)
        vert_below = vertex_labels(tower, n - 1)
        image = tower.image_index(n)
        below_sizes = np.bincount(vert_below)
        target = vert_below[image]
        _, first = np.unique(vert_here, return_index=True)
        class_target = target[first]
        class_counts = np.bincount(class_target, minlength=len(below_sizes))
        angle_counts = np.bincount(target, minlength=len(below_sizes))
        fibers = [
            (w, int(below_sizes[w]), int(class_counts[w]), int(angle_counts[w]))
            for w in range(len(below_sizes))
        ]
    return MeasureReport(n, Fraction(1, tower.d ** n), measures, tuple(fibers), tower.d)
