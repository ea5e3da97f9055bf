"""The level tower: angle sets, white/black relations and their gaps.

Level-n angles are stored as sorted integers over the common denominator
``Q * d**n`` where Q is the least common denominator of the zero angles.
Everything the tower computes is index arithmetic on those arrays; angles
become Fractions only at the edges (dumps, queries, tests).

A level-(n+1) relation is obtained by lifting every succeeding pair of the
level-1 relation into every level-n gap and closing under union-find.  Gaps
are found by walking the arcs: after the arc ending at angle x comes the arc
starting at the class predecessor of x.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import kernels
from .angle import Angle, format_angle, preimages
from .portrait import PortraitPair, ZeroData

COLORS = ("white", "black")
DEFAULT_MAX_ANGLES = 10**7
BUDGET_ENV = "LAMINA_MAX_ANGLES"

JULIA = "Julia"
PERIODIC_FATOU = "PeriodicFatou"
PREPERIODIC_FATOU = "PreperiodicFatou"


class LaminationError(RuntimeError):
    """The construction broke down, which means the portrait is not valid."""


class BudgetExceeded(LaminationError):
    pass


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_MAX_ANGLES


def _int_array(values, denominator: int) -> np.ndarray:
    dtype = np.int64 if denominator < 2**62 else object
    return np.array(values, dtype=dtype)


def angles_at_level(zero: ZeroData, d: int, n: int) -> list[Angle]:
    """The sorted set of n-fold preimages of the zero angles (reference version)."""
    level = set(zero.zero_angles)
    for _ in range(n):
        level = {x for a in level for x in preimages(a, d)}
    return sorted(level)


@dataclass(eq=False)
class LevelAngles:
    """The sorted level-n angles, their arc types and links to level n-1."""

    level: int
    values: np.ndarray
    denominator: int
    arc_types: np.ndarray
    embed: Optional[np.ndarray] = None  # index here of each level-(n-1) angle
    parent_arc: Optional[np.ndarray] = None  # level-(n-1) arc holding each arc here

    def __len__(self) -> int:
        return len(self.values)

    def angle(self, i: int) -> Angle:
        return Fraction(int(self.values[i]), self.denominator)

    def angles(self) -> list[Angle]:
        den = self.denominator
        return [Fraction(int(v), den) for v in self.values]

    def index_of(self, a: Angle) -> Optional[int]:
        if self.denominator % a.denominator:
            return None
        v = a.numerator * (self.denominator // a.denominator)
        i = int(np.searchsorted(self.values, v))
        return i if i < len(self.values) and self.values[i] == v else None

    def locate(self, a: Angle) -> int:
        """Index of the arc containing ``a``; for an angle, the arc starting there."""
        floor = a.numerator * self.denominator // a.denominator
        i = int(np.searchsorted(self.values, floor, side="right")) - 1
        return i % len(self.values)


@dataclass(eq=False)
class LevelRelation:
    level: int
    color: str
    labels: np.ndarray
    succ: np.ndarray
    pred: np.ndarray

    @property
    def count(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.count)

    def first_members(self) -> np.ndarray:
        """Least angle index of each class (labels are numbered by it)."""
        _, first = np.unique(self.labels, return_index=True)
        return first

    def classes(self) -> list[np.ndarray]:
        order = np.argsort(self.labels, kind="stable")
        bounds = np.cumsum(self.sizes)[:-1]
        return np.split(order, bounds)


@dataclass(eq=False)
class GapSet:
    level: int
    color: str
    gap_of_arc: np.ndarray
    arcs: np.ndarray  # arcs[g, j] is the arc of type j bounding gap g
    next_arc: np.ndarray  # the arc following each arc around its gap
    parent: Optional[np.ndarray]
    parents_consistent: bool

    @property
    def count(self) -> int:
        return len(self.arcs)

    @property
    def orientation(self) -> str:
        """How arc types run around a gap as seen from its own hemisphere.

        The arrays always list arcs in increasing circle order; the black
        hemisphere sees the circle reversed, so there the order is clockwise.
        """
        return "counterclockwise" if self.color == "white" else "clockwise"

    def corners(self, g: int, size: int) -> list[int]:
        out = set()
        for i in self.arcs[g].tolist():
            out.add(i)
            out.add((i + 1) % size)
        return sorted(out)


class Tower:
    """Memoised levels of both relations for one portrait pair."""

    def __init__(self, pair: PortraitPair, max_angles: Optional[int] = None):
        self.pair = pair
        self.d = pair.degree
        self.zero = pair.zero
        self.k = pair.zero.k
        self.max_angles = default_budget() if max_angles is None else max_angles
        self._angles: list[LevelAngles] = []
        self._relations: dict[tuple[str, int], LevelRelation] = {}
        self._gaps: dict[tuple[str, int], GapSet] = {}
        self._images: dict[int, np.ndarray] = {}
        self._setup_base()

    # -- level-1 lifting tables --------------------------------------------

    def _setup_base(self):
        d, k = self.d, self.k
        q0 = self.zero.denominator
        zeros = [int(a * q0) for a in self.zero.zero_angles]
        level0 = LevelAngles(0, _int_array(zeros, q0), q0, np.arange(k, dtype=np.int64))
        self._angles.append(level0)

        n1 = q0 * d
        base = sorted((z + j * q0) for z in zeros for j in range(d))
        self.base_values = base
        size = len(base)
        index = {v: i for i, v in enumerate(base)}
        self.base_positions = [index[z * d] for z in zeros]
        pos = self.base_positions
        counts = [((pos[(j + 1) % k] - pos[j] - 1) % size) + 1 for j in range(k)]
        self.base_counts = np.array(counts, dtype=np.int64)
        zero_index = {z: j for j, z in enumerate(zeros)}
        self.base_arc_types = np.array([zero_index[v % q0] for v in base], dtype=np.int64)
        # offsets of each level-1 point inside the 0-arc it opens / closes
        st, so, et, eo = (np.zeros(size, dtype=np.int64) for _ in range(4))
        for q in range(size):
            for j in range(k):
                if (q - pos[j]) % size < counts[j]:
                    st[q], so[q] = j, (q - pos[j]) % size
                if (q - pos[j] - 1) % size < counts[j]:
                    et[q], eo[q] = j, ((q - pos[j] - 1) % size) + 1
        self.lift_tables = (st, so, et, eo)
        self.base_offsets = [
            [(base[(pos[j] + t) % size] - zeros[j] * d) % n1 for t in range(counts[j])]
            for j in range(k)
        ]
        self.base_successors = {}
        for color in COLORS:
            succ = np.arange(size, dtype=np.int64)
            for cls in self.pair.portrait(color).classes:
                idx = [index[int(a * n1)] for a in cls]
                for a, b in zip(idx, idx[1:] + idx[:1]):
                    succ[a] = b
            self.base_successors[color] = succ

    # -- angles --------------------------------------------------------------

    def size_at(self, n: int) -> int:
        return self.k * self.d**n

    def check_budget(self, n: int):
        if self.size_at(n) > self.max_angles:
            raise BudgetExceeded(
                f"level {n} needs {self.size_at(n)} angles per colour, budget is {self.max_angles}"
                f" (set {BUDGET_ENV} to raise it)"
            )

    def angles(self, n: int) -> LevelAngles:
        self.check_budget(n)
        while len(self._angles) <= n:
            self._angles.append(self._next_angles(self._angles[-1]))
        return self._angles[n]

    def _next_angles(self, prev: LevelAngles) -> LevelAngles:
        d = self.d
        den = prev.denominator * d
        counts = self.base_counts[prev.arc_types]
        embed = np.concatenate(([0], np.cumsum(counts)[:-1])).astype(np.int64)
        size = int(counts.sum())
        values = np.empty(size, dtype=prev.values.dtype)
        types = np.empty(size, dtype=np.int64)
        pos = self.base_positions
        base_size = len(self.base_values)
        for j in range(self.k):
            arcs = np.nonzero(prev.arc_types == j)[0]
            starts = prev.values[arcs] * d
            for t, off in enumerate(self.base_offsets[j]):
                values[embed[arcs] + t] = starts + off
                types[embed[arcs] + t] = self.base_arc_types[(pos[j] + t) % base_size]
        values %= den
        parent_arc = np.repeat(np.arange(len(prev), dtype=np.int64), counts)
        shift = int(np.argmin(values))
        if shift:
            values = np.roll(values, -shift)
            types = np.roll(types, -shift)
            parent_arc = np.roll(parent_arc, -shift)
            embed = (embed - shift) % size
        return LevelAngles(prev.level + 1, values, den, types, embed, parent_arc)

    def image_index(self, n: int) -> np.ndarray:
        """Index at level n-1 of the image under mu of every level-n angle."""
        if n not in self._images:
            here, below = self.angles(n), self.angles(n - 1)
            image = np.searchsorted(below.values, here.values % below.denominator)
            self._images[n] = image.astype(np.int64)
        return self._images[n]

    def embedding(self, m: int, n: int) -> np.ndarray:
        """Index at level n of every level-m angle (m <= n)."""
        idx = np.arange(len(self.angles(m)), dtype=np.int64)
        for level in range(m + 1, n + 1):
            idx = self.angles(level).embed[idx]
        return idx

    # -- relations and gaps ------------------------------------------------

    def relation(self, color: str, n: int) -> LevelRelation:
        key = (color, n)
        if key not in self._relations:
            self.check_budget(n)
            if color not in COLORS:
                raise ValueError(f"unknown colour {color!r}")
            if n == 0:
                labels = np.arange(self.k, dtype=np.int64)
            else:
                below = self.gaps(color, n - 1)
                here = self.angles(n)
                starts = here.embed[below.arcs]
                labels = kernels.pullback_labels(
                    len(here), starts, *self.lift_tables, self.base_successors[color]
                )
            succ, pred = kernels.class_links(labels)
            self._relations[key] = LevelRelation(n, color, labels, succ, pred)
        return self._relations[key]

    def gaps(self, color: str, n: int) -> GapSet:
        key = (color, n)
        if key not in self._gaps:
            self._gaps[key] = self._find_gaps(color, n)
        return self._gaps[key]

    def _find_gaps(self, color: str, n: int) -> GapSet:
        rel = self.relation(color, n)
        types = self.angles(n).arc_types
        size, k = len(types), self.k
        step = rel.pred[(np.arange(size) + 1) % size]
        gap_of_arc = kernels.cycle_ids(step)
        count = int(gap_of_arc.max()) + 1
        per_gap = np.bincount(gap_of_arc, minlength=count)
        if not (per_gap == k).all():
            g = int(np.nonzero(per_gap != k)[0][0])
            raise LaminationError(f"{color} level {n}: gap {g} has {per_gap[g]} arcs, expected {k}")
        bad = np.nonzero(types[step] != (types + 1) % k)[0]
        if len(bad):
            i = int(bad[0])
            raise LaminationError(
                f"{color} level {n}: arc {i} of type {types[i]} is followed by type {types[step[i]]}"
            )
        arcs = np.empty((count, k), dtype=np.int64)
        arcs[gap_of_arc, types] = np.arange(size)
        parent, consistent = None, True
        if n > 0:
            below = self.gaps(color, n - 1)
            parent_of_arc = below.gap_of_arc[self.angles(n).parent_arc]
            parent = parent_of_arc[arcs[:, 0]]
            consistent = bool((parent_of_arc == parent[gap_of_arc]).all())
        return GapSet(n, color, gap_of_arc, arcs, step, parent, consistent)

    # -- class metadata --------------------------------------------------

    def image_labels(self, color: str, n: int) -> np.ndarray:
        """Level-(n-1) class of the image of each level-n class."""
        rel = self.relation(color, n)
        below = self.relation(color, n - 1)
        return below.labels[self.image_index(n)[rel.first_members()]]

    def local_degrees(self, color: str, n: int) -> np.ndarray:
        """Size of the critical level-1 class each class contains, else 1."""
        rel = self.relation(color, n)
        deg = np.ones(rel.count, dtype=np.int64)
        if n == 0:
            return deg
        where = self.embedding(1, n)
        for cls in self.relation(color, 1).classes():
            if len(cls) > 1:
                deg[rel.labels[where[cls[0]]]] = len(cls)
        return deg

    def predicted_sizes(self, color: str, n: int) -> np.ndarray:
        """Product of local degrees along the image chain of each class."""
        deg = self.local_degrees(color, n)
        if n <= 1:
            return deg
        return deg * self.predicted_sizes(color, n - 1)[self.image_labels(color, n)]

    def base_types(self, color: str) -> np.ndarray:
        """Dynamical type of every level-1 class."""
        rel = self.relation(color, 1)
        sizes = rel.sizes
        zero_at_base = self.embedding(0, 1)
        image = self.image_index(1)
        # level-1 class of mu(class), as a level-1 class label
        first = rel.first_members()
        step = rel.labels[zero_at_base[image[first]]]
        critical = sizes > 1

        def forward(c):
            seen = []
            c = int(step[c])
            while c not in seen:
                seen.append(c)
                c = int(step[c])
            return seen

        periodic = {c for c in range(rel.count) if critical[c] and c in forward(c)}
        types = np.empty(rel.count, dtype=object)
        for c in range(rel.count):
            if c in periodic:
                types[c] = PERIODIC_FATOU
            elif periodic & set(forward(c)):
                types[c] = PREPERIODIC_FATOU
            else:
                types[c] = JULIA
        return types

    def dyn_types(self, color: str, n: int) -> np.ndarray:
        if n == 0:
            return self.base_types(color)[self.relation(color, 1).labels[self.embedding(0, 1)]]
        if n == 1:
            return self.base_types(color)
        return self.dyn_types(color, n - 1)[self.image_labels(color, n)]

    def orbit_depth(self, color: str, n: int, label: int) -> Optional[int]:
        """Steps after which the image chain of a class avoids critical classes.

        None when the chain returns to critical classes forever (Fatou type).
        """
        rel = self.relation(color, n)
        i = int(rel.first_members()[label])
        if n == 0:
            i = int(self.embedding(0, 1)[i])
        for level in range(n, 1, -1):
            i = int(self.image_index(level)[i])
        base = self.relation(color, 1)
        sizes = base.sizes
        to_base = self.embedding(0, 1)
        image = self.image_index(1)
        seen: list[int] = []
        while i not in seen:
            seen.append(i)
            i = int(to_base[image[i]])
        start = seen.index(i)
        critical = [sizes[base.labels[j]] > 1 for j in seen]
        if any(critical[start:]):
            return None
        hits = [step for step, c in enumerate(critical) if c]
        return hits[-1] + 1 if hits else 0


@dataclass(frozen=True)
class Stabilization:
    depth: Optional[int]  # None: not stabilised by the cap (Fatou type)
    observed: Optional[int]  # least m with constant sizes from n+m to the cap
    sizes: tuple[int, ...]  # class sizes at levels n..cap
    cap: int

    @property
    def consistent(self) -> bool:
        if self.depth is None:
            return all(a < b for a, b in zip(self.sizes, self.sizes[1:]))
        tail = self.sizes[self.depth:]
        return all(s == tail[0] for s in tail)


def class_size_history(tower: Tower, color: str, n: int, label: int, cap: int) -> list[int]:
    rel = tower.relation(color, n)
    i = int(rel.first_members()[label])
    sizes = []
    for m in range(n, cap + 1):
        sizes.append(int(tower.relation(color, m).sizes[tower.relation(color, m).labels[i]]))
        if m < cap:
            i = int(tower.angles(m + 1).embed[i])
    return sizes


def stabilization(tower: Tower, color: str, n: int, label: int, cap: int) -> Stabilization:
    sizes = class_size_history(tower, color, n, label, cap)
    observed = len(sizes) - 1
    while observed > 0 and sizes[observed - 1] == sizes[-1]:
        observed -= 1
    depth = tower.orbit_depth(color, n, label)
    if depth is not None and n + depth > cap:
        depth = None
    return Stabilization(depth, observed if depth is not None else None, tuple(sizes), cap)


@dataclass(frozen=True)
class ConnectionGraph:
    gap_nodes: int
    class_nodes: int
    edges: int
    components: int

    @property
    def nodes(self) -> int:
        return self.gap_nodes + self.class_nodes

    @property
    def is_tree(self) -> bool:
        return self.components == 1 and self.edges == self.nodes - 1


def connection_graph(rel: LevelRelation, gaps: GapSet) -> ConnectionGraph:
    """Bipartite incidence graph between gaps and the classes they touch."""
    size = len(rel.labels)
    arcs = np.arange(size)
    classes = np.concatenate((rel.labels, rel.labels[(arcs + 1) % size]))
    owners = np.concatenate((gaps.gap_of_arc, gaps.gap_of_arc))
    pairs = np.unique(owners * rel.count + classes)
    gap_ids, class_ids = pairs // rel.count, pairs % rel.count
    components = kernels.count_components(gaps.count + rel.count, gap_ids, class_ids + gaps.count)
    return ConnectionGraph(gaps.count, rel.count, len(pairs), int(components))


def first_crossing_pair(rel: LevelRelation) -> Optional[tuple[int, int]]:
    """A pair of crossing class labels found by the stack sweep, or None."""
    i = kernels.first_crossing(rel.labels)
    if i < 0:
        return None
    # some class with a member strictly between pred(i) and i also has one outside
    lab = int(rel.labels[i])
    j = int(rel.pred[i])
    inside = set(rel.labels[j + 1:i].tolist())
    outside = set(rel.labels[:j].tolist()) | set(rel.labels[i + 1:].tolist())
    other = min(inside & outside)
    return lab, other


def separation_failures(tower: Tower, color: str, n: int) -> tuple[list[str], bool]:
    """Zero angles merged at level n, and whether some gap touches two zero classes."""
    rel = tower.relation(color, n)
    gaps = tower.gaps(color, n)
    where = tower.embedding(0, n)
    zero_labels = rel.labels[where]
    merged = []
    if len(set(zero_labels.tolist())) < len(zero_labels):
        angles = tower.zero.zero_angles
        merged = [format_angle(a) for a, lab in zip(angles, zero_labels.tolist())
                  if zero_labels.tolist().count(lab) > 1]
    zmap = np.full(rel.count, -1, dtype=np.int64)
    zmap[zero_labels] = np.arange(len(zero_labels))
    size = len(rel.labels)
    corners = np.concatenate((gaps.arcs, (gaps.arcs + 1) % size), axis=1)
    tags = np.sort(zmap[rel.labels[corners]], axis=1)
    distinct = (tags >= 0) & np.concatenate(
        (np.ones((len(tags), 1), dtype=bool), tags[:, 1:] != tags[:, :-1]), axis=1
    )
    touching = bool((distinct.sum(axis=1) >= 2).any())
    return merged, touching


def dump_level(tower: Tower, color: str, n: int) -> list[str]:
    """One line per class: ``n color classid type: p/q p/q ...``."""
    rel = tower.relation(color, n)
    angles = tower.angles(n).angles()
    types = tower.dyn_types(color, n)
    lines = []
    for lab, members in enumerate(rel.classes()):
        body = " ".join(format_angle(angles[i]) for i in members.tolist())
        lines.append(f"{n} {color} {lab} {types[lab]}: {body}")
    return lines


def build_level(tower: Tower, color: str, n: int) -> LevelRelation:
    return tower.relation(color, n)


def gaps_of(tower: Tower, rel: LevelRelation) -> GapSet:
    return tower.gaps(rel.color, rel.level)


def class_image_failures(tower: Tower, color: str, n: int) -> list[int]:
    """Level-n classes whose image is not exactly one level-(n-1) class."""
    if n == 0:
        return []
    rel = tower.relation(color, n)
    below = tower.relation(color, n - 1)
    image = tower.image_index(n)
    target = below.labels[image]
    expected = target[rel.first_members()][rel.labels]
    bad = set(np.unique(rel.labels[target != expected]).tolist())
    # the image must also cover the whole target class
    pairs = np.unique(rel.labels * len(image) + image)
    covered = np.bincount(pairs // len(image), minlength=rel.count)
    want = below.sizes[target[rel.first_members()]]
    bad.update(np.nonzero(covered != want)[0].tolist())
    return sorted(bad)


def multiplicity_failures(tower: Tower, color: str, n: int) -> list[int]:
    """Level-(n-1) classes W whose preimage classes are not all multiples of |W| or
    do not add up to d|W|."""
    if n == 0:
        return []
    rel = tower.relation(color, n)
    below = tower.relation(color, n - 1)
    targets = tower.image_labels(color, n)
    sizes = rel.sizes
    want = below.sizes[targets]
    bad = set(np.unique(targets[sizes % want != 0]).tolist())
    totals = np.bincount(targets, weights=sizes, minlength=below.count).astype(np.int64)
    bad.update(np.nonzero(totals != tower.d * below.sizes)[0].tolist())
    return sorted(bad)
