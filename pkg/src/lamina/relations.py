"""Equivalence relations on finite angle sets and the vertex classes of a level.

A :class:`Partition` is a value: its blocks are sorted internally and listed
by least element, so two partitions compare equal exactly when they group
the same points.  Level-sized work (hundreds of thousands of angles) goes
through integer label arrays instead; :func:`vertex_labels` is that form of
:func:`level_join`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .angle import format_angle


class PartitionError(ValueError):
    """Two partitions that do not live on the same ground set."""


@dataclass(frozen=True)
class Partition:
    ground: tuple
    blocks: tuple[tuple, ...]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[Hashable]], ground: Optional[Iterable] = None) -> "Partition":
        """Canonicalise ``blocks``; points of ``ground`` left out become singletons."""
        seen = set()
        out = []
        for block in blocks:
            block = tuple(sorted(set(block)))
            if not block:
                continue
            if seen & set(block):
                raise PartitionError(f"blocks overlap at {sorted(seen & set(block))}")
            seen.update(block)
            out.append(block)
        if ground is not None:
            ground = set(ground)
            if not seen <= ground:
                raise PartitionError(f"points outside the ground set: {sorted(seen - ground)}")
            out.extend((p,) for p in ground - seen)
        out.sort(key=lambda b: b[0])
        return cls(tuple(sorted(p for b in out for p in b)), tuple(out))

    @classmethod
    def from_labels(cls, ground: Sequence, labels: Sequence[int]) -> "Partition":
        groups: dict[int, list] = {}
        for point, lab in zip(ground, labels):
            groups.setdefault(int(lab), []).append(point)
        return cls.from_blocks(groups.values())

    @classmethod
    def trivial(cls, ground: Iterable) -> "Partition":
        return cls.from_blocks([(p,) for p in ground])

    def __len__(self) -> int:
        return len(self.blocks)

    def labels(self) -> np.ndarray:
        """Block number of every ground point, in ground order."""
        where = {p: i for i, block in enumerate(self.blocks) for p in block}
        return np.array([where[p] for p in self.ground], dtype=np.int64)

    def block_of(self, point) -> tuple:
        for block in self.blocks:
            if point in block:
                return block
        raise KeyError(point)

    def index_blocks(self) -> list[list[int]]:
        """Blocks as lists of positions in the ground tuple."""
        index = {p: i for i, p in enumerate(self.ground)}
        return [[index[p] for p in block] for block in self.blocks]

    def refines(self, other: "Partition") -> bool:
        return self.meet(other) == self

    def _check_ground(self, other: "Partition"):
        if self.ground != other.ground:
            raise PartitionError("partitions have different ground sets")

    def join(self, other: "Partition") -> "Partition":
        self._check_ground(other)
        labels = kernels.join_labels(self.labels(), other.labels())
        return Partition.from_labels(self.ground, labels)

    def meet(self, other: "Partition") -> "Partition":
        self._check_ground(other)
        codes: dict[tuple[int, int], int] = {}
        pairs = zip(self.labels().tolist(), other.labels().tolist())
        return Partition.from_labels(self.ground, [codes.setdefault(p, len(codes)) for p in pairs])

    def dump(self, level: int = 0, name: str = "join") -> list[str]:
        def fmt(p):
            return format_angle(p) if hasattr(p, "denominator") else str(p)

        return [f"{level} {name} {i}: " + " ".join(fmt(p) for p in block) for i, block in enumerate(self.blocks)]


def join(first: Partition, second: Partition) -> Partition:
    return first.join(second)


def meet(first: Partition, second: Partition) -> Partition:
    return first.meet(second)


# -- vertex classes of a level -------------------------------------------------


def vertex_labels(tower, n: int) -> np.ndarray:
    """Join of the white and black level-n labels, numbered by least angle."""
    return kernels.join_labels(tower.relation("white", n).labels, tower.relation("black", n).labels)


def level_join(tower, n: int) -> Partition:
    """The vertex classes of level n as a partition of the level-n angles."""
    return Partition.from_labels(tuple(tower.angles(n).angles()), vertex_labels(tower, n))


def join_chain_lengths(tower, n: int) -> np.ndarray:
    """Number of non-trivial white and black classes chained inside each vertex class."""
    vert = vertex_labels(tower, n)
    count = int(vert.max()) + 1
    out = np.zeros(count, dtype=np.int64)
    for color in ("white", "black"):
        rel = tower.relation(color, n)
        nontrivial = rel.first_members()[rel.sizes > 1]
        np.add.at(out, vert[nontrivial], 1)
    return out


# -- complementary non-crossing partitions -----------------------------------


def _crosses(blocks: Sequence[Sequence[int]], size: int) -> Optional[tuple[int, int]]:
    """Indices of two interleaved blocks among positions 0..size-1, or None."""
    owner = [-1] * size
    for b, block in enumerate(blocks):
        for i in block:
            owner[i] = b
    seq = [b for b in owner if b >= 0]
    remaining: dict[int, int] = {}
    for b in seq:
        remaining[b] = remaining.get(b, 0) + 1
    stack: list[int] = []
    opened = set()
    for i, b in enumerate(seq):
        if b not in opened:
            opened.add(b)
            remaining[b] -= 1
            if remaining[b]:
                stack.append(b)
            continue
        if stack[-1] != b:
            # the block on top of the stack opened after b and is still unfinished
            return b, stack[-1]
        remaining[b] -= 1
        if not remaining[b]:
            stack.pop()
    return None


def _parents(labels: np.ndarray) -> np.ndarray:
    """A union-find forest whose roots give ``labels`` (each points at its first member)."""
    first: dict[int, int] = {}
    return np.array([first.setdefault(lab, i) for i, lab in enumerate(labels.tolist())], dtype=np.int64)


def complement_blocks(white_blocks: Sequence[Sequence[int]], size: int) -> list[list[int]]:
    """Coarsest grouping of the odd positions that stays non-crossing with the even blocks.

    Odd positions i and j share a block exactly when no even block has
    members both inside and outside the open cyclic interval (i, j).
    """
    odd = list(range(1, size, 2))
    owner = {}
    for b, block in enumerate(white_blocks):
        for i in block:
            owner[i] = b
    sizes = {b: len(block) for b, block in enumerate(white_blocks)}
    groups: list[list[int]] = []
    placed = set()
    for i in odd:
        if i in placed:
            continue
        group = [i]
        placed.add(i)
        for j in odd:
            if j in placed:
                continue
            inside: dict[int, int] = {}
            t = (i + 1) % size
            while t != j:
                if t in owner:
                    inside[owner[t]] = inside.get(owner[t], 0) + 1
                t = (t + 1) % size
            if all(cnt == sizes[b] for b, cnt in inside.items()):
                group.append(j)
                placed.add(j)
        groups.append(group)
    return groups


def check_cnc(white_blocks: Sequence[Sequence[int]], black_blocks: Sequence[Sequence[int]], size: int) -> list[str]:
    """Problems with a proposed pair of incidence partitions; empty when valid."""
    problems = []
    evens = sorted(i for b in white_blocks for i in b)
    odds = sorted(i for b in black_blocks for i in b)
    if evens != list(range(0, size, 2)) or odds != list(range(1, size, 2)):
        return ["blocks do not cover the even and odd incidences exactly"]
    for name, blocks in (("white", white_blocks), ("black", black_blocks)):
        hit = _crosses(blocks, size)
        if hit is not None:
            a, b = hit
            problems.append(f"{name} blocks {sorted(blocks[a])} and {sorted(blocks[b])} cross")
    if problems:
        return problems
    both = list(white_blocks) + list(black_blocks)
    hit = _crosses(both, size)
    if hit is not None:
        a, b = hit
        problems.append(f"blocks {sorted(both[a])} and {sorted(both[b])} cross")
        return problems
    want = sorted(sorted(g) for g in complement_blocks(white_blocks, size))
    have = sorted(sorted(b) for b in black_blocks)
    if want != have:
        problems.append(f"black blocks {have} are not the complement {want}")
    return problems


@dataclass(frozen=True)
class CncPartition:
    """Incidences around one vertex class, alternating white and black sectors.

    ``passages[t]`` is the angle index x_t; incidence 2t is the white sector
    following x_t and 2t+1 the black sector after it.
    """

    vertex: tuple[int, ...]
    passages: tuple[int, ...]
    white_blocks: tuple[tuple[int, ...], ...]
    black_blocks: tuple[tuple[int, ...], ...]
    problems: tuple[str, ...] = field(default=())

    @property
    def incidences(self) -> int:
        return 2 * len(self.vertex)

    @property
    def valid(self) -> bool:
        return not self.problems

    def describe(self, angles) -> str:
        names = " ".join(format_angle(angles.angle(i) if hasattr(angles, "angle") else angles[i]) for i in self.vertex)
        if self.valid:
            return f"vertex {{{names}}}: white {list(map(list, self.white_blocks))} black {list(map(list, self.black_blocks))}"
        return f"vertex {{{names}}}: " + "; ".join(self.problems)


def _passage_step(tower, n: int) -> np.ndarray:
    """x -> pred_black(succ_white(x)): the next passage around a vertex."""
    return tower.relation("black", n).pred[tower.relation("white", n).succ]


def vertex_cnc(tower, n: int, vertex: Sequence[int], step: Optional[np.ndarray] = None) -> CncPartition:
    """Rebuild the incidence pattern at one vertex class and check it."""
    white = tower.relation("white", n)
    black = tower.relation("black", n)
    if step is None:
        step = _passage_step(tower, n)
    vertex = tuple(sorted(int(i) for i in vertex))
    passages = [vertex[0]]
    while True:
        nxt = int(step[passages[-1]])
        if nxt == passages[0] or len(passages) > len(vertex):
            break
        passages.append(nxt)
    if sorted(passages) != list(vertex):
        missing = sorted(set(vertex) - set(passages))
        return CncPartition(vertex, tuple(passages), (), (),
                            (f"passages {passages} leave out {missing}: the sectors close up early",))
    white_groups: dict[int, list[int]] = {}
    black_groups: dict[int, list[int]] = {}
    for t, x in enumerate(passages):
        white_groups.setdefault(int(white.labels[x]), []).append(2 * t)
        black_groups.setdefault(int(black.labels[white.succ[x]]), []).append(2 * t + 1)
    wb = tuple(sorted(tuple(g) for g in white_groups.values()))
    bb = tuple(sorted(tuple(g) for g in black_groups.values()))
    problems = check_cnc(wb, bb, 2 * len(passages))
    return CncPartition(vertex, tuple(passages), wb, bb, tuple(problems))


@dataclass(frozen=True)
class CncReport:
    level: int
    vertices: int
    checked: int
    failures: tuple[CncPartition, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def cnc_report(tower, n: int, limit: int = 20) -> CncReport:
    """Check every vertex class of level n.

    Vertices where both colours are trivial are a single white and a single
    black sector and need no further work once the passage cycle matches.
    """
    vert = vertex_labels(tower, n)
    step = _passage_step(tower, n)
    cycles = kernels.cycle_ids(step)
    count = int(vert.max()) + 1
    failures = []
    if not np.array_equal(kernels.canonical_labels(_parents(cycles)), vert):
        bad = np.nonzero(kernels.canonical_labels(_parents(cycles)) != vert)[0]
        failures.append(vertex_cnc(tower, n, np.nonzero(vert == vert[bad[0]])[0], step))
    white = tower.relation("white", n)
    black = tower.relation("black", n)
    busy = (white.sizes[white.labels] > 1) | (black.sizes[black.labels] > 1)
    order = np.argsort(vert, kind="stable")
    bounds = np.cumsum(np.bincount(vert, minlength=count))[:-1]
    checked = 0
    for members in np.split(order, bounds):
        if len(members) < 2 or not busy[members].any():
            continue
        checked += 1
        cnc = vertex_cnc(tower, n, members.tolist(), step)
        if not cnc.valid and len(failures) < limit and all(f.vertex != cnc.vertex for f in failures):
            failures.append(cnc)
    return CncReport(n, count, checked, tuple(failures))


# -- restriction to the previous level -----------------------------------------


@dataclass(frozen=True)
class RestrictionReport:
    level: int
    witnesses: tuple[tuple[str, int, int], ...]  # (colour, i, j) level-n angle indices

    @property
    def ok(self) -> bool:
        return not self.witnesses

    def describe(self, angles) -> list[str]:
        out = []
        for color, i, j in self.witnesses:
            out.append(f"{color}: {format_angle(angles.angle(i))} and {format_angle(angles.angle(j))} disagree")
        return out


def restriction_equal(tower, n: int) -> RestrictionReport:
    """Whether the level-(n+1) relations restricted to the level-n angles give the level-n ones."""
    where = tower.embedding(n, n + 1)
    witnesses = []
    for color in ("white", "black"):
        here = tower.relation(color, n).labels
        up = kernels.canonical_labels(_parents(tower.relation(color, n + 1).labels[where]))
        if np.array_equal(here, up):
            continue
        i = int(np.nonzero(here != up)[0][0])
        # a point agreeing in one relation but not the other
        for j in range(len(here)):
            if j != i and (here[i] == here[j]) != (up[i] == up[j]):
                witnesses.append((color, min(i, j), max(i, j)))
                break
    return RestrictionReport(n, tuple(witnesses))
