"""Exact angles on the circle R/Z and cyclic-order predicates.

An angle is a :class:`fractions.Fraction` in ``[0, 1)``.  Every function here
returns canonical representatives, so equal angles compare and hash equal.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

Angle = Fraction


def reduce(p: int, q: int) -> Angle:
    """Canonical representative of ``p/q`` modulo 1."""
    if q <= 0:
        raise ValueError(f"denominator must be positive, got {q}")
    return Fraction(p % q, q)


def as_angle(value) -> Angle:
    """Coerce an int, Fraction or ``"p/q"`` string to a canonical angle."""
    if isinstance(value, str):
        return parse_angle(value)
    frac = Fraction(value)
    return reduce(frac.numerator, frac.denominator)


def parse_angle(text: str) -> Angle:
    """Parse ``"p/q"`` or a bare integer.  Decimals are rejected."""
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not an exact angle: {text!r}") from None
    return reduce(p, q)


def format_angle(a: Angle) -> str:
    return f"{a.numerator}/{a.denominator}"


def mu(a: Angle, d: int) -> Angle:
    """The angle map t -> d*t mod 1."""
    return reduce(a.numerator * d, a.denominator)


def preimages(a: Angle, d: int) -> list[Angle]:
    """The d solutions of mu(x) = a, in increasing order."""
    return [reduce(a.numerator + j * a.denominator, a.denominator * d) for j in range(d)]


def cyclic_between(a: Angle, b: Angle, c: Angle) -> bool:
    """True iff b lies strictly inside the counterclockwise arc from a to c."""
    if a == b or b == c or a == c:
        raise ValueError(f"cyclic_between needs distinct angles, got {a}, {b}, {c}")
    return (b - a) % 1 < (c - a) % 1


def sets_cross(first: Iterable[Angle], second: Iterable[Angle]) -> bool:
    """True iff two disjoint angle sets interleave as a < b < c < d cyclically."""
    first, second = set(first), set(second)
    if first & second:
        raise ValueError("sets_cross needs disjoint sets")
    labels = [label for _, label in sorted([(x, 0) for x in first] + [(x, 1) for x in second])]
    # count label changes around the circle; four or more means interleaving
    changes = sum(1 for i in range(len(labels)) if labels[i] != labels[i - 1])
    return changes >= 4


@dataclass(frozen=True)
class OrbitDecomposition:
    preperiod: tuple[Angle, ...]
    cycle: tuple[Angle, ...]

    @property
    def period(self) -> int:
        return len(self.cycle)


def orbit(a: Angle, d: int) -> OrbitDecomposition:
    """Split the forward orbit of ``a`` under mu into preperiod and cycle."""
    seen: dict[Angle, int] = {}
    points: list[Angle] = []
    x = a
    while x not in seen:
        seen[x] = len(points)
        points.append(x)
        x = mu(x, d)
    start = seen[x]
    return OrbitDecomposition(tuple(points[:start]), tuple(points[start:]))
