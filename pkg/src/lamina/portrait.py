"""Critical portrait pairs: parsing, zero-level data and axiom checks.

Portrait documents are JSON::

    {
      "degree": 4,
      "white": [["2/16", "10/16"], ["3/16", "7/16"], ["11/16", "15/16"]],
      "black": [["1/16", "5/16"], ["6/16", "14/16"], ["9/16", "13/16"]],
      "geometry": {"edges": [[1, 0], [0, 1], [-1, 0], [0, -1]]}
    }

``white`` and ``black`` may also be objects ``{"degree": d, "classes": [...]}``
to state a per-colour degree; the two degrees must agree.  Angles are
strings ``"p/q"`` or integers.  ``geometry`` is optional and only read by the
renderer (see :class:`lamina.render.Geometry`).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .angle import Angle, as_angle, format_angle, mu, sets_cross


class PortraitError(ValueError):
    """A portrait document that cannot be turned into a PortraitPair."""


@dataclass(frozen=True)
class CriticalPortrait:
    degree: int
    classes: tuple[tuple[Angle, ...], ...]

    def angles(self) -> list[Angle]:
        return sorted(a for cls in self.classes for a in cls)


@dataclass(frozen=True)
class ZeroData:
    """The post-critical angle set A0 and its k typed arcs."""

    zero_angles: tuple[Angle, ...]
    arc_lengths: tuple[Fraction, ...]

    @property
    def k(self) -> int:
        return len(self.zero_angles)

    @property
    def denominator(self) -> int:
        """Least common denominator of the zero angles."""
        return math.lcm(*(a.denominator for a in self.zero_angles))


@dataclass(frozen=True)
class PortraitPair:
    white: CriticalPortrait
    black: CriticalPortrait
    zero: ZeroData
    geometry: Optional[dict] = field(default=None, compare=False)

    @property
    def degree(self) -> int:
        return self.white.degree

    def portrait(self, color: str) -> CriticalPortrait:
        if color == "white":
            return self.white
        if color == "black":
            return self.black
        raise ValueError(f"unknown colour {color!r}")


def orbit_set(white: CriticalPortrait, black: CriticalPortrait) -> ZeroData:
    """Joint forward orbit (images only) of every portrait angle."""
    if white.degree != black.degree:
        raise PortraitError("degree mismatch")
    d = white.degree
    found: set[Angle] = set()
    frontier = [mu(a, d) for a in white.angles() + black.angles()]
    while frontier:
        a = frontier.pop()
        if a not in found:
            found.add(a)
            frontier.append(mu(a, d))
    zero = tuple(sorted(found))
    lengths = tuple((zero[(j + 1) % len(zero)] - zero[j]) % 1 or Fraction(1) for j in range(len(zero)))
    return ZeroData(zero, lengths)


def make_pair(degree: int, white, black, geometry=None, black_degree: Optional[int] = None) -> PortraitPair:
    """Build a PortraitPair from nested lists of angles (strings or numbers)."""
    black_degree = degree if black_degree is None else black_degree
    if degree != black_degree:
        raise PortraitError(f"degree mismatch: white {degree}, black {black_degree}")
    if not isinstance(degree, int) or degree < 2:
        raise PortraitError(f"degree must be an integer >= 2, got {degree!r}")
    w = CriticalPortrait(degree, _classes(white, "white"))
    b = CriticalPortrait(degree, _classes(black, "black"))
    return PortraitPair(w, b, orbit_set(w, b), geometry)


def _classes(raw, color: str) -> tuple[tuple[Angle, ...], ...]:
    if not isinstance(raw, list):
        raise PortraitError(f"{color}: expected a list of classes")
    out = []
    seen: set[Angle] = set()
    for entry in raw:
        if not isinstance(entry, list):
            raise PortraitError(f"{color}: each class must be a list of angles")
        try:
            cls = tuple(sorted(as_angle(x) for x in entry))
        except (ValueError, TypeError) as exc:
            raise PortraitError(f"{color}: {exc}") from None
        if len(set(cls)) != len(cls):
            raise PortraitError(f"{color}: repeated angle in class {_fmt(cls)}")
        if len(cls) < 2:
            raise PortraitError(f"{color}: class {_fmt(cls)} has fewer than 2 angles")
        if seen & set(cls):
            raise PortraitError(f"{color}: classes overlap at {_fmt(sorted(seen & set(cls)))}")
        seen.update(cls)
        out.append(cls)
    return tuple(sorted(out))


def _fmt(angles) -> str:
    return "{" + ", ".join(format_angle(a) for a in angles) + "}"


def parse_portrait_pair(document: str) -> PortraitPair:
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise PortraitError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise PortraitError("document must be a JSON object")
    unknown = set(data) - {"degree", "white", "black", "geometry"}
    if unknown:
        raise PortraitError(f"unknown fields: {', '.join(sorted(unknown))}")
    degree = data.get("degree")
    colours = {}
    for color in ("white", "black"):
        if color not in data:
            raise PortraitError(f"missing field {color!r}")
        raw = data[color]
        if isinstance(raw, dict):
            colours[color] = (raw.get("degree", degree), raw.get("classes"))
        else:
            colours[color] = (degree, raw)
    (wd, wc), (bd, bc) = colours["white"], colours["black"]
    if wd is None or bd is None:
        raise PortraitError("missing field 'degree'")
    return make_pair(wd, wc, bc, data.get("geometry"), black_degree=bd)


def serialize_portrait_pair(pair: PortraitPair) -> str:
    data = {
        "degree": pair.degree,
        "white": [[format_angle(a) for a in cls] for cls in pair.white.classes],
        "black": [[format_angle(a) for a in cls] for cls in pair.black.classes],
    }
    if pair.geometry is not None:
        data["geometry"] = pair.geometry
    return json.dumps(data, indent=2) + "\n"


def load_portrait_pair(path) -> PortraitPair:
    with open(path, encoding="utf-8") as fh:
        return parse_portrait_pair(fh.read())


# -- validation ---------------------------------------------------------------

AXIOMS = {
    "a": "single-image",
    "b": "degree-sum",
    "c": "non-crossing",
    "d": "one-orbit-point",
    "e": "cnc-compatible",
    "f": "separation",
}


@dataclass(frozen=True, order=True)
class Violation:
    axiom: str
    color: str
    witness: str

    def __str__(self):
        return f"({self.axiom}) {AXIOMS[self.axiom]} [{self.color}]: {self.witness}"


@dataclass(frozen=True)
class ValidationReport:
    verdict: str  # "pass", "fail" or "inconclusive"
    violations: tuple[Violation, ...]
    separation_depth: Optional[int]
    depth_cap: int

    @property
    def ok(self) -> bool:
        return self.verdict == "pass"

    def axiom_ids(self) -> list[str]:
        return sorted({v.axiom for v in self.violations})

    def lines(self) -> list[str]:
        out = [f"verdict: {self.verdict}"]
        depth = "none" if self.separation_depth is None else str(self.separation_depth)
        out.append(f"separation_depth: {depth} (cap {self.depth_cap})")
        out.extend(f"violation: {v}" for v in self.violations)
        return out


def _portrait_violations(portrait: CriticalPortrait, zero: ZeroData, color: str) -> list[Violation]:
    d = portrait.degree
    out = []
    for cls in portrait.classes:
        images = sorted({mu(a, d) for a in cls})
        if len(images) > 1:
            out.append(Violation("a", color, f"{_fmt(cls)} maps to {_fmt(images)}"))
    total = sum(len(cls) - 1 for cls in portrait.classes)
    if total != d - 1:
        out.append(Violation("b", color, f"sum of (size - 1) is {total}, expected {d - 1}"))
    for i, first in enumerate(portrait.classes):
        for second in portrait.classes[i + 1:]:
            if sets_cross(first, second):
                out.append(Violation("c", color, f"{_fmt(first)} crosses {_fmt(second)}"))
    zero_set = set(zero.zero_angles)
    for cls in portrait.classes:
        hits = [a for a in cls if a in zero_set]
        if len(hits) > 1:
            out.append(Violation("d", color, f"{_fmt(cls)} contains orbit points {_fmt(hits)}"))
    return out


def validate(pair: PortraitPair, depth_cap: int = 4, max_angles: Optional[int] = None) -> ValidationReport:
    """Check the portrait axioms (a)-(d) per colour and (e), (f) for the pair."""
    from .lamination import LaminationError, Tower
    from .relations import cnc_report

    violations = []
    for color in ("white", "black"):
        violations += _portrait_violations(pair.portrait(color), pair.zero, color)
    if violations:
        return ValidationReport("fail", tuple(sorted(violations)), None, depth_cap)

    tower = Tower(pair, max_angles=max_angles)
    try:
        report = cnc_report(tower, 1)
        for cnc in report.failures:
            violations.append(Violation("e", "pair", cnc.describe(tower.angles(1))))
    except LaminationError as exc:
        violations.append(Violation("e", "pair", str(exc)))
    if violations:
        return ValidationReport("fail", tuple(sorted(violations)), None, depth_cap)

    depth, witnesses = separation_depth(tower, depth_cap)
    violations += witnesses
    if violations:
        return ValidationReport("fail", tuple(sorted(violations)), depth, depth_cap)
    if depth is None:
        return ValidationReport("inconclusive", (), None, depth_cap)
    return ValidationReport("pass", (), depth, depth_cap)


def separation_depth(tower, depth_cap: int) -> tuple[Optional[int], list[Violation]]:
    """Least n0 <= depth_cap such that no gap of any level in [n0, depth_cap]
    touches the classes of two distinct zero angles, in either colour.

    Returns ``(None, [])`` when only the cap level itself fails to settle it
    and ``(None, witnesses)`` when the classes of two zero angles merge.
    """
    from .lamination import LaminationError, separation_failures

    last_bad = -1
    witnesses: list[Violation] = []
    for n in range(depth_cap + 1):
        for color in ("white", "black"):
            try:
                merged, touching = separation_failures(tower, color, n)
            except LaminationError as exc:
                return None, [Violation("f", color, f"level {n}: {exc}")]
            if merged:
                witnesses.append(Violation("f", color, f"level {n}: zero angles {merged} are equivalent"))
            if touching:
                last_bad = n
    if witnesses:
        return None, witnesses
    depth = last_bad + 1
    return (depth if depth <= depth_cap else None), []
