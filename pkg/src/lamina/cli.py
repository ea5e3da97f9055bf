"""Command-line entry point.

Exit codes: 0 all checks pass, 1 a violation was found, 2 usage or parse
error, 3 the angle budget would be exceeded.
"""
from __future__ import annotations

import sys
from collections import Counter
from typing import Optional

import click

from .angle import format_angle, parse_angle
from .lamination import (
    COLORS,
    BudgetExceeded,
    LaminationError,
    Tower,
    class_image_failures,
    connection_graph,
    dump_level,
    first_crossing_pair,
    multiplicity_failures,
)
from .portrait import PortraitError, load_portrait_pair, validate

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _fail(message: str, code: int):
    click.echo(message, err=True)
    sys.exit(code)


def _load(path: str):
    try:
        return load_portrait_pair(path)
    except OSError as exc:
        _fail(f"error: cannot read {path}: {exc.strerror}", EXIT_USAGE)
    except PortraitError as exc:
        _fail(f"error: {path}: {exc}", EXIT_USAGE)


def _angle(text: str):
    try:
        return parse_angle(text)
    except (ValueError, ZeroDivisionError) as exc:
        _fail(f"error: bad angle {text!r}: {exc}", EXIT_USAGE)


def _colors(color: str) -> tuple[str, ...]:
    return COLORS if color == "both" else (color,)


def build_report(tower: Tower, n: int) -> tuple[list[str], bool]:
    """Every invariant suite for levels 0..n, as ``key: value`` lines."""
    from .circuit import check_semiconjugacy, circuit, entropy_measure_report
    from .relations import cnc_report, restriction_equal

    d, k = tower.d, tower.k
    lines = [f"degree: {d}", f"zero_angles: {' '.join(format_angle(a) for a in tower.zero.zero_angles)}"]
    ok = True

    def check(key: str, passed: bool, detail: str = ""):
        nonlocal ok
        ok &= passed
        lines.append(f"{key}: {'ok' if passed else 'FAIL'}" + (f" {detail}" if detail and not passed else ""))

    for m in range(n + 1):
        pre = f"level.{m}"
        size = k * d**m
        lines.append(f"{pre}.angles: {len(tower.angles(m))}")
        check(f"{pre}.angle_count", len(tower.angles(m)) == size)
        for color in COLORS:
            key = f"{pre}.{color}"
            rel = tower.relation(color, m)
            gaps = tower.gaps(color, m)
            sizes = rel.sizes
            lines.append(f"{key}.classes: {rel.count}")
            lines.append(f"{key}.gaps: {gaps.count}")
            check(f"{key}.class_count", rel.count == (k - 1) * d**m + 1, f"expected {(k - 1) * d**m + 1}")
            check(f"{key}.gap_count", gaps.count == d**m, f"expected {d**m}")
            check(f"{key}.size_sum", int(sizes.sum()) == size and int((sizes - 1).sum()) == d**m - 1)
            crossing = first_crossing_pair(rel)
            check(f"{key}.non_crossing", crossing is None, f"classes {crossing}")
            check(f"{key}.class_images", not class_image_failures(tower, color, m))
            check(f"{key}.multiplicity", not multiplicity_failures(tower, color, m))
            check(f"{key}.gap_parents", gaps.parents_consistent)
            check(f"{key}.connection_tree", connection_graph(rel, gaps).is_tree)
            check(f"{key}.predicted_sizes", bool((tower.predicted_sizes(color, m) == sizes).all()))
        cnc = cnc_report(tower, m)
        check(f"{pre}.cnc", cnc.ok, "; ".join(c.describe(tower.angles(m)) for c in cnc.failures[:3]))
        circ = circuit(tower, m)
        check(f"{pre}.circuit", not circ.problems(), "; ".join(circ.problems()))
        measure = entropy_measure_report(tower, m)
        check(f"{pre}.gap_measure", measure.measures_ok)
        check(f"{pre}.fibers", measure.fibers_ok)
        if m < n:
            check(f"{pre}.restriction", restriction_equal(tower, m).ok)
            check(f"{pre}.semiconjugacy", check_semiconjugacy(tower, m).ok)
    lines.append(f"result: {'ok' if ok else 'violation'}")
    return lines, ok


def stats_report(tower: Tower, n: int, colors=COLORS) -> list[str]:
    lines = [f"level: {n}", f"angles: {len(tower.angles(n))}"]
    for color in colors:
        rel = tower.relation(color, n)
        gaps = tower.gaps(color, n)
        types = Counter(tower.dyn_types(color, n).tolist())
        sizes = Counter(rel.sizes.tolist())
        depths = Counter(
            "fatou" if (dep := tower.orbit_depth(color, n, lab)) is None else str(dep)
            for lab in range(rel.count)
        )
        lines.append(f"{color}.classes: {rel.count}")
        lines.append(f"{color}.gaps: {gaps.count}")
        lines.append(f"{color}.class_sizes: " + " ".join(f"{s}x{c}" for s, c in sorted(sizes.items())))
        lines.append(f"{color}.types: " + " ".join(f"{t}={c}" for t, c in sorted(types.items())))
        lines.append(
            f"{color}.stabilization_depths: "
            + " ".join(f"{dep}x{c}" for dep, c in sorted(depths.items(), key=lambda kv: (kv[0] == "fatou", kv[0])))
        )
    return lines


@click.group()
@click.option("--max-angles", type=click.IntRange(min=1), default=None,
              help="Angle budget per colour (default from LAMINA_MAX_ANGLES or 10^7).")
@click.pass_context
def main(ctx, max_angles: Optional[int]):
    """Build and check invariant laminations of critical portrait pairs."""
    ctx.ensure_object(dict)
    ctx.obj["max_angles"] = max_angles


def _tower(ctx, pair) -> Tower:
    return Tower(pair, max_angles=ctx.obj.get("max_angles"))


def _guard(fn):
    """Turn budget and structure errors into exit codes."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BudgetExceeded as exc:
            _fail(f"budget exceeded: {exc}", EXIT_BUDGET)
        except LaminationError as exc:
            _fail(f"violation: {exc}", EXIT_VIOLATION)

    return wrapper


@main.command("validate")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--depth-cap", type=click.IntRange(min=0), default=4, show_default=True)
@click.pass_context
@_guard
def validate_cmd(ctx, path, depth_cap):
    """Check the portrait axioms; exit 1 naming the axiom ids on failure."""
    pair = _load(path)
    report = validate(pair, depth_cap=depth_cap, max_angles=ctx.obj.get("max_angles"))
    for line in report.lines():
        click.echo(line)
    if report.violations:
        click.echo("axioms: " + " ".join(report.axiom_ids()))
    sys.exit(EXIT_OK if report.ok else EXIT_VIOLATION)


@main.command("build")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("-n", "depth", type=click.IntRange(min=0), required=True)
@click.pass_context
@_guard
def build_cmd(ctx, path, depth):
    """Build levels 0..N and run every invariant check."""
    tower = _tower(ctx, _load(path))
    tower.check_budget(depth)
    lines, ok = build_report(tower, depth)
    click.echo("\n".join(lines))
    sys.exit(EXIT_OK if ok else EXIT_VIOLATION)


@main.command("stats")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("-n", "depth", type=click.IntRange(min=0), required=True)
@click.option("--color", type=click.Choice(["white", "black", "both"]), default="both")
@click.pass_context
@_guard
def stats_cmd(ctx, path, depth, color):
    """Counts, class sizes, types and stabilization depths at level N."""
    tower = _tower(ctx, _load(path))
    click.echo("\n".join(stats_report(tower, depth, _colors(color))))


@main.command("classes")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("-n", "depth", type=click.IntRange(min=0), required=True)
@click.option("--angle", "angle_text", default=None, help="Only the class holding this angle.")
@click.option("--color", type=click.Choice(["white", "black", "both"]), default="both")
@click.pass_context
@_guard
def classes_cmd(ctx, path, depth, angle_text, color):
    """List the level-N classes: ``n colour id type: angles``."""
    tower = _tower(ctx, _load(path))
    index = None
    if angle_text is not None:
        index = tower.angles(depth).index_of(_angle(angle_text))
        if index is None:
            _fail(f"error: {angle_text} is not a level-{depth} angle", EXIT_USAGE)
    for c in _colors(color):
        lines = dump_level(tower, c, depth)
        if index is not None:
            lines = [lines[int(tower.relation(c, depth).labels[index])]]
        click.echo("\n".join(lines))


@main.command("boundary")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--angle", "angle_text", required=True)
@click.option("-n", "depth", type=click.IntRange(min=0), required=True)
@click.option("--color", type=click.Choice(["white", "black"]), default="white")
@click.pass_context
@_guard
def boundary_cmd(ctx, path, angle_text, depth, color):
    """Nested gap chains of an angle and its boundary classes."""
    from .boundary import approx_class, big_g_class, fatou_class, gap_itinerary

    tower = _tower(ctx, _load(path))
    s = _angle(angle_text)
    for it in gap_itinerary(s, tower, depth, color):
        period = "none" if it.periodicity is None else f"{it.periodicity[0]} {it.periodicity[1]}"
        click.echo(f"chain.{it.side}: " + " ".join(map(str, it.chain)))
        click.echo(f"certificate.{it.side}: {period}")
        click.echo(f"limit.{it.side}: {big_g_class(it).line()}")
    click.echo(f"approx: {approx_class(s, tower, depth, color).line()}")
    click.echo(f"fatou: {fatou_class(s, tower, depth, color).line()}")


@main.command("render")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("-n", "depth", type=click.IntRange(min=0), required=True)
@click.option("--mode", type=click.Choice(["disk", "tiling"]), default="disk", show_default=True)
@click.option("-o", "output", type=click.Path(dir_okay=False), required=True)
@click.option("--color", type=click.Choice(["white", "black", "both"]), default="both")
@click.option("--coarse", type=click.IntRange(min=0), default=1, show_default=True,
              help="Tiling mode: colour arcs by the level whose intervals hold them.")
@click.option("--angle-rule", type=click.Choice(["corner", "equiangular"]), default=None)
@click.pass_context
@_guard
def render_cmd(ctx, path, depth, mode, output, color, coarse, angle_rule):
    """Write an SVG disk diagram or turtle-traced tiling."""
    from .render import Geometry, GeometryError, render_lamination, render_tiling, turtle_trace

    pair = _load(path)
    tower = _tower(ctx, pair)
    if mode == "disk":
        svg = render_lamination(tower, depth, _colors(color))
    else:
        config = dict(pair.geometry or {})
        if angle_rule:
            config["angle_rule"] = angle_rule
        try:
            geometry = Geometry.from_config(config, pair.degree, tower.k)
        except GeometryError as exc:
            _fail(f"error: {exc}", EXIT_USAGE)
        trace = turtle_trace(tower, depth, geometry)
        click.echo(f"closure_error: {trace.closure_error:.3e}")
        svg = render_tiling(trace, pair.degree, coarse)
    with open(output, "w", encoding="utf-8") as fh:
        fh.write(svg)
    click.echo(f"wrote: {output}")


if __name__ == "__main__":
    main()
