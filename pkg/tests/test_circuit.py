from fractions import Fraction as F

import numpy as np
import pytest

from lamina.angle import mu
from lamina.circuit import (
    check_semiconjugacy,
    circuit,
    dump_circuit,
    entropy_measure_report,
    gap_boundary_measure,
    gap_measures,
    type_length,
)
from lamina.lamination import Tower

from conftest import PAIR_NAMES, forge_merge, load


def arc_of(tower, n, start):
    return tower.angles(n).index_of(start)


def measure_oracle(tower, color, n):
    """Sum of the arc lengths around each gap, straight from the angle list."""
    angles = tower.angles(n).angles()
    size = len(angles)
    out = []
    for row in tower.gaps(color, n).arcs.tolist():
        total = sum((angles[(i + 1) % size] - angles[i]) % 1 or (1 if size == 1 else 0) for i in row)
        out.append(F(total))
    return out


@pytest.mark.parametrize("name", PAIR_NAMES)
def test_level_zero_circuit(towers, name):
    tower = towers[name]
    circ = circuit(tower, 0)
    assert len(circ) == tower.k
    assert circ.types.tolist() == list(range(tower.k))
    assert set(circ.wgap.tolist()) == {0} == set(circ.bgap.tolist())
    assert circ.problems() == []


def test_g_level_one_circuit(g_tower):
    circ = circuit(g_tower, 1)
    assert len(circ) == 16
    assert circ.type_counts().tolist() == [4, 4, 4, 4]
    a, b = arc_of(g_tower, 1, F(2, 16)), arc_of(g_tower, 1, F(10, 16))
    assert circ.wgap[a] != circ.wgap[b]
    assert circ.vstart[a] == circ.vstart[b]


def test_r4_level_one_circuit(towers):
    circ = circuit(towers["r4"], 1)
    assert len(circ) == 9
    assert circ.type_counts().tolist() == [3, 3, 3]


@pytest.mark.parametrize("name", PAIR_NAMES)
def test_circuits_are_well_formed(towers, name):
    tower = towers[name]
    for n in range(5):
        circ = circuit(tower, n)
        assert circ.problems() == []
        assert len(np.unique(circ.edge_ids())) == len(circ)


def test_dump_circuit_lines(g_tower):
    lines = dump_circuit(g_tower, 1)
    assert len(lines) == 16
    i = arc_of(g_tower, 1, F(2, 16))
    assert lines[i].startswith(f"{i} [1/8,3/16] type=2 ")


@pytest.mark.parametrize("n", range(5))
def test_g_semiconjugacy(g_tower, n):
    report = check_semiconjugacy(g_tower, n)
    assert report.ok


@pytest.mark.parametrize("n", range(4))
def test_r2_semiconjugacy(towers, n):
    assert check_semiconjugacy(towers["r2"], n).ok


def test_semiconjugacy_against_direct_images(towers):
    # (i) by hand: each level-(n+1) arc maps onto the n-arc starting at its image
    tower = towers["r4"]
    for n in range(3):
        up, here = tower.angles(n + 1).angles(), tower.angles(n).angles()
        size = len(up)
        for i in range(size):
            start, end = mu(up[i], tower.d), mu(up[(i + 1) % size], tower.d)
            j = here.index(start)
            assert here[(j + 1) % len(here)] == end


def test_forged_merge_breaks_vertex_images():
    tower = Tower(load("g"))
    angles = tower.angles(2)
    # 1/16 and 1/8 map to 1/4 and 1/2, which are never equivalent at level 1
    forge_merge(tower, "white", 2, angles.index_of(F(1, 16)), angles.index_of(F(1, 8)))
    report = check_semiconjugacy(tower, 1)
    assert not report.ok
    assert report.vertex_failures
    i, j = report.vertex_failures[0]
    assert {angles.angle(i), angles.angle(j)} & {F(1, 16), F(1, 8)}


def test_gap_measure_examples(g_tower, towers):
    assert gap_boundary_measure(g_tower, "white", 1, 0) == F(1, 4)
    assert gap_boundary_measure(towers["r4"], "white", 1, 0) == F(1, 3)
    for name in PAIR_NAMES:
        assert gap_measures(towers[name], "white", 0) == [F(1)]
        assert gap_measures(towers[name], "black", 0) == [F(1)]


def test_g_level_two_measures(g_tower):
    assert gap_measures(g_tower, "white", 2) == [F(1, 16)] * 16


@pytest.mark.parametrize("name", PAIR_NAMES)
def test_measures_match_oracle(towers, name):
    tower = towers[name]
    for n in range(4):
        for color in ("white", "black"):
            got = gap_measures(tower, color, n)
            assert got == measure_oracle(tower, color, n)
            assert all(m == F(1, tower.d ** n) for m in got)


@pytest.mark.parametrize("name", PAIR_NAMES)
def test_arc_lengths_are_scaled_type_lengths(towers, name):
    tower = towers[name]
    for n in range(4):
        angles = tower.angles(n).angles()
        types = tower.angles(n).arc_types
        size = len(angles)
        for i in range(size):
            length = (angles[(i + 1) % size] - angles[i]) % 1 or F(1)
            assert length == type_length(tower, n, int(types[i]))


@pytest.mark.parametrize("name", PAIR_NAMES)
def test_measure_report(towers, name):
    tower = towers[name]
    for n in range(5):
        report = entropy_measure_report(tower, n)
        assert report.ok
        assert report.expected == F(1, tower.d ** n)
    fibers = entropy_measure_report(tower, 1).fibers
    assert all(total == tower.d for _, size, _, total in fibers if size == 1)
