from fractions import Fraction as F
from itertools import combinations
import math

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from lamina.angle import orbit, sets_cross
from lamina.boundary import (
    GapLifter,
    approx_class,
    big_g_class,
    corner_limits,
    deepest_corners,
    fatou_class,
    gap_itinerary,
    lifter_length,
    size_bound,
)
from lamina.lamination import Tower

from conftest import PAIR_NAMES, synthetic_fatou


def deep_levels(d):
    # about 2**-60 worth of refinement, so slow corners land well inside 1e-9
    return math.ceil(60 / math.log2(d))


def circle_distance(a, b):
    gap = float((a - b) % 1)
    return min(gap, 1 - gap)


def small_rationals(max_den=60):
    return st.integers(2, max_den).flatmap(lambda q: st.integers(0, q - 1).map(lambda p: F(p, q)))


def test_zero_on_g_has_two_chains(g_tower):
    chains = gap_itinerary(0, g_tower, 4)
    assert len(chains) == 2
    assert {c.side for c in chains} == {"left", "right"}
    assert all(c.depth == 4 for c in chains)


def test_one_fifth_on_g(g_tower):
    (chain,) = gap_itinerary(F(1, 5), g_tower, 6)
    assert chain.depth == 6
    assert chain.periodicity == (0, 2)
    assert big_g_class(chain).angles == (F(1, 5),)
    assert big_g_class(chain).exact


def test_chain_of_a_non_angle_has_full_length(towers):
    for tower in towers.values():
        chains = gap_itinerary(F(1, 7), tower, 3)
        assert len(chains) == 1 and chains[0].depth == 3


@pytest.mark.parametrize("name", PAIR_NAMES)
def test_chains_are_nested(towers, name):
    tower = towers[name]
    for s in (F(0), F(1, 5), F(2, 16), F(3, 7), F(11, 27)):
        for chain in gap_itinerary(s, tower, 4):
            for n in range(1, chain.depth):
                assert tower.gaps("white", n + 1).parent[chain.chain[n]] == chain.chain[n - 1]


@pytest.mark.parametrize("name", PAIR_NAMES)
@pytest.mark.parametrize("color", ["white", "black"])
def test_lifted_gaps_match_the_tower(towers, name, color):
    tower = towers[name]
    lifter = GapLifter(tower, color)
    for s in (F(1, 5), F(2, 7), F(5, 11), F(13, 17)):
        (chain,) = gap_itinerary(s, tower, 4, color)
        starts, _ = lifter.chain(s, "right", 4)
        for n in range(1, 5):
            arcs = tower.gaps(color, n).arcs[chain.chain[n - 1]].tolist()
            assert [a % 1 for a in starts[n]] == [tower.angles(n).angle(i) for i in arcs]


def test_zero_chain_keeps_corner_zero(g_tower):
    classes = [big_g_class(c) for c in gap_itinerary(0, g_tower, 4)]
    assert all(c.exact for c in classes)
    assert any(F(0) in c.angles for c in classes)
    assert all(len(c) <= g_tower.k for c in classes)


def test_one_fifth_limits_converge(g_tower):
    (chain,) = gap_itinerary(F(1, 5), g_tower, 6)
    limits = corner_limits(chain)
    for a in limits:
        den = a.denominator
        while den % 4 == 0:
            den //= 4
        assert 15 % den == 0
    deep = deepest_corners(chain, 20)
    assert all(min(circle_distance(c, a) for a in limits) < 1e-9 for c in deep)


@pytest.mark.parametrize("name", PAIR_NAMES)
@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(s=small_rationals())
def test_corner_limits_against_twenty_levels(towers, name, s):
    tower = towers[name]
    for chain in gap_itinerary(s, tower, 3):
        cls = big_g_class(chain)
        assert cls.exact
        assert 1 <= len(cls) <= tower.k
        starts, _ = chain.lifter.chain(s, chain.side, 20)
        for a in cls.angles:
            assert min(circle_distance(c % 1, a) for c in starts[20]) < 1e-9


@pytest.mark.parametrize("name", PAIR_NAMES)
@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(s=small_rationals())
def test_whole_gap_shrinks_onto_the_limits(towers, name, s):
    # off-cycle corners converge too, only more slowly
    tower = towers[name]
    for chain in gap_itinerary(s, tower, 3):
        cls = big_g_class(chain)
        deep = deepest_corners(chain, deep_levels(tower.d))
        for c in deep:
            assert min(circle_distance(c, a) for a in cls.angles) < 1e-9


def test_every_small_rational_is_certified(g_tower):
    for q in range(2, 80):
        for p in range(q):
            s = F(p, q)
            dec = orbit(s, 4)
            for chain in gap_itinerary(s, g_tower, 2):
                assert chain.periodicity == (len(dec.preperiod), dec.period)


@pytest.mark.parametrize("name", PAIR_NAMES)
def test_certified_classes_do_not_cross(towers, name):
    tower = towers[name]
    samples = [F(p, q) for q in (5, 7, 9, 13, 16) for p in range(q)]
    classes = set()
    for s in samples:
        for chain in gap_itinerary(s, tower, 2):
            cls = big_g_class(chain)
            if len(cls) > 1:
                classes.add(cls.angles)
    for a, b in combinations(sorted(classes), 2):
        if set(a) & set(b):
            continue
        assert not sets_cross(a, b)


@pytest.mark.parametrize("name", PAIR_NAMES)
def test_certified_classes_respect_the_level_relation(towers, name):
    # two level-n angles in one chain limit are equivalent at level n
    tower = towers[name]
    for n in range(1, 3):
        level = tower.angles(n)
        rel = tower.relation("white", n)
        for i in range(len(level)):
            for chain in gap_itinerary(level.angle(i), tower, n):
                on_level = [level.index_of(a) for a in big_g_class(chain).angles]
                labels = {int(rel.labels[j]) for j in on_level if j is not None}
                assert len(labels) == 1


def test_approx_class_of_one_eighth(g_tower):
    cls = approx_class(F(2, 16), g_tower, 6)
    assert cls.on_level(g_tower, 1) == [F(2, 16), F(10, 16)]
    assert cls.exact
    assert len(cls.angles) <= size_bound(g_tower)


def test_approx_class_of_generic_point_is_itself(g_tower):
    cls = approx_class(F(1, 5), g_tower, 6)
    assert cls.angles == (F(1, 5),) and cls.exact


@pytest.mark.parametrize("name", PAIR_NAMES)
def test_approx_matches_the_level_relation(towers, name):
    tower = towers[name]
    for n in range(4):
        level = tower.angles(n)
        rel = tower.relation("white", n)
        members = rel.classes()
        for i in range(len(level)):
            cls = approx_class(level.angle(i), tower, n)
            assert len(cls.angles) <= size_bound(tower)
            want = [level.angle(j) for j in members[rel.labels[i]].tolist()]
            assert cls.on_level(tower, n) == sorted(want)


@pytest.mark.parametrize("name", PAIR_NAMES)
@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(s=small_rationals(40))
def test_class_sizes_are_bounded(towers, name, s):
    tower = towers[name]
    cls = approx_class(s, tower, 3)
    assert s in cls.angles
    assert len(cls.angles) <= size_bound(tower)


def test_fatou_class_equals_approx_without_fatou_classes(g_tower):
    for s in (F(0), F(1, 8), F(3, 16), F(1, 5), F(2, 7)):
        assert fatou_class(s, g_tower, 3) == approx_class(s, g_tower, 3)


def test_fatou_class_grows_for_a_periodic_critical_class():
    tower = Tower(synthetic_fatou())
    sizes = []
    for depth in range(2, 6):
        base = approx_class(0, tower, depth)
        wide = fatou_class(0, tower, depth)
        assert set(base.angles) < set(wide.angles)
        assert not wide.exact
        sizes.append(len(wide.angles))
    assert sizes == sorted(set(sizes))


def test_chain_limits_stay_in_the_deepest_gap(g_tower):
    # nearby points off every level: their chain limits sit on the arcs of the shared depth-5 gap
    (chain,) = gap_itinerary(F(1, 5), g_tower, 5)
    starts, _ = chain.lifter.chain(F(1, 5), "right", 5)
    arcs = [(a % 1, lifter_length(chain.lifter, t) / 4**5) for t, a in enumerate(starts[-1])]
    q = 15 * 4**6
    checked = 0
    for p in range(q // 5 - 60, q // 5 + 60):
        its = gap_itinerary(F(p, q), g_tower, 5)
        if len(its) != 1 or its[0].chain != chain.chain:
            continue
        checked += 1
        cls = big_g_class(its[0])
        assert cls.exact
        for a in cls.angles:
            assert any((a - start) % 1 <= length for start, length in arcs)
    assert checked > 10
