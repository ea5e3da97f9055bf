from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lamina.angle import (
    as_angle,
    cyclic_between,
    format_angle,
    mu,
    orbit,
    parse_angle,
    preimages,
    reduce,
    sets_cross,
)

angles = st.builds(lambda p, q: Fraction(p % q, q), st.integers(0, 10**6), st.integers(1, 5000))
degrees = st.integers(2, 7)


def test_reduce_normalises_into_unit_interval():
    assert reduce(9, 8) == Fraction(1, 8)
    assert reduce(-1, 4) == Fraction(3, 4)
    assert reduce(2, 16) == Fraction(1, 8)


def test_reduce_rejects_bad_denominator():
    with pytest.raises(ValueError):
        reduce(1, 0)
    with pytest.raises(ValueError):
        reduce(1, -3)


def test_parse_and_format_round_trip():
    assert parse_angle("10/16") == Fraction(5, 8)
    assert parse_angle("0") == 0
    assert format_angle(Fraction(5, 8)) == "5/8"
    with pytest.raises(ValueError):
        parse_angle("one half")


def test_mu_known_values():
    assert mu(Fraction(1, 5), 4) == Fraction(4, 5)
    assert mu(Fraction(4, 5), 4) == Fraction(1, 5)
    assert mu(Fraction(1, 3), 2) == Fraction(2, 3)


def test_orbit_of_one_fifth_has_period_two():
    dec = orbit(Fraction(1, 5), 4)
    assert dec.preperiod == ()
    assert dec.period == 2


def test_orbit_preperiodic():
    dec = orbit(Fraction(1, 8), 4)
    assert dec.preperiod == (Fraction(1, 8), Fraction(1, 2))
    assert dec.cycle == (Fraction(0),)


def test_cyclic_between_wraps():
    assert cyclic_between(Fraction(7, 8), Fraction(0), Fraction(1, 8))
    assert not cyclic_between(Fraction(1, 8), Fraction(0), Fraction(7, 8))
    with pytest.raises(ValueError):
        cyclic_between(Fraction(0), Fraction(0), Fraction(1, 2))


def test_sets_cross_examples():
    assert sets_cross([Fraction(1, 8), Fraction(5, 8)], [Fraction(3, 16), Fraction(15, 16)])
    assert not sets_cross([Fraction(1, 8), Fraction(5, 8)], [Fraction(3, 16), Fraction(7, 16)])
    with pytest.raises(ValueError):
        sets_cross([Fraction(0)], [Fraction(0), Fraction(1, 2)])


@given(angles, degrees)
def test_every_preimage_maps_back(a, d):
    pre = preimages(a, d)
    assert len(pre) == d
    assert pre == sorted(pre)
    assert all(mu(b, d) == a for b in pre)


@given(angles, degrees)
def test_orbit_is_eventually_periodic(a, d):
    dec = orbit(a, d)
    points = list(dec.preperiod) + list(dec.cycle)
    assert len(set(points)) == len(points)
    assert mu(dec.cycle[-1], d) == dec.cycle[0]
    assert points[0] == a


@given(angles, angles, angles)
def test_cyclic_between_is_a_cyclic_order(a, b, c):
    if len({a, b, c}) < 3:
        return
    assert cyclic_between(a, b, c) != cyclic_between(a, c, b)
    assert cyclic_between(a, b, c) == cyclic_between(b, c, a)


@given(st.lists(angles, min_size=4, max_size=4, unique=True))
def test_sets_cross_matches_interleaving(points):
    a, b, c, d = sorted(points)
    assert sets_cross([a, c], [b, d])
    assert not sets_cross([a, b], [c, d])
    assert not sets_cross([a, d], [b, c])


def test_as_angle_accepts_ints_and_strings():
    assert as_angle(3) == 0
    assert as_angle("3/2") == Fraction(1, 2)
