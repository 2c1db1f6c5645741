import math
from fractions import Fraction

import pytest

from satocensus.census import (
    census_via_class_numbers,
    curve_class,
    isogeny_size_distribution,
    point_count_trace,
    read_census_csv,
    slow_pair_census,
    weighted_census,
    write_census_csv,
)
from satocensus.classno import hurwitz_class_number

P5_WEIGHTED = {
    0: Fraction(2), 1: Fraction(1), -1: Fraction(1),
    2: Fraction(3, 2), -2: Fraction(3, 2), 3: Fraction(1), -3: Fraction(1),
    4: Fraction(1, 2), -4: Fraction(1, 2),
}


def test_point_count_trace_examples():
    assert point_count_trace(1, 1, 5) == -3  # 9 points
    assert point_count_trace(0, 1, 5) == 0  # j=0 supersingular, 5 = 2 mod 3
    assert point_count_trace(1, 0, 7) == 0  # j=1728 supersingular, 7 = 3 mod 4
    with pytest.raises(ValueError):
        point_count_trace(0, 0, 5)  # singular
    with pytest.raises(ValueError):
        point_count_trace(1, 1, 9)  # not prime


def test_weighted_census_p5_table():
    c = weighted_census(5)
    assert c.weighted == P5_WEIGHTED
    assert c.unweighted == {0: 2, 1: 1, -1: 1, 2: 2, -2: 2, 3: 1, -3: 1, 4: 1, -4: 1}
    assert c.total_weight() == 10


def test_mass_formula_and_symmetry():
    for p in (5, 7, 11, 101, 1009):
        c = weighted_census(p)
        assert c.total_weight() == 2 * p
        for t in c.traces():
            assert c.weighted[t] == c.weighted[-t]
            assert t * t <= 4 * p


def test_oracle_agreement_small_primes():
    for p in (5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61):
        fast = weighted_census(p)
        slow = slow_pair_census(p)
        assert fast.weighted == slow.weighted, p
        assert fast.unweighted == slow.unweighted, p


def test_weighted_vs_unweighted_differences_bounded():
    for p in (5, 13, 61, 97, 193, 1009):
        c = weighted_census(p)
        diffs = [t for t in c.traces() if c.weighted[t] != c.unweighted[t]]
        assert len(diffs) <= 10, (p, diffs)


def test_census_threads_match_sequential():
    a = weighted_census(4999)
    b = weighted_census(4999, threads=2)
    assert a.weighted == b.weighted and a.unweighted == b.unweighted


def test_class_number_census_examples():
    c = census_via_class_numbers(5)
    assert c.weighted == P5_WEIGHTED
    assert c.unweighted is None
    assert hurwitz_class_number(4 - 20) == Fraction(3, 2)
    assert hurwitz_class_number(1 - 20) == 1


def test_class_number_census_matches_enumeration_at_10007():
    assert census_via_class_numbers(10007, threads=2).weighted == \
        weighted_census(10007, threads=2).weighted


def test_census_validation():
    for bad in (2, 3, 4, 15):
        with pytest.raises(ValueError):
            weighted_census(bad)
    with pytest.raises(ValueError):
        slow_pair_census(503)  # beyond the O(p^3) oracle ceiling


def test_curve_class_fields():
    cc = curve_class(0, 1, 7)  # j = 0, 7 = 1 mod 3: six automorphisms
    assert cc.j == 0 and cc.aut_order == 6
    cc = curve_class(1, 0, 5)  # j = 1728, 5 = 1 mod 4: four automorphisms
    assert cc.j == 1728 % 5 and cc.aut_order == 4
    cc = curve_class(1, 1, 5)
    assert cc.aut_order == 2 and cc.trace == -3


def test_isogeny_size_distribution_p5():
    dist = isogeny_size_distribution(weighted_census(5))
    assert dict(dist.atoms) == {
        Fraction(1, 2): Fraction(2, 9),
        Fraction(1): Fraction(4, 9),
        Fraction(3, 2): Fraction(2, 9),
        Fraction(2): Fraction(1, 9),
    }
    total = sum((m for _, m in dist.atoms), Fraction(0))
    assert total == 1


def test_isogeny_distribution_mean_scales_like_half():
    p = 10007
    dist = isogeny_size_distribution(weighted_census(p))
    mean = sum((v * m for v, m in dist.atoms), Fraction(0))
    assert abs(float(mean) / math.sqrt(p) - 0.5) < 0.01


def test_census_csv_roundtrip(tmp_path):
    c = weighted_census(13)
    path = tmp_path / "census13.csv"
    write_census_csv(c, path)
    back = read_census_csv(path, 13)
    assert back.weighted == c.weighted and back.unweighted == c.unweighted
    cc = census_via_class_numbers(13)
    write_census_csv(cc, path)
    back = read_census_csv(path, 13)
    assert back.weighted == cc.weighted and back.unweighted is None
