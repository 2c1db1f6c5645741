import math
from fractions import Fraction

import numpy as np
import pytest

from satocensus.arith import primes_up_to
from satocensus.classno import hurwitz_class_number
from satocensus.gekeler import (
    CutoffPlan,
    cutoff_plan,
    gekeler_estimate,
    joint_period,
    local_factor,
    local_factor_capped,
    local_factor_value,
    tail_log_product,
    truncated_product,
)


def test_local_factor_examples():
    f = local_factor(3, -7)
    assert (f.delta_exp, f.symbol, f.value) == (0, -1, Fraction(3, 4))
    f = local_factor(3, -63)
    assert (f.delta_exp, f.symbol, f.value) == (1, -1, Fraction(5, 4))
    f = local_factor(2, -16)
    assert (f.delta_exp, f.symbol, f.value) == (1, 0, Fraction(3, 2))
    with pytest.raises(ValueError):
        local_factor(3, -6)
    with pytest.raises(ValueError):
        local_factor(3, 8)


def test_simple_form_when_square_free():
    # l^2 does not divide delta: factor reduces to (1 - (delta|l)/l)^-1
    from satocensus.arith import kronecker, padic_split

    for delta in range(-400, 0):
        if delta % 4 not in (0, 1):
            continue
        for l in (2, 3, 5, 7, 11):
            d, rest = padic_split(delta, l)
            if d == 0:
                s = kronecker(rest % (8 if l == 2 else l), l)
                assert local_factor_value(l, delta) == Fraction(1) / (1 - Fraction(s, l))


def test_factor_bounds():
    for delta in range(-2000, 0):
        if delta % 4 not in (0, 1):
            continue
        for l in (2, 3, 5, 13):
            v = local_factor_value(l, delta)
            assert Fraction(l, l + 1) <= v <= Fraction(l, l - 1)


def test_capped_factor_examples():
    assert local_factor_capped(3, 1, -7) == Fraction(3, 4)
    assert local_factor_capped(3, 1, -9) == Fraction(3, 2)  # frozen deep branch
    assert local_factor_capped(3, 2, -9) == Fraction(5, 4)  # plain factor again


def test_capped_factor_periodic_in_trace():
    # exhaustive for l^(2k) <= 10^4, two working primes
    cases = [(l, k) for l in primes_up_to(100) for k in (1, 2, 3) if l ** (2 * k) <= 10**4]
    for l, k in cases:
        period = l ** (2 * k)
        for p in (7, 10007):
            vals = [local_factor_capped(l, k, t * t - 4 * p) for t in range(period)]
            for t in range(period):
                tt = t + period
                assert local_factor_capped(l, k, tt * tt - 4 * p) == vals[t], (l, k, p, t)


def test_capped_log_error():
    # |log v_capped - log v| <= 4 l^-k on deep-divisibility inputs
    for l in (2, 3, 5):
        for k in (1, 2, 3):
            for mult in (1, 4, 5, 13):
                delta = -(l ** (2 * k)) * mult
                if delta % 4 not in (0, 1):
                    continue
                gap = abs(
                    math.log(float(local_factor_capped(l, k, delta)))
                    - math.log(float(local_factor_value(l, delta)))
                )
                assert gap <= 4 * l**-k, (l, k, mult, gap)


def test_truncated_product_examples():
    assert truncated_product(2, 5, 3) == Fraction(3, 2)
    assert truncated_product(2, 5, 2) == 1
    assert truncated_product(2, 5, 8) == Fraction(315, 256)
    with pytest.raises(ValueError):
        truncated_product(5, 5, 8)  # t^2 >= 4p


def test_estimate_examples():
    assert abs(gekeler_estimate(2, 5, 8) - (4 / math.pi) * 315 / 256) < 1e-12
    assert abs(gekeler_estimate(1, 5, 2) - math.sqrt(19) / math.pi) < 1e-12


def test_estimate_converges_in_median():
    p = 10007
    rng = np.random.default_rng(5)
    h = math.isqrt(4 * p)
    traces = sorted(int(t) for t in rng.choice(2 * h + 1, size=40, replace=False) - h)
    medians = []
    for l0 in (10, 100, 1000, 10000):
        rels = []
        for t in traces:
            exact = float(hurwitz_class_number(t * t - 4 * p))
            rels.append(abs(gekeler_estimate(t, p, l0) - exact) / exact)
        medians.append(float(np.median(rels)))
    assert medians[0] > medians[1] > medians[2] > medians[3], medians


def test_tail_log_product():
    total, dyadic = tail_log_product(2, 5, 3, 8)
    assert abs(total - math.log(105 / 128)) < 1e-12
    assert set(dyadic) == {1, 2}  # primes 3 in [2,4), 5 and 7 in [4,8)
    assert abs(sum(dyadic.values()) - total) < 1e-15
    total, dyadic = tail_log_product(2, 5, 8, 8)
    assert total == 0.0 and dyadic == {}


def test_cutoff_plans():
    assert cutoff_plan(10**6, "grh_poly").l0 == 2637
    assert cutoff_plan(10**6, "unconditional").l0 == 140
    with pytest.raises(ValueError):
        cutoff_plan(10**6, "grh_poly", exponent=0)
    with pytest.raises(ValueError):
        cutoff_plan(13, "unconditional")
    with pytest.raises(ValueError):
        CutoffPlan("grh_poly", 1)
    # plans feed the estimator directly
    est = gekeler_estimate(2, 5, CutoffPlan("grh_poly", 8))
    assert abs(est - gekeler_estimate(2, 5, 8)) < 1e-15


def test_joint_period():
    assert joint_period(3, 1) == 4
    assert joint_period(4, 1) == 36
    assert joint_period(6, 2) == 810000


def test_capped_factors_exactly_independent_over_joint_period():
    # Chinese-remainder independence over one full period: the joint value
    # histogram equals the product of per-factor histograms, exactly.
    # (Each residue tuple occurs exactly once per joint period.)
    p = 10007
    for l1, k in ((6, 1), (6, 2)):
        period = joint_period(l1, k)
        ts = np.arange(period)
        codes = np.zeros(period, dtype=np.int64)
        stride = 1
        sizes = []
        per_factor_counts = []
        for l in primes_up_to(l1):
            m = l ** (2 * k)
            vals = [local_factor_capped(l, k, t * t - 4 * p) for t in range(m)]
            uniq = sorted(set(vals))
            idx = np.array([uniq.index(v) for v in vals])
            codes += stride * idx[ts % m]
            stride *= len(uniq)
            sizes.append(len(uniq))
            per_factor_counts.append(np.bincount(idx, minlength=len(uniq)))
        joint = np.bincount(codes, minlength=stride)
        scale = period // math.prod(l ** (2 * k) for l in primes_up_to(l1))
        assert scale == 1
        for combo in range(stride):
            rem = combo
            prod = 1
            for size, counts in zip(sizes, per_factor_counts):
                prod *= int(counts[rem % size])
                rem //= size
            assert int(joint[combo]) == prod, (l1, k, combo)
