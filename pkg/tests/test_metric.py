import math
from fractions import Fraction as F

import numpy as np
import pytest

from satocensus.census import weighted_census
from satocensus.metric import (
    PointCloud,
    binned_semicircle_deviation,
    coupling_variance_bound,
    histogram_sup_error,
    prokhorov_exact,
    prokhorov_subset_oracle,
    prokhorov_upper,
    read_cloud_csv,
    semicircle_density,
    semicircle_mass,
    subsample_cloud,
    wasserstein1,
    write_cloud_csv,
)


def point(x):
    return PointCloud(np.array([[float(x)]]), (F(1),))


def random_cloud(rng, n, dim, dyadic=False):
    pts = rng.normal(size=(n, dim))
    if dyadic:
        raw = rng.random(n) + 0.05
        masses = tuple(F(float(w)) / F(float(raw.sum())) for w in raw)
        # renormalize exactly
        total = sum(masses, F(0))
        masses = tuple(m / total for m in masses)
    else:
        masses = tuple([F(1, n)] * n)
    return PointCloud(pts, masses)


def test_prokhorov_point_mass_examples():
    d0 = point(0.0)
    assert prokhorov_exact(d0, d0) == 0.0
    assert prokhorov_exact(d0, point(0.3)) == 0.3
    mix = PointCloud(np.array([[0.0], [1.0]]), (F(1, 2), F(1, 2)))
    assert prokhorov_exact(mix, d0) == 0.5
    assert prokhorov_exact(d0, mix) == 0.5


def test_prokhorov_matches_subset_oracle():
    rng = np.random.default_rng(2024)
    for trial in range(60):
        n = int(rng.integers(1, 11))
        m = int(rng.integers(1, 11))
        dim = int(rng.integers(1, 3))
        mu = random_cloud(rng, n, dim, dyadic=bool(trial % 3 == 0))
        nu = random_cloud(rng, m, dim)
        exact = prokhorov_exact(mu, nu)
        oracle = prokhorov_subset_oracle(mu, nu)
        assert abs(exact - oracle) < 1e-9, (trial, exact, oracle)
        assert exact <= prokhorov_upper(mu, nu) + 1e-12
        assert exact <= 1.0


def test_prokhorov_metric_axioms():
    rng = np.random.default_rng(99)
    for _ in range(15):
        mu = random_cloud(rng, int(rng.integers(2, 8)), 2)
        nu = random_cloud(rng, int(rng.integers(2, 8)), 2)
        rho = random_cloud(rng, int(rng.integers(2, 8)), 2)
        assert prokhorov_exact(mu, mu) <= 1e-9
        d1 = prokhorov_exact(mu, nu)
        assert abs(d1 - prokhorov_exact(nu, mu)) < 1e-12
        assert d1 <= prokhorov_exact(mu, rho) + prokhorov_exact(rho, nu) + 1e-9


def test_strassen_bound_on_constructed_couplings():
    # build an explicit joint law, compute eps0 = inf{eps: P(|X-Y|>=eps)<=eps},
    # and check pi(marginals) <= eps0
    rng = np.random.default_rng(31)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        xs = rng.normal(size=n)
        ys = xs + rng.normal(scale=0.2, size=n)
        w = rng.random(n)
        w /= w.sum()
        masses = tuple(F(float(v)) for v in w)
        total = sum(masses, F(0))
        masses = tuple(m / total for m in masses)
        mu = PointCloud(xs[:, None], masses)
        nu = PointCloud(ys[:, None], masses)
        gaps = np.abs(xs - ys)
        eps0 = None
        for eps in sorted(set(gaps)) + [1.0]:
            tail = float(sum(m for g, m in zip(gaps, w) if g >= eps))
            if tail <= eps:
                eps0 = eps
                break
        assert prokhorov_exact(mu, nu) <= eps0 + 1e-9


def test_wasserstein_examples():
    assert wasserstein1(point(0.0), point(0.25)) == 0.25
    mix = PointCloud(np.array([[0.0], [1.0]]), (F(1, 2), F(1, 2)))
    assert abs(wasserstein1(point(0.0), mix) - 0.5) < 1e-15
    u1 = PointCloud(np.array([[0.0], [1.0]]), (F(1, 2), F(1, 2)))
    u2 = PointCloud(np.array([[0.5], [1.5]]), (F(1, 2), F(1, 2)))
    assert abs(wasserstein1(u1, u2) - 0.5) < 1e-15


def test_wasserstein_2d_transport():
    # mass must split: half of the origin goes to each unit corner
    mu = PointCloud(np.array([[0.0, 0.0]]), (F(1),))
    nu = PointCloud(np.array([[1.0, 0.0], [0.0, 1.0]]), (F(1, 2), F(1, 2)))
    assert abs(wasserstein1(mu, nu) - 1.0) < 1e-12
    rng = np.random.default_rng(5)
    a = random_cloud(rng, 30, 2)
    b = random_cloud(rng, 40, 2)
    assert abs(wasserstein1(a, b) - wasserstein1(b, a)) < 1e-9
    assert wasserstein1(a, a) < 1e-12


def test_wasserstein_1d_matches_transport():
    rng = np.random.default_rng(12)
    for _ in range(10):
        a = random_cloud(rng, int(rng.integers(2, 20)), 1)
        b = random_cloud(rng, int(rng.integers(2, 20)), 1)
        cdf = wasserstein1(a, b)
        forced_2d = PointCloud(
            np.column_stack([a.points[:, 0], np.zeros(a.n)]), a.masses
        )
        forced_2d_b = PointCloud(
            np.column_stack([b.points[:, 0], np.zeros(b.n)]), b.masses
        )
        assert abs(cdf - wasserstein1(forced_2d, forced_2d_b)) < 1e-9


def test_prokhorov_upper_examples():
    assert prokhorov_upper(point(0.0), point(0.25)) == 0.5
    assert prokhorov_upper(point(0.0), point(0.0)) == 0.0


def test_coupling_variance_bound():
    assert abs(coupling_variance_bound(0.0, 0.001) - 0.1) < 1e-12
    assert coupling_variance_bound(0.05, 0.0) == 0.05
    assert abs(coupling_variance_bound(0.01, 0.008) - 0.21) < 1e-12
    with pytest.raises(ValueError):
        coupling_variance_bound(-0.1, 0.1)


def test_semicircle():
    assert abs(semicircle_mass(-2, 2) - 1) < 1e-12
    assert abs(semicircle_mass(0, 2) - 0.5) < 1e-12
    assert abs(semicircle_mass(-1, 1) - (1 / 3 + math.sqrt(3) / (2 * math.pi))) < 1e-12
    assert semicircle_mass(-5, -2.5) == 0.0
    assert semicircle_density(3.0) == 0.0
    # quadrature cross-check: midpoint rule against the closed form
    for a, b in ((-1.5, 0.3), (0.0, 2.0), (-2.0, -1.9)):
        xs = np.linspace(a, b, 20001)
        mids = (xs[1:] + xs[:-1]) / 2
        quad = sum(semicircle_density(x) for x in mids) * (b - a) / 20000
        assert abs(quad - semicircle_mass(a, b)) < 1e-6


def test_histogram_sup_error_synthetic_semicircle():
    # feed exact semicircle masses through the window statistic
    p = 10007
    census = weighted_census(p)
    h = census.trace_bound
    sqrtp = math.sqrt(p)
    synthetic = {
        t: F(semicircle_mass(t / sqrtp, (t + 1) / sqrtp)) * 2 * p
        for t in range(-h, h + 1)
    }
    census_syn = type(census)(p, synthetic, None)
    for w in (5, 20):
        sup, rows = histogram_sup_error(census_syn, w)
        assert sup <= 2 * math.sqrt(w / sqrtp)
    # sliding windows only add start positions
    sup_d, rows_d = histogram_sup_error(census_syn, 10)
    sup_s, rows_s = histogram_sup_error(census_syn, 10, sliding=True)
    assert sup_s >= sup_d - 1e-15
    assert len(rows_s) > len(rows_d)


def test_histogram_window_validation():
    census = weighted_census(13)
    with pytest.raises(ValueError):
        histogram_sup_error(census, 0)
    with pytest.raises(ValueError):
        histogram_sup_error(census, 15)  # 15 > 4 sqrt(13)


def test_binned_deviation_perfect_input():
    p = 10007
    census = weighted_census(p)
    h = census.trace_bound
    sqrtp = math.sqrt(p)
    synthetic = {
        t: F(semicircle_mass(t / sqrtp, (t + 1) / sqrtp)) * 2 * p
        for t in range(-h, h + 1)
    }
    sup, rows = binned_semicircle_deviation(type(census)(p, synthetic, None), 50)
    # only the two boundary traces of each bin can land in the wrong bin
    assert sup < 2 * semicircle_density(0.0) / sqrtp
    assert len(rows) == 50


def test_subsample_deterministic():
    rng_a = np.random.default_rng(3)
    rng_b = np.random.default_rng(3)
    cloud = PointCloud.uniform(np.random.default_rng(0).normal(size=(50, 2)))
    a, sub_a = subsample_cloud(cloud, 20, rng_a)
    b, _ = subsample_cloud(cloud, 20, rng_b)
    assert sub_a and np.array_equal(a.points, b.points)
    c, sub_c = subsample_cloud(cloud, 100, rng_a)
    assert not sub_c and c is cloud


def test_cloud_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(8)
    for dim in (1, 2):
        cloud = random_cloud(rng, 17, dim, dyadic=True)
        path = tmp_path / f"cloud{dim}.csv"
        write_cloud_csv(cloud, path)
        back = read_cloud_csv(path)
        assert np.allclose(back.points, cloud.points, atol=0, rtol=0)
        assert all(
            abs(a - b) < F(1, 10**12) for a, b in zip(back.masses, cloud.masses)
        )


def test_cloud_validation():
    with pytest.raises(ValueError):
        PointCloud(np.zeros((2, 3)), (F(1, 2), F(1, 2)))  # bad dim
    with pytest.raises(ValueError):
        PointCloud(np.zeros((2, 1)), (F(1, 2), F(1, 4)))  # masses don't sum to 1
    with pytest.raises(ValueError):
        PointCloud(np.zeros((2, 1)), (F(3, 2), F(-1, 2)))  # negative mass
    with pytest.raises(ValueError):
        prokhorov_exact(
            PointCloud.uniform(np.zeros((3, 1))),
            PointCloud.uniform(np.zeros((3, 2))),
        )


def test_support_caps():
    big = PointCloud.uniform(np.random.default_rng(1).normal(size=(60, 2)))
    with pytest.raises(ValueError):
        prokhorov_exact(big, big, support_cap=100)
    with pytest.raises(ValueError):
        wasserstein1(big, big, support_cap=50)
    with pytest.raises(ValueError):
        prokhorov_subset_oracle(big, big)
