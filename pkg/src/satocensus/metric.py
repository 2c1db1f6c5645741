"""Distances between finite distributions: exact Levy-Prokhorov via
threshold max-flow feasibility, an exhaustive-subset oracle, Wasserstein-1,
coupling upper bounds, and the semicircle reference law with its windowed
histogram deviations.

Masses travel as exact rationals and are scaled to a common integer
denominator before any flow runs, so feasibility checks are exact integer
comparisons; only ground distances are floats (documented tolerance 1e-12).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from satocensus import backend

__all__ = [
    "PointCloud",
    "prokhorov_exact",
    "prokhorov_subset_oracle",
    "wasserstein1",
    "prokhorov_upper",
    "coupling_variance_bound",
    "semicircle_density",
    "semicircle_mass",
    "histogram_sup_error",
    "binned_semicircle_deviation",
    "subsample_cloud",
    "write_cloud_csv",
    "read_cloud_csv",
]

MASS_TOLERANCE = Fraction(1, 10**12)
PROKHOROV_SUPPORT_CAP = 5000
W1_SUPPORT_CAP = 2000


@dataclass(frozen=True)
class PointCloud:
    """Weighted finite point set in R^1 or R^2.

    points: float array of shape (n, dim); masses: exact Fractions summing
    to 1 within 1e-12 (float masses are converted exactly, being dyadic).
    """

    points: np.ndarray
    masses: tuple[Fraction, ...]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] not in (1, 2):
            raise ValueError("points must be (n,), (n,1) or (n,2)")
        object.__setattr__(self, "points", pts)
        masses = tuple(
            m if isinstance(m, Fraction) else Fraction(m) for m in self.masses
        )
        object.__setattr__(self, "masses", masses)
        if len(masses) != pts.shape[0]:
            raise ValueError("one mass per point required")
        if any(m < 0 for m in masses):
            raise ValueError("masses must be nonnegative")
        total = sum(masses, Fraction(0))
        if abs(total - 1) > MASS_TOLERANCE:
            raise ValueError(f"masses sum to {float(total)}, not 1")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @classmethod
    def uniform(cls, points) -> "PointCloud":
        pts = np.asarray(points, dtype=np.float64)
        n = pts.shape[0]
        return cls(pts, tuple([Fraction(1, n)] * n))


def _distances(mu: PointCloud, nu: PointCloud) -> np.ndarray:
    if mu.dim != nu.dim:
        raise ValueError("clouds have different dimensions")
    if mu.dim == 1:
        return np.abs(mu.points[:, 0, None] - nu.points[None, :, 0])
    dx = mu.points[:, None, :] - nu.points[None, :, :]
    return np.sqrt((dx * dx).sum(axis=2))


def _largest_remainder(values: list[Fraction], target: int) -> np.ndarray:
    """Round a list of nonnegative rationals to integers preserving the sum."""
    base = [int(v) for v in values]
    short = target - sum(base)
    assert short >= 0, "mass total exceeds target"
    order = sorted(range(len(values)), key=lambda i: (base[i] - values[i], i))
    out = np.array(base, dtype=np.int64)
    for i in order[:short]:
        out[i] += 1
    return out


def _integer_masses(mu: PointCloud, nu: PointCloud) -> tuple[np.ndarray, np.ndarray, int]:
    """Scale both mass vectors to integers with a common denominator.

    Exact whenever the common denominator fits comfortably in int64;
    otherwise quantized at 2^45 with largest-remainder rounding (error
    well below the advertised 1e-12 tolerance).
    """
    scale = 1
    for m in list(mu.masses) + list(nu.masses):
        scale = scale * m.denominator // math.gcd(scale, m.denominator)
        if scale > 2**60:
            scale = 2**45
            break
    supply = _largest_remainder([m * scale for m in mu.masses], scale)
    demand = _largest_remainder([m * scale for m in nu.masses], scale)
    return supply, demand, scale


def prokhorov_exact(
    mu: PointCloud, nu: PointCloud, support_cap: int = PROKHOROV_SUPPORT_CAP
) -> float:
    """Exact Levy-Prokhorov distance between finite discrete measures.

    Strassen duality on finite supports: at threshold eps, the worst
    additive slack max_A [mu(A) - nu(A^eps)] equals 1 - maxflow of the
    bipartite graph joining points within distance eps.  The slack is a
    nonincreasing step function of eps with jumps at pairwise distances,
    so pi = min_i max(d_i, slack_i), located by monotone bisection.  Both
    one-sided conditions are computed (they agree; checked).
    """
    if mu.n + nu.n > support_cap:
        raise ValueError(
            f"combined support {mu.n + nu.n} exceeds cap {support_cap}; "
            "use prokhorov_upper"
        )
    dist = _distances(mu, nu)
    thresholds = np.unique(dist)
    if thresholds.size == 0 or thresholds[0] > 0.0:
        thresholds = np.concatenate(([0.0], thresholds))
    supply, demand, scale = _integer_masses(mu, nu)
    dist_t = np.ascontiguousarray(dist.T)

    slack_cache: dict[int, float] = {}

    def slack(i: int) -> float:
        if i not in slack_cache:
            eps = float(thresholds[i])
            fwd = int(backend.dinic_maxflow(dist, eps, supply, demand))
            bwd = int(backend.dinic_maxflow(dist_t, eps, demand, supply))
            assert fwd == bwd, "one-sided Strassen checks disagree"
            slack_cache[i] = (scale - fwd) / scale
        return slack_cache[i]

    lo, hi = 0, thresholds.size - 1
    if slack(lo) <= thresholds[lo]:
        return 0.0
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if slack(mid) <= thresholds[mid]:
            hi = mid
        else:
            lo = mid
    # hi is the first threshold index satisfying slack <= threshold
    return min(float(thresholds[hi]), slack(lo))


def prokhorov_subset_oracle(mu: PointCloud, nu: PointCloud) -> float:
    """Levy-Prokhorov by exhaustive enumeration of all subsets A, for
    supports of at most 10 points each.  Test oracle for prokhorov_exact."""
    n, m = mu.n, nu.n
    if n > 10 or m > 10:
        raise ValueError("subset oracle supports at most 10 points per side")
    dist = _distances(mu, nu)
    supply, demand, scale = _integer_masses(mu, nu)
    thresholds = np.unique(np.concatenate(([0.0], dist.ravel())))

    mu_sum = _subset_sums(supply)
    nu_sum = _subset_sums(demand)

    best = math.inf
    for eps in thresholds:
        within = dist <= eps
        g = max(
            _worst_slack(within, supply, mu_sum, nu_sum),
            _worst_slack(within.T, demand, nu_sum, mu_sum),
        )
        best = min(best, max(float(eps), g / scale))
    return best


def _subset_sums(weights: np.ndarray) -> np.ndarray:
    n = len(weights)
    out = np.zeros(1 << n, dtype=np.int64)
    for mask in range(1, 1 << n):
        low = mask & -mask
        out[mask] = out[mask ^ low] + weights[low.bit_length() - 1]
    return out


def _worst_slack(within, a_weights, a_sums, b_sums) -> int:
    n = within.shape[0]
    nbr = [0] * n
    for i in range(n):
        mask = 0
        for j in np.nonzero(within[i])[0]:
            mask |= 1 << int(j)
        nbr[i] = mask
    worst = 0
    grown = np.zeros(1 << n, dtype=np.int64)
    for mask in range(1, 1 << n):
        low = mask & -mask
        grown[mask] = grown[mask ^ low] | nbr[low.bit_length() - 1]
        worst = max(worst, int(a_sums[mask]) - int(b_sums[grown[mask]]))
    return worst


def wasserstein1(
    mu: PointCloud, nu: PointCloud, support_cap: int = W1_SUPPORT_CAP
) -> float:
    """W1 distance: closed-form CDF integral in one dimension, exact
    min-cost transport on the supports in two."""
    if mu.dim != nu.dim:
        raise ValueError("clouds have different dimensions")
    if mu.dim == 1:
        return _wasserstein1_1d(mu, nu)
    if mu.n > support_cap or nu.n > support_cap:
        raise ValueError(
            f"2D transport capped at {support_cap} points per side; subsample first"
        )
    supply, demand, scale = _integer_masses(mu, nu)
    cost = float(backend.transport_cost(_distances(mu, nu), supply, demand))
    return cost / scale


def _wasserstein1_1d(mu: PointCloud, nu: PointCloud) -> float:
    events = [(float(x), m, 0) for x, m in zip(mu.points[:, 0], mu.masses)]
    events += [(float(x), m, 1) for x, m in zip(nu.points[:, 0], nu.masses)]
    events.sort(key=lambda e: e[0])
    total = 0.0
    fdiff = Fraction(0)
    prev = events[0][0]
    for x, m, side in events:
        total += abs(float(fdiff)) * (x - prev)
        fdiff += m if side == 0 else -m
        prev = x
    return total


def prokhorov_upper(mu: PointCloud, nu: PointCloud, **kwargs) -> float:
    """Coupling upper bound min(1, sqrt(W1)): the optimal W1 coupling plus
    Markov's inequality give P(|X-Y| >= sqrt(W1)) <= sqrt(W1)."""
    return min(1.0, math.sqrt(wasserstein1(mu, nu, **kwargs)))


def coupling_variance_bound(mean_diff_bound: float, variance_bound: float) -> float:
    """delta + eps^(1/3): Prokhorov bound from a coupling with mean
    difference <= delta and variance <= eps (Chebyshev)."""
    if mean_diff_bound < 0 or variance_bound < 0:
        raise ValueError("bounds must be nonnegative")
    return mean_diff_bound + variance_bound ** (1 / 3)


def semicircle_density(x: float) -> float:
    """Density sqrt(4 - x^2) / (2 pi) on [-2, 2] (0 outside)."""
    if x <= -2 or x >= 2:
        return 0.0
    return math.sqrt(4 - x * x) / (2 * math.pi)


def _semicircle_cdf_raw(x: float) -> float:
    return (x * math.sqrt(4 - x * x) / 2 + 2 * math.asin(x / 2)) / (2 * math.pi)


def semicircle_mass(a: float, b: float) -> float:
    """Semicircle mass of [a, b], endpoints clamped to [-2, 2]."""
    a = min(2.0, max(-2.0, a))
    b = min(2.0, max(-2.0, b))
    if b <= a:
        return 0.0
    return _semicircle_cdf_raw(b) - _semicircle_cdf_raw(a)


def histogram_sup_error(census, window: int, sliding: bool = False):
    """Sup over trace windows [t0, t0 + w) of the deviation between the
    windowed curve-count density and the semicircle density at the window's
    left edge:

        | sum_{t in window} N_t / ((w / sqrt p) * 2p)  -  density(t0 / sqrt p) |

    Windows step by w (disjoint bins) by default, by 1 when sliding.
    Returns (sup, rows) with one (t0, estimate, reference) row per window.
    """
    p = census.p
    if window < 1:
        raise ValueError("window must be >= 1")
    if window > 4 * math.sqrt(p):
        raise ValueError(f"window {window} exceeds the trace range 4*sqrt(p)")
    h = census.trace_bound
    sqrtp = math.sqrt(p)
    step = 1 if sliding else window
    rows = []
    sup = 0.0
    for t0 in range(-h, h - window + 2, step):
        mass = sum(
            (census.weighted.get(t, Fraction(0)) for t in range(t0, t0 + window)),
            Fraction(0),
        )
        est = float(mass) * sqrtp / (window * 2 * p)
        ref = semicircle_density(t0 / sqrtp)
        rows.append((t0, est, ref))
        sup = max(sup, abs(est - ref))
    return sup, rows


def binned_semicircle_deviation(census, bins: int):
    """Constant-bin histogram of normalized traces against exact semicircle
    bin masses.  Returns (sup deviation, rows (lo, hi, empirical, reference))."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    p = census.p
    h = census.trace_bound
    sqrtp = math.sqrt(p)
    width = 4.0 / bins
    masses = [Fraction(0)] * bins
    for t, w in census.weighted.items():
        idx = int((t / sqrtp + 2.0) / width)
        idx = min(max(idx, 0), bins - 1)
        masses[idx] += w
    total = Fraction(2 * p)
    rows = []
    sup = 0.0
    for i in range(bins):
        lo = -2.0 + i * width
        hi = lo + width
        emp = float(masses[i] / total)
        ref = semicircle_mass(lo, hi)
        rows.append((lo, hi, emp, ref))
        sup = max(sup, abs(emp - ref))
    return sup, rows


def subsample_cloud(
    cloud: PointCloud, cap: int, rng: np.random.Generator
) -> tuple[PointCloud, bool]:
    """Deterministic (given rng) mass-weighted subsample to at most cap
    points with uniform masses; returns (cloud, whether subsampled)."""
    if cloud.n <= cap:
        return cloud, False
    weights = np.array([float(m) for m in cloud.masses])
    weights /= weights.sum()
    idx = np.sort(rng.choice(cloud.n, size=cap, replace=False, p=weights))
    return PointCloud.uniform(cloud.points[idx]), True


def write_cloud_csv(cloud: PointCloud, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "mass"] if cloud.dim == 1 else ["x", "y", "mass"])
        for pt, m in zip(cloud.points, cloud.masses):
            writer.writerow([repr(float(c)) for c in pt] + [repr(float(m))])


def read_cloud_csv(path: str | Path) -> PointCloud:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header not in (["x", "mass"], ["x", "y", "mass"]):
            raise ValueError(f"unexpected cloud header {header}")
        pts = []
        masses = []
        for row in reader:
            pts.append([float(c) for c in row[:-1]])
            masses.append(Fraction(float(row[-1])))
    return PointCloud(np.array(pts), tuple(masses))
