"""Desk-scale experiment drivers: identity verification, vertical and
strong Sato-Tate histograms, the 2D trace/count distribution against its
heuristic model, prime-pattern searches, and isogeny-class-size laws.

Every driver returns an ExperimentReport whose statistics are
bit-reproducible for fixed parameters and seed: sampling streams are
derived from (seed, stream index) and every aggregation runs in a fixed
order independent of thread count.
"""

from __future__ import annotations

import json
import math
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from satocensus import metric, ydist
from satocensus.arith import is_prime, kronecker
from satocensus.census import (
    TraceCensus,
    census_via_class_numbers,
    isogeny_size_distribution,
    weighted_census,
)
from satocensus.classno import hurwitz_class_number
from satocensus.gekeler import gekeler_estimate
from satocensus.metric import PointCloud, subsample_cloud

__all__ = [
    "ExperimentReport",
    "PatternConstraint",
    "find_primes_with_pattern",
    "cached_census",
    "cmd_gekeler_verify",
    "cmd_vertical_st",
    "cmd_strong_st",
    "cmd_2dst",
    "cmd_prime_seq",
    "cmd_isogeny_dist",
    "cmd_truncation",
    "gekeler_trace_rows",
]

ENUM_AUTO_LIMIT = 20_000  # experiments enumerate below this, use H(t^2-4p) above


@dataclass
class ExperimentReport:
    """Structured record of one experiment run."""

    name: str
    params: dict
    stats: dict
    artifacts: list[str] = field(default_factory=list)
    runtime_seconds: float = 0.0

    def to_json(self) -> str:
        payload = {
            "name": self.name,
            "params": self.params,
            "stats": self.stats,
            "artifacts": self.artifacts,
            "runtime_seconds": self.runtime_seconds,
        }
        return json.dumps(payload, sort_keys=True, default=str)

    def save(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{self.name}.json"
        path.write_text(self.to_json() + "\n")
        return path


@dataclass(frozen=True)
class PatternConstraint:
    """Required symbol (p|l) for finitely many odd primes l, plus an
    optional residue class of p: one of '1mod8', '3mod4', '5mod8'."""

    symbols: tuple[tuple[int, int], ...] = ()
    mod8: str | None = None

    def __post_init__(self):
        seen: dict[int, int] = {}
        for l, e in self.symbols:
            if l == 2 or not is_prime(l):
                raise ValueError(f"symbol constraints need odd primes, got {l}")
            if e not in (-1, 1):
                raise ValueError(f"required symbol must be +-1, got {e}")
            if l in seen and seen[l] != e:
                raise ValueError(f"contradictory constraints at l={l}")
            seen[l] = e
        if self.mod8 is not None and self.mod8 not in ("1mod8", "3mod4", "5mod8"):
            raise ValueError(f"bad residue tag {self.mod8!r}")

    def accepts(self, p: int) -> bool:
        if self.mod8 is not None and ydist.two_adic_tag(p) != self.mod8:
            return False
        return all(p % l != 0 and kronecker(p, l) == e for l, e in self.symbols)


def find_primes_with_pattern(
    constraint: PatternConstraint, count: int, start: int = 2
) -> list[int]:
    """First `count` primes >= start satisfying every constraint."""
    out = []
    p = max(2, start)
    while len(out) < count:
        if is_prime(p) and constraint.accepts(p):
            out.append(p)
        p += 1
    return out


_census_cache: dict[tuple[int, str], TraceCensus] = {}
_census_lock = threading.Lock()


def cached_census(p: int, threads: int | None = None, path: str = "auto") -> TraceCensus:
    """Census by enumeration for small p, by class numbers for large p,
    memoized per (p, path)."""
    if path == "auto":
        path = "enum" if p <= ENUM_AUTO_LIMIT else "classno"
    key = (p, path)
    with _census_lock:
        if key in _census_cache:
            return _census_cache[key]
    census = (
        weighted_census(p, threads=threads)
        if path == "enum"
        else census_via_class_numbers(p, threads=threads)
    )
    with _census_lock:
        _census_cache[key] = census
    return census


def _streams(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def cmd_gekeler_verify(
    p_min: int, p_max: int, out_dir=None, threads: int | None = None
) -> ExperimentReport:
    """Check N_{t,p} = H(t^2 - 4p) exactly for every prime in range and
    every trace; non-primes in the range are skipped."""
    if not 2 <= p_min <= p_max <= 500:
        raise ValueError("verification range must sit inside [2, 500]")
    t0 = time.perf_counter()
    mismatches = []
    checked = 0
    primes_done = []
    for p in range(max(p_min, 5), p_max + 1):
        if not is_prime(p):
            continue
        census = weighted_census(p, threads=threads)
        for t in census.traces():
            checked += 1
            expected = hurwitz_class_number(t * t - 4 * p)
            if expected != census.weighted[t]:
                mismatches.append((p, t, str(census.weighted[t]), str(expected)))
        primes_done.append(p)
    report = ExperimentReport(
        name=f"verify_{p_min}_{p_max}",
        params={"p_min": p_min, "p_max": p_max},
        stats={
            "primes_checked": len(primes_done),
            "traces_checked": checked,
            "mismatches": mismatches,
        },
        runtime_seconds=time.perf_counter() - t0,
    )
    if out_dir:
        report.artifacts.append(str(report.save(out_dir)))
    return report


def cmd_vertical_st(
    p: int, bins: int = 50, out_dir=None, threads: int | None = None
) -> ExperimentReport:
    """Constant-bin histogram of normalized traces vs the semicircle."""
    t0 = time.perf_counter()
    census = cached_census(p, threads)
    sup, rows = metric.binned_semicircle_deviation(census, bins)
    report = ExperimentReport(
        name=f"vertical_{p}_{bins}",
        params={"p": p, "bins": bins},
        stats={"sup_deviation": sup},
        runtime_seconds=time.perf_counter() - t0,
    )
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        hist_path = out / f"vertical_{p}_{bins}.csv"
        with open(hist_path, "w") as fh:
            fh.write("lo,hi,empirical,semicircle\n")
            for lo, hi, emp, ref in rows:
                fh.write(f"{lo!r},{hi!r},{emp!r},{ref!r}\n")
        report.artifacts.append(str(hist_path))
        report.artifacts.append(str(report.save(out_dir)))
    return report


def cmd_strong_st(
    p: int,
    alpha: float = 0.2,
    sliding: bool = False,
    out_dir=None,
    threads: int | None = None,
) -> ExperimentReport:
    """Windowed histogram with bin width ceil(p^alpha) traces."""
    if not 0 < alpha < 0.5:
        raise ValueError("alpha must be in (0, 0.5)")
    t0 = time.perf_counter()
    window = math.ceil(p**alpha)
    census = cached_census(p, threads)
    sup, rows = metric.histogram_sup_error(census, window, sliding=sliding)
    report = ExperimentReport(
        name=f"strong_{p}_{alpha}",
        params={"p": p, "alpha": alpha, "window": window, "sliding": sliding},
        stats={"sup_error": sup, "windows": len(rows)},
        runtime_seconds=time.perf_counter() - t0,
    )
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        win_path = out / f"strong_{p}_{alpha}.csv"
        with open(win_path, "w") as fh:
            fh.write("t0,estimate,semicircle\n")
            for t, est, ref in rows:
                fh.write(f"{t},{est!r},{ref!r}\n")
        report.artifacts.append(str(win_path))
        report.artifacts.append(str(report.save(out_dir)))
    return report


def _ks_uniform(xs: np.ndarray, lo: float, hi: float) -> float:
    xs = np.sort(xs)
    n = len(xs)
    cdf = (xs - lo) / (hi - lo)
    upper = np.arange(1, n + 1) / n
    lower = np.arange(0, n) / n
    return float(np.maximum(np.abs(upper - cdf), np.abs(cdf - lower)).max())


def build_trace_cloud(census: TraceCensus) -> PointCloud:
    """The 2D cloud {(t / sqrt p, N_t / 2 sqrt p)}, uniform over traces."""
    p = census.p
    h = census.trace_bound
    sqrtp = math.sqrt(p)
    pts = [
        (t / sqrtp, float(census.weighted[t]) / (2 * sqrtp)) for t in range(-h, h + 1)
    ]
    return PointCloud.uniform(np.array(pts))


def cmd_2dst(
    p: int,
    l1: int = 20,
    k: int = 3,
    n_samples: int = 40_000,
    seed: int = 1,
    prune_eps: float = 1e-9,
    w1_rho_cap: int = 4096,
    w1_heu_cap: int = 512,
    exact_cap: int = 360,
    out_dir=None,
    threads: int | None = None,
) -> ExperimentReport:
    """2D trace/count cloud against its heuristic model.

    Builds the exact cloud (t/sqrt p, N_t/2 sqrt p) and a seeded sample of
    (X, sqrt(4-X^2) Z / 2pi) with X uniform on [-2,2] and Z drawn from the
    truncated error-term law; reports the coupling upper bound and, on
    deterministically subsampled supports, the exact Prokhorov distance.

    Sampling streams do not depend on p, so runs at different primes share
    their random draws and the reported distances compare cleanly; the
    exact cloud enters the transport whole (up to w1_rho_cap points).
    """
    if p < 10**4:
        raise ValueError("2D experiment expects p >= 10^4")
    t0 = time.perf_counter()
    census = cached_census(p, threads)
    rho = build_trace_cloud(census)

    zdist = ydist.error_term_dist(p, l1, k, prune_eps=prune_eps)
    rng_x, rng_z, rng_sub, rng_sub2 = _streams(seed, 4)
    xs = rng_x.random(n_samples) * 4.0 - 2.0
    zs = ydist.sample_with_rng(zdist, n_samples, rng_z)
    ys = np.sqrt(4.0 - xs * xs) * zs / (2 * math.pi)
    heu = PointCloud.uniform(np.column_stack([xs, ys]))

    rho_w1, rho_was_sub = subsample_cloud(rho, w1_rho_cap, rng_sub)
    heu_w1, _ = subsample_cloud(heu, w1_heu_cap, rng_sub)
    w1 = metric.wasserstein1(rho_w1, heu_w1, support_cap=max(w1_rho_cap, 2000))
    upper = min(1.0, math.sqrt(w1))

    rho_px, _ = subsample_cloud(rho, exact_cap, rng_sub2)
    heu_px, _ = subsample_cloud(heu, exact_cap, rng_sub2)
    exact = metric.prokhorov_exact(rho_px, heu_px)

    report = ExperimentReport(
        name=f"twod_{p}",
        params={
            "p": p, "l1": l1, "k": k, "n_samples": n_samples, "seed": seed,
            "prune_eps": prune_eps, "w1_rho_cap": w1_rho_cap,
            "w1_heu_cap": w1_heu_cap, "exact_cap": exact_cap,
        },
        stats={
            "prokhorov_upper": upper,
            "w1_subsampled": w1,
            "prokhorov_exact_subsampled": exact,
            "ks_x_marginal": _ks_uniform(xs, -2.0, 2.0),
            "zdist_support": zdist.support_size(),
            "zdist_pruned_mass": float(zdist.pruned_mass),
            "rho_subsampled": rho_was_sub,
        },
        runtime_seconds=time.perf_counter() - t0,
    )
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rho_path = out / f"twod_{p}_rho.csv"
        heu_path = out / f"twod_{p}_heu.csv"
        metric.write_cloud_csv(rho, rho_path)
        metric.write_cloud_csv(heu, heu_path)
        report.artifacts += [str(rho_path), str(heu_path)]
        report.artifacts.append(str(report.save(out_dir)))
    return report


def cmd_prime_seq(
    constraints,
    count: int = 3,
    l1: int = 5,
    k: int = 2,
    start: int = 3,
    out_dir=None,
) -> ExperimentReport:
    """Truncated error-term laws along pattern-matched prime sequences.

    Primes sharing all class data below l1 must give identical laws
    (distance exactly zero); sequences differing in the 2-adic tag are
    expected to stay separated.
    """
    if isinstance(constraints, PatternConstraint):
        constraints = [constraints]
    t0 = time.perf_counter()
    groups = []
    for c in constraints:
        primes = find_primes_with_pattern(c, count, start)
        dists = [ydist.error_term_dist(p, l1, k) for p in primes]
        groups.append((c, primes, dists))

    def cloud(d: ydist.DiscreteDist) -> PointCloud:
        atoms = d.point_atoms()
        return PointCloud(
            np.array([[float(v)] for v, _ in atoms]), tuple(m for _, m in atoms)
        )

    intra = []
    for _, primes, dists in groups:
        worst = 0.0
        for i in range(len(dists)):
            for j in range(i + 1, len(dists)):
                worst = max(worst, metric.prokhorov_exact(cloud(dists[i]), cloud(dists[j])))
        intra.append(worst)
    cross = []
    for gi in range(len(groups)):
        for gj in range(gi + 1, len(groups)):
            dmin = math.inf
            for da in groups[gi][2]:
                for db in groups[gj][2]:
                    dmin = min(dmin, metric.prokhorov_exact(cloud(da), cloud(db)))
            cross.append(((gi, gj), dmin))
    report = ExperimentReport(
        name="primeseq",
        params={
            "constraints": [
                {"symbols": list(c.symbols), "mod8": c.mod8} for c, _, _ in groups
            ],
            "count": count, "l1": l1, "k": k, "start": start,
        },
        stats={
            "primes": [primes for _, primes, _ in groups],
            "intra_max_distance": intra,
            "cross_min_distance": [[list(idx), d] for idx, d in cross],
        },
        runtime_seconds=time.perf_counter() - t0,
    )
    if out_dir:
        report.artifacts.append(str(report.save(out_dir)))
    return report


def cmd_isogeny_dist(
    p: int,
    weighted: bool = True,
    n_samples: int = 20_000,
    seed: int = 1,
    l1: int = 20,
    k: int = 3,
    out_dir=None,
    threads: int | None = None,
) -> ExperimentReport:
    """Distribution of normalized trace-class sizes N_t / sqrt p, with its
    W1 distance to the sampled heuristic law sqrt(4 - X^2) Z / pi."""
    t0 = time.perf_counter()
    census = cached_census(p, threads, path="enum" if not weighted else "auto")
    dist = isogeny_size_distribution(census, weighted=weighted)
    sqrtp = math.sqrt(p)
    atoms = dist.point_atoms()
    cloud = PointCloud(
        np.array([[float(v) / sqrtp] for v, _ in atoms]), tuple(m for _, m in atoms)
    )
    zdist = ydist.error_term_dist(p, l1, k, prune_eps=1e-9)
    rng_x, rng_z = _streams(seed, 2)
    xs = rng_x.random(n_samples) * 4.0 - 2.0
    zs = ydist.sample_with_rng(zdist, n_samples, rng_z)
    sample = np.sqrt(4.0 - xs * xs) * zs / math.pi
    sample_cloud = PointCloud.uniform(sample[:, None])
    w1 = metric.wasserstein1(cloud, sample_cloud)
    mean, var = ydist.moments(dist)
    report = ExperimentReport(
        name=f"isogeny_{p}",
        params={
            "p": p, "weighted": weighted, "n_samples": n_samples, "seed": seed,
            "l1": l1, "k": k,
        },
        stats={
            "w1_to_heuristic": w1,
            "mean_normalized": float(mean) / sqrtp,
            "support": dist.support_size(),
        },
        runtime_seconds=time.perf_counter() - t0,
    )
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"isogeny_{p}.csv"
        with open(path, "w") as fh:
            fh.write("size_num,size_den,mass_num,mass_den\n")
            for v, m in atoms:
                fh.write(f"{v.numerator},{v.denominator},{m.numerator},{m.denominator}\n")
        report.artifacts.append(str(path))
        report.artifacts.append(str(report.save(out_dir)))
    return report


def gekeler_trace_rows(p: int, l0: int, traces, k: int | None = None):
    """Per-trace comparison rows (t, delta, exact num/den, estimate,
    relative error) between H(t^2 - 4p) and the truncated product."""
    rows = []
    for t in traces:
        delta = t * t - 4 * p
        exact = hurwitz_class_number(delta)
        est = gekeler_estimate(t, p, l0, k=k)
        rel = abs(est - float(exact)) / float(exact)
        rows.append((t, delta, exact.numerator, exact.denominator, est, rel))
    return rows


def cmd_truncation(
    p: int,
    l0_values=(20, 200, 2637),
    count: int = 200,
    seed: int = 1,
    rel_threshold: float = 0.1,
    out_dir=None,
    threads: int | None = None,
) -> ExperimentReport:
    """Truncated-product accuracy sweep over seeded random traces.

    Reports the median relative error per cutoff and the number of
    exceptional traces (relative error above rel_threshold) at the
    largest cutoff.
    """
    t0 = time.perf_counter()
    (rng,) = _streams(seed, 1)
    h = math.isqrt(4 * p)
    traces = sorted(int(t) for t in rng.choice(2 * h + 1, size=count, replace=False) - h)
    medians = {}
    exceptions = 0
    for l0 in sorted(l0_values):
        rels = [row[5] for row in gekeler_trace_rows(p, l0, traces)]
        medians[str(l0)] = float(np.median(rels))
        if l0 == max(l0_values):
            exceptions = int(sum(r > rel_threshold for r in rels))
    report = ExperimentReport(
        name=f"truncation_{p}",
        params={
            "p": p, "l0_values": list(l0_values), "count": count, "seed": seed,
            "rel_threshold": rel_threshold,
        },
        stats={"median_rel_error": medians, "exceptions_at_max_l0": exceptions},
        runtime_seconds=time.perf_counter() - t0,
    )
    if out_dir:
        report.artifacts.append(str(report.save(out_dir)))
    return report
