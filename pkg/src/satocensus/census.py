"""Exact censuses of elliptic curves over F_p grouped by Frobenius trace.

Three routes to the same data:

* `weighted_census` - the production path: one representative curve per
  j-invariant, one character-sum point count, explicit twist bookkeeping.
  O(p^2), feasible to p ~ 2*10^5 with the compiled kernels.
* `slow_pair_census` - the O(p^3) oracle: point-counts every nonsingular
  pair (a, b) and divides orbit sizes out exactly.  p <= 500.
* `census_via_class_numbers` - Hurwitz class numbers H(t^2 - 4p) per trace;
  the identity with `weighted_census` is the suite's central check.

Weighted counts are exact Fractions end to end.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from satocensus import backend
from satocensus.arith import is_prime, primitive_root
from satocensus.classno import hurwitz_class_number
from satocensus.ydist import DiscreteDist

__all__ = [
    "CENSUS_P_MAX",
    "CurveClass",
    "TraceCensus",
    "point_count_trace",
    "curve_class",
    "weighted_census",
    "slow_pair_census",
    "census_via_class_numbers",
    "isogeny_size_distribution",
    "write_census_csv",
    "read_census_csv",
]

CENSUS_P_MAX = 200_000  # enumeration ceiling for weighted_census
PAIR_P_MAX = 500  # O(p^3) oracle ceiling

CSV_HEADER = ["t", "weighted_num", "weighted_den", "unweighted"]


@dataclass(frozen=True)
class CurveClass:
    """One F_p-isomorphism class y^2 = x^3 + ax + b with its invariants."""

    p: int
    a: int
    b: int
    j: int
    trace: int
    aut_order: int


@dataclass
class TraceCensus:
    """Per-prime map t -> (weighted count, unweighted count).

    weighted[t] is the number of classes of trace t, each weighted
    2/#Aut (an exact Fraction); unweighted[t] is the plain class count
    (None for class-number-backed censuses).
    """

    p: int
    weighted: dict[int, Fraction]
    unweighted: dict[int, int] | None = None

    @property
    def trace_bound(self) -> int:
        return math.isqrt(4 * self.p)

    def total_weight(self) -> Fraction:
        return sum(self.weighted.values(), Fraction(0))

    def traces(self) -> list[int]:
        return sorted(self.weighted)


def _check_census_prime(p: int, p_max: int) -> None:
    if p <= 3:
        raise ValueError(f"census needs p > 3, got {p}")
    if p > p_max:
        raise ValueError(f"p={p} beyond supported ceiling {p_max}")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


@lru_cache(maxsize=4)
def _tables(p: int):
    """(chi, cube, inv): quadratic character, x^3 mod p, inverse tables."""
    x = np.arange(p, dtype=np.int64)
    chi = np.full(p, -1, dtype=np.int8)
    chi[x * x % p] = 1
    chi[0] = 0
    cube = x * x % p * x % p
    inv = np.zeros(p, dtype=np.int64)
    backend.inverse_table(p, inv)
    return chi, cube, inv


def point_count_trace(a: int, b: int, p: int) -> int:
    """t = p + 1 - #E(F_p) for y^2 = x^3 + ax + b, via the character sum
    t = -sum_x chi(x^3 + ax + b)."""
    _check_census_prime(p, CENSUS_P_MAX)
    a %= p
    b %= p
    if (4 * a * a * a + 27 * b * b) % p == 0:
        raise ValueError(f"singular curve a={a}, b={b} over F_{p}")
    chi, cube, _ = _tables(p)
    t = int(backend.curve_trace(p, a, b, chi, cube))
    assert t * t <= 4 * p, "Hasse bound violated; kernel bug"
    return t


def _j_invariant(a: int, b: int, p: int) -> int:
    num = 1728 * 4 * pow(a, 3, p) % p
    den = (4 * pow(a, 3, p) + 27 * pow(b, 2, p)) % p
    return num * pow(den, -1, p) % p


def curve_class(a: int, b: int, p: int) -> CurveClass:
    t = point_count_trace(a, b, p)
    j = _j_invariant(a % p, b % p, p)
    if j == 0:
        aut = math.gcd(6, p - 1)
    elif j == 1728 % p:
        aut = math.gcd(4, p - 1)
    else:
        aut = 2
    return CurveClass(p, a % p, b % p, j, t, aut)


def weighted_census(p: int, threads: int | None = None) -> TraceCensus:
    """Full census of F_p-classes by trace, weighted 2/#Aut, plus plain
    class counts.

    One curve per generic j (quadratic twist pair handled by symmetry);
    j = 0 and j = 1728 enumerate their gcd(6, p-1) sextic / gcd(4, p-1)
    quartic twist classes explicitly.
    """
    _check_census_prime(p, CENSUS_P_MAX)
    chi, cube, inv = _tables(p)
    h = math.isqrt(4 * p)
    hist = np.zeros(2 * h + 1, dtype=np.int64)

    nthreads = threads or 1
    if nthreads > 1 and backend.BACKEND == "c" and p > 4096:
        bounds = np.linspace(0, p, 2 * nthreads + 1).astype(int)
        parts = [np.zeros_like(hist) for _ in range(len(bounds) - 1)]
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            futures = [
                pool.submit(
                    backend.generic_j_hist,
                    p, int(lo), int(hi), chi, cube, inv, part,
                )
                for lo, hi, part in zip(bounds, bounds[1:], parts)
            ]
            for f in futures:
                f.result()
        for part in parts:
            hist += part
    else:
        backend.generic_j_hist(p, 0, p, chi, cube, inv, hist)

    weighted = {t: Fraction(int(hist[t + h])) for t in range(-h, h + 1)}
    unweighted = {t: int(hist[t + h]) for t in range(-h, h + 1)}

    g = primitive_root(p)
    for exponent_gcd, fixed in ((math.gcd(6, p - 1), "b"), (math.gcd(4, p - 1), "a")):
        for i in range(exponent_gcd):
            coeff = pow(g, i, p)
            a, b = (0, coeff) if fixed == "b" else (coeff, 0)
            t = int(backend.curve_trace(p, a, b, chi, cube))
            weighted[t] += Fraction(2, exponent_gcd)
            unweighted[t] += 1
    return TraceCensus(p, weighted, unweighted)


def slow_pair_census(p: int) -> TraceCensus:
    """Census by brute force over all nonsingular (a, b) pairs.

    Each class of automorphism order w covers (p-1)/w pairs, so
    N_t = 2 * #pairs(t) / (p-1) and N'_t = (sum of w over pairs) / (p-1),
    both exact.
    """
    _check_census_prime(p, PAIR_P_MAX)
    chi, cube, _ = _tables(p)
    h = math.isqrt(4 * p)
    pair_hist = np.zeros(2 * h + 1, dtype=np.int64)
    aut_hist = np.zeros(2 * h + 1, dtype=np.int64)
    backend.pair_census_hists(p, chi, cube, pair_hist, aut_hist)
    weighted = {}
    unweighted = {}
    for t in range(-h, h + 1):
        weighted[t] = Fraction(2 * int(pair_hist[t + h]), p - 1)
        q, r = divmod(int(aut_hist[t + h]), p - 1)
        assert r == 0, "orbit counting broke: aut sum not divisible by p-1"
        unweighted[t] = q
    return TraceCensus(p, weighted, unweighted)


def census_via_class_numbers(p: int, threads: int | None = None) -> TraceCensus:
    """Weighted census from Hurwitz class numbers: N_t := H(t^2 - 4p).

    The identity with the enumeration census is exercised for p <= 199 by
    the acceptance suite; this is the only census route for large p.
    """
    if p <= 3 or not is_prime(p):
        raise ValueError(f"need a prime p > 3, got {p}")
    h = math.isqrt(4 * p)
    ts = range(0, h + 1)

    def value(t: int) -> Fraction:
        return hurwitz_class_number(t * t - 4 * p)

    nthreads = threads or 1
    if nthreads > 1 and backend.BACKEND == "c":
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            values = list(pool.map(value, ts))
    else:
        values = [value(t) for t in ts]
    weighted = {}
    for t, v in zip(ts, values):
        weighted[t] = v
        weighted[-t] = v
    return TraceCensus(p, weighted, None)


def isogeny_size_distribution(census: TraceCensus, weighted: bool = True) -> DiscreteDist:
    """Law of the trace-class size over a uniformly random trace in
    [-floor(2 sqrt p), floor(2 sqrt p)]."""
    h = census.trace_bound
    counts = census.weighted if weighted else census.unweighted
    if counts is None:
        raise ValueError("census has no unweighted counts")
    n = 2 * h + 1
    pairs = [(Fraction(counts.get(t, 0)), Fraction(1, n)) for t in range(-h, h + 1)]
    return DiscreteDist.from_pairs(pairs)


def write_census_csv(census: TraceCensus, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for t in census.traces():
            w = census.weighted[t]
            u = "" if census.unweighted is None else census.unweighted[t]
            writer.writerow([t, w.numerator, w.denominator, u])


def read_census_csv(path: str | Path, p: int) -> TraceCensus:
    weighted: dict[int, Fraction] = {}
    unweighted: dict[int, int] = {}
    has_unweighted = True
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected census header {header}")
        for row in reader:
            t = int(row[0])
            weighted[t] = Fraction(int(row[1]), int(row[2]))
            if row[3] == "":
                has_unweighted = False
            else:
                unweighted[t] = int(row[3])
    return TraceCensus(p, weighted, unweighted if has_unweighted else None)
