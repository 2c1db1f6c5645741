"""Exact laws of the local Euler factors and their finite products.

A factor's law at a prime l depends only on coarse class data of the
working prime p: the Legendre symbol (p|l) for odd l, and p mod 8 for
l = 2.  The closed-form tables carry two infinite geometric families in
the split cases; these are truncated at a configurable depth with the
remaining mass parked at the limit value, while moments are evaluated
from the untruncated series, exactly.

Depth-k capped laws (the factor law with everything at square depth >= k
frozen to l/(l-1)) are produced in closed form for odd l and by full
residue enumeration for l = 2, and convolve into the truncated
multiplicative error-term distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from satocensus import backend
from satocensus.arith import is_prime, kronecker, primes_up_to

__all__ = [
    "DiscreteDist",
    "GeometricFamily",
    "TableSeries",
    "PrimeClass",
    "two_adic_tag",
    "factor_law",
    "factor_law_for_prime",
    "factor_law_enumerated",
    "capped_factor_law",
    "error_term_dist",
    "sample_values",
    "moments",
    "log_moments",
]

ENUMERATION_CEILING = 10**7
TWO_ADIC_TAGS = ("p=2", "3mod4", "5mod8", "1mod8")
_TWO_ADIC_REPS = {"p=2": 2, "3mod4": 3, "5mod8": 5, "1mod8": 17}

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class GeometricFamily:
    """Atoms value(s) = const + coef * ratio^s, mass(s) = mass_coef * mass_ratio^s
    for s = 1, 2, 3, ..."""

    const: Fraction
    coef: Fraction
    ratio: Fraction
    mass_coef: Fraction
    mass_ratio: Fraction

    def value(self, s: int) -> Fraction:
        return self.const + self.coef * self.ratio**s

    def mass(self, s: int) -> Fraction:
        return self.mass_coef * self.mass_ratio**s

    def total_mass(self) -> Fraction:
        q = self.mass_ratio
        return self.mass_coef * q / (1 - q)

    def tail_mass(self, depth: int) -> Fraction:
        """Mass of atoms with s > depth."""
        q = self.mass_ratio
        return self.mass_coef * q ** (depth + 1) / (1 - q)

    def moment(self, power: int) -> Fraction:
        """Exact sum over the whole family of value^power * mass."""
        out = ZERO
        for i in range(power + 1):
            x = self.ratio**i * self.mass_ratio
            out += comb(power, i) * self.const ** (power - i) * self.coef**i * x / (1 - x)
        return self.mass_coef * out


@dataclass(frozen=True)
class TableSeries:
    """Untruncated description of a table law: finite atoms plus families."""

    base: tuple[tuple[Fraction, Fraction], ...]
    families: tuple[GeometricFamily, ...]

    def moment(self, power: int) -> Fraction:
        out = sum((v**power * m for v, m in self.base), ZERO)
        return out + sum((f.moment(power) for f in self.families), ZERO)


@dataclass(frozen=True)
class DiscreteDist:
    """Finite distribution with exact rational atoms.

    atoms are (value, mass) pairs, strictly increasing in value, all
    masses positive, and sum(masses) + tail_mass == 1 exactly.  The tail
    slot holds truncated family mass parked at the families' limit value.
    """

    atoms: tuple[tuple[Fraction, Fraction], ...]
    tail_value: Fraction | None = None
    tail_mass: Fraction = ZERO
    series: TableSeries | None = None
    pruned_mass: Fraction = ZERO

    def __post_init__(self):
        values = [v for v, _ in self.atoms]
        if any(values[i] >= values[i + 1] for i in range(len(values) - 1)):
            raise ValueError("atom values must be strictly increasing")
        if any(m <= 0 for _, m in self.atoms):
            raise ValueError("atom masses must be positive")
        total = sum((m for _, m in self.atoms), ZERO) + self.tail_mass
        if total != 1:
            raise ValueError(f"masses sum to {total}, not 1")
        if self.tail_mass < 0 or (self.tail_mass > 0 and self.tail_value is None):
            raise ValueError("tail mass needs a tail value")

    @classmethod
    def from_pairs(cls, pairs, **kwargs) -> "DiscreteDist":
        merged: dict[Fraction, Fraction] = {}
        for v, m in pairs:
            merged[v] = merged.get(v, ZERO) + m
        atoms = tuple(sorted((v, m) for v, m in merged.items() if m != 0))
        return cls(atoms, **kwargs)

    def point_atoms(self) -> tuple[tuple[Fraction, Fraction], ...]:
        """Atoms with any tail mass folded into a point at tail_value."""
        if self.tail_mass == 0:
            return self.atoms
        return DiscreteDist.from_pairs(
            list(self.atoms) + [(self.tail_value, self.tail_mass)]
        ).atoms

    def support_size(self) -> int:
        return len(self.atoms)

    def mass_at(self, value: Fraction) -> Fraction:
        for v, m in self.atoms:
            if v == value:
                return m
        return ZERO


@dataclass(frozen=True)
class PrimeClass:
    """Class data of a prime p at l: the symbol (p|l) for odd l, the
    p mod 8 case tag for l = 2."""

    l: int
    tag: int | str

    def __post_init__(self):
        if self.l == 2:
            if self.tag not in TWO_ADIC_TAGS:
                raise ValueError(f"bad 2-adic tag {self.tag!r}")
        else:
            if not is_prime(self.l):
                raise ValueError(f"l={self.l} is not prime")
            if self.tag not in (-1, 0, 1):
                raise ValueError(f"bad symbol {self.tag!r} for odd l")

    @classmethod
    def from_prime(cls, l: int, p: int) -> "PrimeClass":
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if l == 2:
            return cls(2, two_adic_tag(p))
        return cls(l, 0 if p % l == 0 else kronecker(p, l))


def two_adic_tag(p: int) -> str:
    if p == 2:
        return "p=2"
    if p % 4 == 3:
        return "3mod4"
    if p % 8 == 5:
        return "5mod8"
    if p % 8 == 1:
        return "1mod8"
    raise ValueError(f"{p} is not an odd prime")


def _as_class(l: int, cls: "PrimeClass | int | str") -> PrimeClass:
    if isinstance(cls, PrimeClass):
        if cls.l != l:
            raise ValueError(f"class is for l={cls.l}, not l={l}")
        return cls
    return PrimeClass(l, cls)


def _table_pieces(l: int, cls: PrimeClass):
    """(base atoms, families) of the untruncated law for (l, class)."""
    if l == 2:
        H = Fraction(1, 2)
        if cls.tag == "p=2":
            return ((ONE, H), (Fraction(2), H)), ()
        if cls.tag == "3mod4":
            base = (
                (Fraction(2, 3), H),
                (ONE, Fraction(1, 4)),
                (Fraction(4, 3), Fraction(1, 8)),
                (Fraction(2), Fraction(1, 8)),
            )
            return base, ()
        if cls.tag == "5mod8":
            base = (
                (Fraction(2, 3), H),
                (ONE, Fraction(1, 4)),
                (Fraction(3, 2), Fraction(1, 8)),
                (Fraction(5, 3), Fraction(1, 16)),
                (Fraction(2), Fraction(1, 16)),
            )
            return base, ()
        # p = 1 mod 8: two infinite families accumulating at 2
        base = (
            (Fraction(2, 3), H),
            (ONE, Fraction(1, 4)),
            (Fraction(3, 2), Fraction(1, 8)),
            (Fraction(2), Fraction(1, 48)),
        )
        families = (
            GeometricFamily(Fraction(2), Fraction(-1, 2), H, Fraction(1, 4), Fraction(1, 4)),
            GeometricFamily(Fraction(2), Fraction(-1, 3), H, Fraction(1, 16), Fraction(1, 4)),
        )
        return base, families

    M = Fraction(l, l - 1)
    if cls.tag == 0:  # p = l
        return ((ONE, Fraction(1, l)), (M, Fraction(l - 1, l))), ()
    if cls.tag == -1:
        base = (
            (Fraction(l, l + 1), Fraction(l + 1, 2 * l)),
            (M, Fraction(l - 1, 2 * l)),
        )
        return base, ()
    # split case: two families with limit l/(l-1)
    base = (
        (Fraction(l, l + 1), Fraction(l - 1, 2 * l)),
        (M, Fraction(l * l - 2 * l - 1, 2 * (l * l + l))),
    )
    families = (
        GeometricFamily(M, -M, Fraction(1, l), Fraction(2 * (l - 1)), Fraction(1, l * l)),
        GeometricFamily(
            M, Fraction(-2 * l, l * l - 1), Fraction(1, l), Fraction(l - 1, l), Fraction(1, l * l)
        ),
    )
    return base, families


def factor_law(l: int, cls: "PrimeClass | int | str", depth: int = 8) -> DiscreteDist:
    """Exact law of the local factor at l for the given prime class.

    Infinite families are emitted for s <= depth; the remaining geometric
    mass is parked at the limit value l/(l-1) as the tail.  Moments remain
    exact: the untruncated series rides along in `series`.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    cls = _as_class(l, cls)
    base, families = _table_pieces(l, cls)
    pairs = list(base)
    tail = ZERO
    for fam in families:
        pairs.extend((fam.value(s), fam.mass(s)) for s in range(1, depth + 1))
        tail += fam.tail_mass(depth)
    series = TableSeries(base, families)
    tail_value = Fraction(l, l - 1) if tail else None
    return DiscreteDist.from_pairs(
        pairs, tail_value=tail_value, tail_mass=tail, series=series
    )


def factor_law_for_prime(l: int, p: int, depth: int = 8) -> DiscreteDist:
    return factor_law(l, PrimeClass.from_prime(l, p), depth)


def factor_law_enumerated(
    l: int, p: int, k: int, ceiling: int = ENUMERATION_CEILING
) -> DiscreteDist:
    """Law of the depth-k capped factor by brute enumeration of all
    residues t mod l^(2k), with exact masses m / l^(2k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    l2k = l ** (2 * k)
    if l2k > ceiling:
        raise ValueError(f"l^(2k) = {l2k} exceeds enumeration ceiling {ceiling}")
    nums = np.zeros(128, dtype=np.int64)
    dens = np.zeros(128, dtype=np.int64)
    counts = np.zeros(128, dtype=np.int64)
    nbins = int(backend.vlk_histogram(l, k, p, nums, dens, counts))
    pairs = [
        (Fraction(int(nums[i]), int(dens[i])), Fraction(int(counts[i]), l2k))
        for i in range(nbins)
    ]
    return DiscreteDist.from_pairs(pairs)


def capped_factor_law(
    l: int,
    k: int,
    p: int | None = None,
    cls: "PrimeClass | int | str | None" = None,
    ceiling: int = ENUMERATION_CEILING,
) -> DiscreteDist:
    """Exact law of the depth-k capped factor, from class data alone.

    Odd l uses the closed form (cross-checked against enumeration in the
    test suite); l = 2 enumerates 4^k residues of a representative prime
    of the class.  Exactly one of p, cls must be given.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if (p is None) == (cls is None):
        raise ValueError("give exactly one of p or cls")
    if cls is not None:
        cls = _as_class(l, cls)

    if l == 2:
        rep = p if p is not None else _TWO_ADIC_REPS[cls.tag]
        return factor_law_enumerated(2, rep, k, ceiling=ceiling)

    if p is not None:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        tag = 0 if p % l == 0 else kronecker(p, l)
    else:
        tag = cls.tag

    if tag in (0, -1):
        # no deep divisibility: the cap never bites
        return factor_law(l, tag, depth=1)
    M = Fraction(l, l - 1)
    pairs = [(Fraction(l, l + 1), Fraction(l - 1, 2 * l))]
    for s in range(1, k + 1):
        pairs.append((M - M * Fraction(1, l) ** s, Fraction(2 * (l - 1), l ** (2 * s))))
    deep = Fraction(l - 3, 2 * l) + Fraction(2, l ** (2 * k))
    for s in range(1, k):
        pairs.append(
            (
                M - Fraction(2 * l, l * l - 1) * Fraction(1, l) ** s,
                Fraction(l - 1, l ** (2 * s + 1)),
            )
        )
        deep += Fraction(l - 1, l ** (2 * s + 1))
    pairs.append((M, deep))
    return DiscreteDist.from_pairs(pairs)


class SupportCapExceeded(ValueError):
    pass


def _prune(items: list[tuple[Fraction, Fraction]], eps) -> tuple[list, Fraction]:
    """Merge atoms of mass < eps into their nearest-value neighbor.

    Single left-to-right pass over value-sorted atoms; ties go left.
    Returns (kept atoms, total mass moved).  Mass is conserved.
    """
    if eps <= 0 or len(items) <= 1:
        return items, ZERO
    moved = ZERO
    out: list[list[Fraction]] = []
    incoming = [ZERO] * len(items)
    for i, (v, m) in enumerate(items):
        m = m + incoming[i]
        if m < eps:
            left = v - out[-1][0] if out else None
            right = items[i + 1][0] - v if i + 1 < len(items) else None
            if right is None and left is None:
                out.append([v, m])
                continue
            if right is None or (left is not None and left <= right):
                out[-1][1] += m
            else:
                incoming[i + 1] += m
            moved += m
        else:
            out.append([v, m])
    return [(v, m) for v, m in out], moved


def error_term_dist(
    p_or_classes: "int | list[PrimeClass]",
    l1: int,
    k: int,
    prune_eps: float = 0.0,
    support_cap: int = 10**5,
) -> DiscreteDist:
    """Exact convolution of the depth-k capped factor laws over primes
    l < l1: the truncated multiplicative error term against the semicircle.

    Accepts a concrete prime or an abstract class vector (one PrimeClass
    per prime below l1).  Atoms of mass < prune_eps are merged into their
    nearest neighbor; the relocated mass is recorded in pruned_mass.
    """
    if l1 < 3:
        raise ValueError("l1 must be >= 3")
    if prune_eps < 0:
        raise ValueError("prune_eps must be >= 0")
    factors = []
    for l in primes_up_to(l1):
        if isinstance(p_or_classes, int):
            factors.append(capped_factor_law(l, k, p=p_or_classes))
        else:
            matches = [c for c in p_or_classes if c.l == l]
            if len(matches) != 1:
                raise ValueError(f"class vector must name l={l} exactly once")
            factors.append(capped_factor_law(l, k, cls=matches[0]))

    atoms = {ONE: ONE}
    pruned = ZERO
    for f in factors:
        new: dict[Fraction, Fraction] = {}
        for v1, m1 in atoms.items():
            for v2, m2 in f.point_atoms():
                nv = v1 * v2
                nm = m1 * m2
                if nv in new:
                    new[nv] += nm
                else:
                    new[nv] = nm
        items, moved = _prune(sorted(new.items()), prune_eps)
        pruned += moved
        if len(items) > support_cap:
            raise SupportCapExceeded(
                f"error-term support {len(items)} exceeds cap {support_cap}; "
                "increase prune_eps"
            )
        atoms = dict(items)
    return DiscreteDist.from_pairs(atoms.items(), pruned_mass=pruned)


def _cdf_arrays(dist: DiscreteDist) -> tuple[np.ndarray, np.ndarray]:
    atoms = dist.point_atoms()
    values = np.array([float(v) for v, _ in atoms])
    acc = ZERO
    cdf = np.empty(len(atoms))
    for i, (_, m) in enumerate(atoms):
        acc += m
        cdf[i] = float(acc)
    cdf[-1] = 1.0
    return values, cdf


def sample_with_rng(dist: DiscreteDist, n: int, rng: np.random.Generator) -> np.ndarray:
    values, cdf = _cdf_arrays(dist)
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    return values[np.minimum(idx, len(values) - 1)]


def sample_values(dist_or_factors, n: int, seed: int) -> np.ndarray:
    """n inverse-CDF draws, bit-reproducible for a given seed.

    A list of factor laws is sampled independently (one derived stream per
    factor, keyed by its index) and multiplied.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    root = np.random.SeedSequence(seed)
    if isinstance(dist_or_factors, DiscreteDist):
        return sample_with_rng(dist_or_factors, n, np.random.default_rng(root))
    factors = list(dist_or_factors)
    out = np.ones(n)
    for child, f in zip(root.spawn(len(factors)), factors):
        out *= sample_with_rng(f, n, np.random.default_rng(child))
    return out


def moments(dist: DiscreteDist) -> tuple[Fraction, Fraction]:
    """(mean, variance), exact.  Table laws evaluate their untruncated
    series in closed form; finite laws sum their atoms."""
    if dist.series is not None:
        mean = dist.series.moment(1)
        second = dist.series.moment(2)
    else:
        atoms = dist.point_atoms()
        mean = sum((v * m for v, m in atoms), ZERO)
        second = sum((v * v * m for v, m in atoms), ZERO)
    return mean, second - mean * mean


def log_moments(dist: DiscreteDist, depth: int = 80) -> tuple[float, float]:
    """(mean, variance) of the log of the value, in floats.

    Families are resummed numerically to `depth` terms (the masses decay
    geometrically, so the remainder is far below float resolution).
    """
    if dist.series is not None:
        pieces = [(float(v), float(m)) for v, m in dist.series.base]
        for fam in dist.series.families:
            pieces.extend(
                (float(fam.value(s)), float(fam.mass(s))) for s in range(1, depth + 1)
            )
    else:
        pieces = [(float(v), float(m)) for v, m in dist.point_atoms()]
    mean = sum(math.log(v) * m for v, m in pieces)
    second = sum(math.log(v) ** 2 * m for v, m in pieces)
    return mean, second - mean * mean
