"""Local Euler factors of Gekeler's product formula for trace counts,
their depth-k caps, finite truncated products, and cutoff policies.

The factor at a prime l of a discriminant delta is

    (1 - l^-2)^-1 * (1 + 1/l + {0 | -(l+1) l^(-d-2) | -2 l^(-d-1)})

where l^(2d) is the largest even power of l dividing delta (for l = 2 the
quotient must additionally be 0 or 1 mod 4) and the brace picks the case
by the Kronecker symbol (delta/l^(2d) | l) being +1, 0, -1.  Products are
kept as exact Fractions; floats appear only in final normalizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from satocensus.arith import kronecker, padic_split, primes_up_to

__all__ = [
    "LocalFactor",
    "CutoffPlan",
    "local_factor",
    "local_factor_value",
    "local_factor_capped",
    "truncated_product",
    "gekeler_estimate",
    "tail_log_product",
    "cutoff_plan",
    "joint_period",
]

TAIL_PRIME_LIMIT = 10**6  # default ceiling for tail sweeps


@dataclass(frozen=True)
class LocalFactor:
    """One evaluated factor: prime, square depth, symbol, exact value."""

    l: int
    delta_exp: int
    symbol: int
    value: Fraction


@dataclass(frozen=True)
class CutoffPlan:
    """Truncation cutoff l0 plus the policy that produced it."""

    mode: str  # "grh_poly" | "unconditional"
    l0: int
    exponent: float | None = None
    kappa: float | None = None

    def __post_init__(self):
        if self.l0 < 2:
            raise ValueError(f"cutoff l0 must be >= 2, got {self.l0}")


def _factor_value(l: int, delta: int) -> tuple[int, int, Fraction]:
    """(depth, symbol, value) for any nonzero delta; no sign validation."""
    d, delta1 = padic_split(delta, l)
    s = kronecker(delta1 % (8 if l == 2 else l), l)
    if s == 1:
        return d, s, Fraction(l, l - 1)
    ld = l**d
    if s == 0:
        value = Fraction(l * l * (l + 1) * (l * ld - 1), (l * l - 1) * ld * l * l)
    else:
        value = Fraction(l * l * ((l + 1) * ld - 2), (l * l - 1) * ld * l)
    return d, s, value


def local_factor(l: int, delta: int) -> LocalFactor:
    """Exact local factor at prime l of a discriminant delta < 0."""
    if delta >= 0 or delta % 4 not in (0, 1):
        raise ValueError(f"delta must be a negative discriminant, got {delta}")
    d, s, value = _factor_value(l, delta)
    return LocalFactor(l, d, s, value)


def local_factor_value(l: int, delta: int) -> Fraction:
    return local_factor(l, delta).value


def local_factor_capped(l: int, k: int, delta: int) -> Fraction:
    """Depth-k cap: the plain factor unless l^(2k) | delta, in which case
    the value freezes at (1 - l^-2)^-1 (1 + 1/l) = l/(l-1).

    Callable on any integer residue t^2 - 4p, not just discriminants.
    """
    if k < 1:
        raise ValueError("cap depth k must be >= 1")
    if delta % l ** (2 * k) == 0:
        return Fraction(l, l - 1)
    return _factor_value(l, delta)[2]


@lru_cache(maxsize=4)
def _primes_below(n: int) -> tuple[int, ...]:
    return tuple(primes_up_to(n))


def truncated_product(t: int, p: int, l0: int, k: int | None = None) -> Fraction:
    """Product of the local factors of t^2 - 4p over primes l < l0, exact.

    With k set, each factor is capped at depth k.
    """
    if t * t >= 4 * p:
        raise ValueError(f"need t^2 < 4p, got t={t}, p={p}")
    delta = t * t - 4 * p
    out = Fraction(1)
    for l in _primes_below(l0):
        if k is None:
            out *= _factor_value(l, delta)[2]
        else:
            out *= local_factor_capped(l, k, delta)
    return out


def gekeler_estimate(
    t: int, p: int, cutoff: int | CutoffPlan, k: int | None = None
) -> float:
    """Truncated-product estimate of the weighted trace count:
    sqrt(4p - t^2)/pi times the finite factor product (capped iff k given).

    The product stays rational until the single final float multiply.
    """
    l0 = cutoff.l0 if isinstance(cutoff, CutoffPlan) else int(cutoff)
    prod = truncated_product(t, p, l0, k)
    return math.sqrt(4 * p - t * t) / math.pi * float(prod)


def tail_log_product(
    t: int, p: int, l0: int, L: int
) -> tuple[float, dict[int, float]]:
    """Sum of log factors over primes l0 <= l < L, with a dyadic breakdown.

    Returns (total, {n: subtotal over primes in [2^n, 2^(n+1))}).
    """
    if L > TAIL_PRIME_LIMIT:
        raise ValueError(f"tail sweep capped at L <= {TAIL_PRIME_LIMIT}")
    if t * t >= 4 * p:
        raise ValueError(f"need t^2 < 4p, got t={t}, p={p}")
    delta = t * t - 4 * p
    total = 0.0
    dyadic: dict[int, float] = {}
    for l in _primes_below(L):
        if l < l0:
            continue
        term = math.log(float(_factor_value(l, delta)[2]))
        total += term
        n = l.bit_length() - 1
        dyadic[n] = dyadic.get(n, 0.0) + term
    return total, dyadic


def cutoff_plan(
    p: int,
    mode: str = "grh_poly",
    exponent: float = 3.0,
    kappa: float = 1.0,
) -> CutoffPlan:
    """Cutoff l0 for truncating the factor product at a working prime p.

    grh_poly:      l0 = ceil((log p)^exponent), default exponent 3.
    unconditional: l0 = ceil(exp(kappa (loglog p)^(5/3) (logloglog p)^(1/3))),
                   needs p >= 17 so the triple log is positive.
    """
    if mode == "grh_poly":
        if exponent <= 0:
            raise ValueError("exponent must be positive")
        if p < 5:
            raise ValueError("grh_poly cutoff needs p >= 5")
        l0 = math.ceil(math.log(p) ** exponent)
        return CutoffPlan("grh_poly", l0, exponent=exponent)
    if mode == "unconditional":
        if kappa <= 0:
            raise ValueError("kappa must be positive")
        if p < 17:
            raise ValueError("unconditional cutoff needs p >= 17")
        ll = math.log(math.log(p))
        lll = math.log(ll)
        l0 = math.ceil(math.exp(kappa * ll ** (5 / 3) * lll ** (1 / 3)))
        return CutoffPlan("unconditional", l0, kappa=kappa)
    raise ValueError(f"unknown cutoff mode {mode!r}")


def joint_period(l1: int, k: int) -> int:
    """Common period (prod of primes < l1)^(2k) of the capped factors:
    over any window of traces of this length the factors are independent."""
    if l1 < 2 or k < 1:
        raise ValueError("need l1 >= 2 and k >= 1")
    out = 1
    for l in _primes_below(l1):
        out *= l
    return out ** (2 * k)
