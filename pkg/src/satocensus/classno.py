"""Hurwitz-Kronecker class numbers H(delta) via reduced binary quadratic
forms, and the decomposition delta = f^2 * delta0 into conductor and
fundamental discriminant.

Everything is exact: H(delta) is returned as a Fraction whose denominator
divides 6.  The form scan counts every reduced positive-definite form of
discriminant delta (imprimitive ones included); a form that is a multiple
of x^2 + y^2 or x^2 + xy + y^2 is weighted 1/2 or 1/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from satocensus import backend

__all__ = [
    "DiscriminantSplit",
    "ReducedForm",
    "split_discriminant",
    "is_fundamental",
    "reduced_forms",
    "class_number_weighted",
    "hurwitz_class_number",
]


@dataclass(frozen=True)
class DiscriminantSplit:
    """delta = conductor^2 * fundamental with fundamental a field discriminant."""

    delta: int
    conductor: int
    fundamental: int


@dataclass(frozen=True)
class ReducedForm:
    """Reduced positive-definite form a x^2 + b xy + c y^2:
    |b| <= a <= c, with b >= 0 when |b| = a or a = c."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return math.gcd(self.a, math.gcd(self.b, self.c))


def _check_discriminant(delta: int) -> None:
    if delta >= 0:
        raise ValueError(f"discriminant must be negative, got {delta}")
    if delta % 4 not in (0, 1):
        raise ValueError(f"discriminant must be 0 or 1 mod 4, got {delta}")


def split_discriminant(delta: int) -> DiscriminantSplit:
    """Unique decomposition delta = f^2 * delta0, delta0 fundamental."""
    _check_discriminant(delta)
    n = -delta
    # factor out the square part by trial division
    square_root_part = 1
    squarefree = 1
    f = 2
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            square_root_part *= f ** (e // 2)
            if e % 2:
                squarefree *= f
        f += 1
    squarefree *= n  # remaining prime
    if (-squarefree) % 4 == 1:
        fundamental = -squarefree
        conductor = square_root_part
    else:
        fundamental = -4 * squarefree
        conductor = square_root_part // 2
        if conductor * conductor * fundamental != delta:
            raise ArithmeticError(f"split failed for {delta}")
    return DiscriminantSplit(delta, conductor, fundamental)


def is_fundamental(delta: int) -> bool:
    try:
        _check_discriminant(delta)
    except ValueError:
        return False
    return split_discriminant(delta).conductor == 1


def reduced_forms(delta: int) -> list[ReducedForm]:
    """All reduced forms of discriminant delta, each exactly once."""
    _check_discriminant(delta)
    forms = []
    amax = math.isqrt(-delta // 3)
    parity = delta & 1
    for a in range(1, amax + 1):
        for b in range(parity, a + 1, 2):
            num = b * b - delta
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            forms.append(ReducedForm(a, b, c))
            if b != 0 and b != a and a != c:
                forms.append(ReducedForm(a, -b, c))
    return forms


def class_number_weighted(delta0: int) -> Fraction:
    """Weighted class count 2h/w for a fundamental discriminant delta0.

    The unique class of delta0 = -4 (resp. -3) is weighted 1/2 (resp. 1/3);
    all other classes count 1.
    """
    _check_discriminant(delta0)
    if not is_fundamental(delta0):
        raise ValueError(f"{delta0} is not a fundamental discriminant")
    h = len(reduced_forms(delta0))
    if delta0 == -3:
        return Fraction(h, 3)
    if delta0 == -4:
        return Fraction(h, 2)
    return Fraction(h)


def hurwitz_class_number(delta: int) -> Fraction:
    """H(delta): weighted count of classes of all discriminants delta/f'^2.

    Equals the single-scan count of every reduced form of discriminant
    delta, where a form g*(x^2 + y^2) weighs 1/2 and g*(x^2 + xy + y^2)
    weighs 1/3.  Delegates the scan to the active kernel backend.
    """
    _check_discriminant(delta)
    return Fraction(backend.hurwitz6_any(delta), 6)
