"""Exact integer utilities shared by every module: Kronecker symbols,
prime sieves and tests, and square-part extraction of discriminants.

All functions are pure and operate on arbitrary-precision integers.
"""

from __future__ import annotations

import math
from functools import lru_cache

__all__ = [
    "kronecker",
    "primes_up_to",
    "padic_split",
    "is_prime",
    "next_prime",
    "primitive_root",
    "mod_inverse",
]

# Deterministic Miller-Rabin witnesses, valid for all n < 3.3 * 10^24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n >= 1.

    Standard conventions: (a/1) = 1 for every a; (a/2) is 0 for even a,
    +1 for a = +-1 (mod 8) and -1 for a = +-3 (mod 8); for odd prime n it
    reduces to the Legendre symbol.  Multiplicative in n.
    """
    if n == 0:
        raise ValueError("kronecker symbol undefined for n = 0")
    if n < 0:
        raise ValueError("kronecker: only n >= 1 is supported")
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    # n is odd and positive; ordinary Jacobi symbol from here.
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def primes_up_to(n: int) -> list[int]:
    """Strictly increasing list of all primes < n (sieve of Eratosthenes)."""
    if n < 0:
        raise ValueError("primes_up_to: n must be >= 0")
    if n <= 2:
        return []
    sieve = bytearray([1]) * n
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n - 1) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, n, p)))
    return [i for i in range(2, n) if sieve[i]]


@lru_cache(maxsize=8)
def _cached_primes(n: int) -> tuple[int, ...]:
    return tuple(primes_up_to(n))


def padic_split(delta: int, l: int, mod4: bool | None = None) -> tuple[int, int]:
    """Largest even power of l dividing delta, as (exponent/2, cofactor).

    Returns (d, delta'), where d is the largest integer with l**(2d) | delta
    and delta' = delta / l**(2d).  For l = 2 the exponent is additionally
    capped so that delta' = 0 or 1 (mod 4); pass mod4=False to disable that
    extra condition (it is applied by default exactly when l == 2).
    """
    if delta == 0:
        raise ValueError("padic_split: delta must be nonzero")
    if l < 2:
        raise ValueError("padic_split: l must be a prime >= 2")
    if mod4 is None:
        mod4 = l == 2
    d = 0
    ll = l * l
    while delta % ll == 0:
        nxt = delta // ll
        if mod4 and nxt % 4 not in (0, 1):
            break
        delta = nxt
        d += 1
    return d, delta


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (exact for n < 3.3e24)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


def mod_inverse(a: int, p: int) -> int:
    return pow(a, -1, p)


def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group of F_p (p prime)."""
    if p == 2:
        return 1
    m = p - 1
    factors = []
    mm = m
    f = 2
    while f * f <= mm:
        if mm % f == 0:
            factors.append(f)
            while mm % f == 0:
                mm //= f
        f += 1
    if mm > 1:
        factors.append(mm)
    for g in range(2, p):
        if all(pow(g, m // q, p) != 1 for q in factors):
            return g
    raise ArithmeticError(f"no primitive root found for {p}")  # p not prime
