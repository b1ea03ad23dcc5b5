"""Small integer helpers shared across the package."""

from __future__ import annotations

import math
from functools import reduce


def is_prime(n: int) -> bool:
    """Trial division; adequate for the desk-scale primes used here."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n % 3 == 0:
        return n == 3
    i = 5
    while i * i <= n:
        if n % i == 0 or n % (i + 2) == 0:
            return False
        i += 6
    return True


def primes_below(bound: int) -> list[int]:
    if bound <= 2:
        return []
    sieve = bytearray([1]) * bound
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(bound - 1) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(range(i * i, bound, i)))
    return [i for i in range(bound) if sieve[i]]


def first_primes(count: int) -> list[int]:
    out: list[int] = []
    n = 2
    while len(out) < count:
        if is_prime(n):
            out.append(n)
        n += 1
    return out


def lcm(*values: int) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(m: int) -> int:
    result = m
    for p in factorize(m):
        result -= result // p
    return result


def orders_with_phi_at_most(d: int) -> list[int]:
    """All m >= 1 with phi(m) <= d, i.e. the possible root-of-unity orders
    in a number field of absolute degree d."""
    # phi(m) >= sqrt(m/2), so m <= 2 d^2 covers every case
    return [m for m in range(1, 2 * d * d + 3) if euler_phi(m) <= d]


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: n = squarefree_part(n) * k^2."""
    if n == 0:
        raise ValueError("zero has no squarefree part")
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorize(abs(n)).items():
        if e % 2:
            out *= p
    return sign * out
