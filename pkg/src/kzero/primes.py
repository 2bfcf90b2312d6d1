"""Prime generation and testing, desk scale.

A plain sieve for enumerating primes up to a bound and a deterministic
Miller-Rabin test for isolated queries.  The witness set {2, 3, 5, 7, 11,
13, 17, 19, 23, 29, 31, 37} is proven correct for all n < 3.3 * 10^24,
far beyond anything this package touches.
"""

from __future__ import annotations

__all__ = ["sieve", "is_prime", "primes_in"]

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def sieve(limit: int) -> list[int]:
    """All primes p <= limit, ascending."""
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, int(limit ** 0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
    return [i for i, f in enumerate(flags) if f]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for the fixed witness set."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_in(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p <= hi, ascending."""
    return [p for p in sieve(hi) if p >= lo]
