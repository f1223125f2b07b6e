"""Integer and modular arithmetic primitives.

Everything here is a pure function of its arguments. Randomness is only
consumed through an explicit ``numpy.random.Generator``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

# Deterministic Miller-Rabin witnesses; correct for every n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

MAX_INPUT = 2 ** 63


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _require_odd_prime(p: int) -> None:
    if p < 3 or not is_prime(p):
        raise ValueError(f"modulus {p} is not an odd prime")


def legendre_symbol(a: int, p: int) -> int:
    """Quadratic character of ``a`` modulo the odd prime ``p`` (Euler's criterion)."""
    _require_odd_prime(p)
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def sqrt_mod(a: int, p: int) -> Optional[int]:
    """A square root of ``a`` mod the odd prime ``p`` or None (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


@dataclass(frozen=True)
class ResidueClassification:
    is_quadratic_residue: bool
    is_cubic_residue: bool
    sextic_index: Optional[int] = None


@dataclass(frozen=True)
class GaussRepresentation:
    """``p = a**2 + 3*b**2`` with ``a = 1 (mod 3)`` and ``b > 0``."""

    a: int
    b: int
    p: int


def _is_square_mod(x: int, p: int) -> bool:
    return pow(x, (p - 1) // 2, p) == 1


def _is_cube_mod(x: int, p: int) -> bool:
    if p % 3 == 2:
        return True
    return pow(x, (p - 1) // 3, p) == 1


@lru_cache(maxsize=None)
def find_sextic_generator(p: int) -> int:
    """Smallest positive integer that is neither a square nor a cube mod ``p``."""
    if p % 3 != 1:
        raise ValueError(f"p = {p} is not 1 mod 3; every residue is a cube")
    if p < 7 or not is_prime(p):
        raise ValueError(f"p = {p} must be a prime >= 7")
    g = 2
    while _is_square_mod(g, p) or _is_cube_mod(g, p):
        g += 1
    return g


def classify_residue(d: int, p: int) -> ResidueClassification:
    if p < 5 or not is_prime(p):
        raise ValueError(f"p = {p} must be a prime >= 5")
    d %= p
    if d == 0:
        raise ValueError("cannot classify 0: it lies in no residue class")
    qr = _is_square_mod(d, p)
    if p % 3 == 2:
        return ResidueClassification(qr, True, None)
    g = find_sextic_generator(p)
    g_inv = pow(g, -1, p)
    e = (p - 1) // 6
    x = d
    for i in range(6):
        # x = d * g^-i; it is a sextic residue iff x^((p-1)/6) == 1.
        if pow(x, e, p) == 1:
            return ResidueClassification(qr, i % 3 == 0, i)
        x = x * g_inv % p
    raise AssertionError("unreachable: F_p* is the union of six cosets")


def gauss_representation(p: int) -> GaussRepresentation:
    if p % 3 != 1 or p < 7 or not is_prime(p):
        raise ValueError(f"p = {p} has no representation a^2 + 3b^2 (need prime p = 1 mod 3)")
    for b in range(1, math.isqrt(p // 3) + 1):
        rest = p - 3 * b * b
        a = math.isqrt(rest)
        if a * a == rest:
            if a % 3 != 1:
                a = -a
            return GaussRepresentation(a, b, p)
    raise AssertionError(f"no representation found for prime {p}")


def hex_form(q: int) -> Optional[int]:
    """Return ``n > 0`` with ``q == 3n^2 + 3n + 1``, or None."""
    if q < 7:
        return None
    # 12q - 3 = (6n + 3)^2
    disc = 12 * q - 3
    r = math.isqrt(disc)
    if r * r != disc or (r - 3) % 6:
        return None
    n = (r - 3) // 6
    return n if n > 0 and 3 * n * n + 3 * n + 1 == q else None


def valuation(p: int, n: int):
    """p-adic valuation of ``n``; ``math.inf`` for ``n == 0``."""
    if n == 0:
        return math.inf
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def factorize(n: int) -> dict:
    """Trial-division factorisation ``{prime: exponent}`` (desk-scale inputs)."""
    if n < 1:
        raise ValueError("factorize needs a positive integer")
    out = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def pillai_gcd_sum(k: int) -> int:
    """Sum of gcd(x, k) for x = 1..k, via the divisor formula sum d*phi(k/d)."""
    if k < 1:
        raise ValueError("k must be positive")
    return sum(d * euler_phi(k // d) for d in divisors(k))


def crt_combine(residues: Iterable[Sequence[int]]) -> int:
    """Solve the system ``x = v_i (mod m_i)``; result lies in ``[0, prod m_i)``."""
    x, m = 0, 1
    for v, mi in residues:
        if mi < 1:
            raise ValueError(f"modulus {mi} must be positive")
        if math.gcd(m, mi) != 1:
            raise ValueError(f"moduli {m} and {mi} are not coprime")
        # x + m*k = v (mod mi)
        k = (v - x) * pow(m, -1, mi) % mi
        x += m * k
        m *= mi
    return x % m


@lru_cache(maxsize=64)
def _primes_between(lo: int, hi: int) -> tuple:
    return tuple(p for p in primes_upto(hi) if p >= lo)


def primes_upto(n: int) -> np.ndarray:
    """All primes ``<= n`` via a numpy sieve."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.flatnonzero(sieve).astype(np.int64)


_SIEVE_LIMIT = 10 ** 7


def random_prime(lo: int, hi: int, rng: np.random.Generator) -> int:
    """Uniform draw from the primes in ``[lo, hi]``."""
    lo = max(lo, 2)
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    if hi <= _SIEVE_LIMIT:
        primes = _primes_between(lo, hi)
        if not primes:
            raise ValueError(f"no primes in [{lo}, {hi}]")
        return int(primes[rng.integers(len(primes))])
    # Rejection sampling is uniform over primes; the interval is wide
    # enough here that a prime is all but certain to exist.
    for _ in range(1_000_000):
        n = int(rng.integers(lo, hi, endpoint=True))
        if is_prime(n):
            return n
    raise ValueError(f"no prime found in [{lo}, {hi}]")
