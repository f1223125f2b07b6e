"""Brute-force reference implementations. Deliberately naive; share no code with bachet."""
from math import gcd

import numpy as np


def is_prime_naive(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def squares_mod(p):
    return {x * x % p for x in range(1, p)}


def cubes_mod(p):
    return {x ** 3 % p for x in range(1, p)}


def count_points_naive(p, C, D):
    """Enumerate every (x, y) in F_p x F_p, plus the point at infinity."""
    return 1 + sum(1 for x in range(p) for y in range(p) if (y * y - x ** 3 - C * x - D) % p == 0)


def bachet_counts_by_roots(p):
    """#E(F_p) for y^2 = x^3 + D at every D in 0..p-1, by counting square roots.

    roots[v] is the number of y with y^2 = v; each x contributes roots[x^3 + D].
    """
    y = np.arange(p, dtype=np.int64)
    roots = np.bincount(y * y % p, minlength=p)
    cube_hist = np.bincount(y * y % p * y % p, minlength=p)
    D = np.arange(p, dtype=np.int64)
    total = np.ones(p, dtype=np.int64)
    for v in np.nonzero(cube_hist)[0]:
        total += cube_hist[v] * roots[(v + D) % p]
    return total


def gcd_sum_naive(k):
    return sum(gcd(x, k) for x in range(1, k + 1))


def phi_naive(n):
    return sum(1 for x in range(1, n + 1) if gcd(x, n) == 1)


def fq2_count_naive(p, D_pair, r):
    """#E(F_{p^2}) for y^2 = x^3 + D by enumerating all (x, y) in F_{p^2}^2.

    Elements are (u, v) meaning u + v*s with s^2 = r.
    """
    def mul(a, b):
        return ((a[0] * b[0] + r * a[1] * b[1]) % p, (a[0] * b[1] + a[1] * b[0]) % p)

    elems = [(u, v) for u in range(p) for v in range(p)]
    sq = {}
    for y in elems:
        s = mul(y, y)
        sq[s] = sq.get(s, 0) + 1
    total = 1
    for x in elems:
        f = mul(mul(x, x), x)
        f = ((f[0] + D_pair[0]) % p, (f[1] + D_pair[1]) % p)
        total += sq.get(f, 0)
    return total
