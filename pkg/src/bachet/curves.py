"""Short Weierstrass curves y^2 = x^3 + Cx + D over prime fields and Z/nZ.

Point counts use the quadratic character sum, vectorised with numpy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .numtheory import (
    find_sextic_generator,
    gauss_representation,
    is_prime,
    legendre_symbol,
)


class BadReductionError(ValueError):
    """The curve is singular modulo the given prime."""


@dataclass(frozen=True)
class CurveParams:
    modulus: int
    C: int
    D: int

    def __post_init__(self):
        if self.modulus < 5:
            raise ValueError(f"modulus {self.modulus} must be >= 5")

    def contains(self, P) -> bool:
        if P is INFINITY:
            return True
        x, y = P
        n = self.modulus
        return (y * y - (x * x * x + self.C * x + self.D)) % n == 0


@dataclass(frozen=True)
class TwistSpectrum:
    p: int
    g: int
    traces: tuple
    orders: tuple

    def as_record(self) -> dict:
        return {"p": self.p, "g": self.g, "traces": list(self.traces), "orders": list(self.orders)}


class _Infinity:
    __slots__ = ()

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return "INFINITY"


INFINITY = _Infinity()


@dataclass(frozen=True)
class FactorFound:
    """An inversion modulo a composite failed and exposed ``factor``."""

    factor: int


def discriminant(C: int, D: int) -> int:
    return -16 * (4 * C ** 3 + 27 * D ** 2)


def has_good_reduction(p: int, C: int, D: int) -> bool:
    return p >= 5 and (4 * C ** 3 + 27 * D ** 2) % p != 0


def _check_good(p: int, C: int, D: int) -> None:
    if p < 5:
        raise BadReductionError(f"p = {p}: characteristic 2 and 3 are not supported")
    if not has_good_reduction(p, C, D):
        raise BadReductionError(
            f"bad reduction at p = {p}: discriminant = {discriminant(C, D) % p} mod {p}"
        )


@lru_cache(maxsize=256)
def _chi_table(p: int) -> np.ndarray:
    """chi[v] = Legendre symbol (v / p) for v in [0, p)."""
    chi = np.full(p, -1, dtype=np.int64)
    x = np.arange(1, (p + 1) // 2, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi[0] = 0
    chi.setflags(write=False)
    return chi


@lru_cache(maxsize=256)
def _arange(p: int) -> np.ndarray:
    a = np.arange(p, dtype=np.int64)
    a.setflags(write=False)
    return a


_VECTOR_LIMIT = 2 ** 31  # keeps every int64 intermediate below 2^62


def _character_sum(p: int, C: int, D: int) -> int:
    if p < _VECTOR_LIMIT:
        x = _arange(p)
        f = (x * x % p * x % p + (C % p) * x % p + (D % p)) % p
        return int(_chi_table(p)[f].sum())
    return sum(legendre_symbol(x ** 3 + C * x + D, p) for x in range(p))


def count_points(p: int, C: int, D: int) -> int:
    """#E(F_p) for y^2 = x^3 + Cx + D, including the point at infinity."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    _check_good(p, C, D)
    return p + 1 + _character_sum(p, C, D)


def trace(p: int, C: int, D: int) -> int:
    """Trace of Frobenius ``p + 1 - #E(F_p)``."""
    if C % p == 0 and p % 3 == 2 and p >= 5:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        _check_good(p, C, D)
        return 0
    return p + 1 - count_points(p, C, D)


def bachet_orders(p: int) -> np.ndarray:
    """Vector of #E(F_p) for y^2 = x^3 + D, indexed by D = 1..p-1.

    Every D is counted directly (no twist shortcut): the cube histogram
    is correlated against the quadratic character table.
    """
    if p < 5 or not is_prime(p):
        raise ValueError(f"p = {p} must be a prime >= 5")
    x = _arange(p)
    hist = np.bincount(x * x % p * x % p, minlength=p)
    support = np.flatnonzero(hist)
    D = np.arange(1, p, dtype=np.int64)
    chi = _chi_table(p)
    sums = (chi[(support[None, :] + D[:, None]) % p] * hist[support][None, :]).sum(axis=1)
    return p + 1 + sums


def twist_spectrum(p: int, D: int = 1) -> TwistSpectrum:
    """Traces and orders of the six sextic twists y^2 = x^3 + g^i D."""
    if p % 3 != 1 or p < 7 or not is_prime(p):
        raise ValueError(f"p = {p} must be a prime = 1 mod 3, >= 7 (else no sextic splitting)")
    if D % p == 0:
        raise ValueError("D must be nonzero mod p")
    g = find_sextic_generator(p)
    t0 = trace(p, 0, D)
    t2 = trace(p, 0, pow(g, 2, p) * D % p)
    t4 = -t0 - t2
    traces = (t0, -t4, t2, -t0, t4, -t2)

    # The cubic x^3 - 3px - t0^3 + 3p t0 has roots t0, t2, t4.
    disc = 3 * (4 * p - t0 * t0)
    s = math.isqrt(disc)
    if s * s != disc or {(-t0 + s) // 2, (-t0 - s) // 2} != {t2, t4}:
        raise ArithmeticError(f"twist cross-check failed at p = {p}: t0 = {t0}, t2 = {t2}")
    return TwistSpectrum(p, g, traces, tuple(p + 1 - t for t in traces))


def weil_lift(t: int, q: int, r: int) -> int:
    """alpha^r + beta^r where alpha + beta = t and alpha * beta = q."""
    if t * t > 4 * q:
        raise ValueError(f"|t| = {abs(t)} exceeds 2*sqrt({q}); not a trace")
    if r < 1:
        raise ValueError("r must be positive")
    prev, cur = 2, t
    for _ in range(r - 1):
        prev, cur = cur, t * cur - q * prev
    return cur


def order_candidates(p: int) -> frozenset:
    """The possible #E(F_p) for the Bachet family y^2 = x^3 + D."""
    if p < 5 or not is_prime(p):
        raise ValueError(f"p = {p} must be a prime >= 5")
    if p % 3 == 2:
        return frozenset({p + 1})
    rep = gauss_representation(p)
    a, b = rep.a, rep.b
    return frozenset({
        p + 1 + 2 * a, p + 1 - 2 * a,
        p + 1 - a + 3 * b, p + 1 - a - 3 * b,
        p + 1 + a + 3 * b, p + 1 + a - 3 * b,
    })


# --- group law over Z/nZ -----------------------------------------------------

Point = Union[_Infinity, tuple]


def _inverse(d: int, n: int):
    d %= n
    g = math.gcd(d, n)
    if g != 1:
        return FactorFound(g)
    return pow(d, -1, n)


def _require_on_curve(curve: CurveParams, *points) -> None:
    for P in points:
        if not curve.contains(P):
            raise ValueError(f"point {P} is not on {curve}")


def _add(curve: CurveParams, P, Q):
    if P is INFINITY:
        return Q
    if Q is INFINITY:
        return P
    n = curve.modulus
    x1, y1 = P
    x2, y2 = Q
    if (x1 - x2) % n == 0:
        if (y1 + y2) % n == 0:
            return INFINITY
        if (y1 - y2) % n != 0:
            # y1^2 = y2^2 but y1 != +-y2: n is composite and gcd splits it.
            return FactorFound(math.gcd(y1 - y2, n))
        inv = _inverse(2 * y1, n)
        if isinstance(inv, FactorFound):
            return inv
        lam = (3 * x1 * x1 + curve.C) * inv % n
    else:
        inv = _inverse(x2 - x1, n)
        if isinstance(inv, FactorFound):
            return inv
        lam = (y2 - y1) * inv % n
    x3 = (lam * lam - x1 - x2) % n
    return (x3, (lam * (x1 - x3) - y1) % n)


def point_add(curve: CurveParams, P, Q):
    """Chord-tangent addition mod ``curve.modulus``.

    Returns a point, or :class:`FactorFound` when a denominator shares a
    factor with the modulus.
    """
    _require_on_curve(curve, P, Q)
    return _add(curve, P, Q)


def point_neg(curve: CurveParams, P):
    if P is INFINITY:
        return P
    return (P[0], -P[1] % curve.modulus)


def scalar_mul(curve: CurveParams, k: int, P):
    """k * P by double-and-add; negative k multiplies -P."""
    _require_on_curve(curve, P)
    if k < 0:
        k, P = -k, point_neg(curve, P)
    result, addend = INFINITY, P
    while k:
        if k & 1:
            result = _add(curve, result, addend)
            if isinstance(result, FactorFound):
                return result
        k >>= 1
        if k:
            addend = _add(curve, addend, addend)
            if isinstance(addend, FactorFound):
                return addend
    return result


def points_on(p: int, C: int, D: int) -> list:
    """All affine points of y^2 = x^3 + Cx + D over F_p (small p only)."""
    squares = {}
    for y in range(p):
        squares.setdefault(y * y % p, []).append(y)
    return [(x, y) for x in range(p) for y in squares.get((x ** 3 + C * x + D) % p, ())]


# --- quadratic extension oracle ----------------------------------------------

FQ2_ORACLE_BOUND = 200


def _fq2_nonresidue(p: int) -> int:
    r = 2
    while pow(r, (p - 1) // 2, p) != p - 1:
        r += 1
    return r


def _as_fq2(z):
    if isinstance(z, tuple):
        return z
    return (z, 0)


def fq2_count_points(p: int, C, D) -> int:
    """#E(F_{p^2}) by exhaustive quadratic-character tests over the extension.

    ``C`` and ``D`` are integers or pairs ``(u, v)`` meaning ``u + v*i`` in
    ``F_p[i]/(i^2 - r)`` with ``r`` the least quadratic non-residue mod p.
    """
    if p > FQ2_ORACLE_BOUND:
        raise ValueError(f"p = {p} exceeds the quadratic-extension oracle bound {FQ2_ORACLE_BOUND}")
    if p < 5 or not is_prime(p):
        raise ValueError(f"p = {p} must be a prime >= 5")
    r = _fq2_nonresidue(p)
    cu, cv = (c % p for c in _as_fq2(C))
    du, dv = (d % p for d in _as_fq2(D))

    def mul(a, b):
        au, av = a
        bu, bv = b
        return ((au * bu + r * (av * bv % p)) % p, (au * bv + av * bu) % p)

    grid = np.arange(p, dtype=np.int64)
    xu = np.repeat(grid, p)
    xv = np.tile(grid, p)
    x = (xu, xv)
    x3 = mul(mul(x, x), x)
    cx = mul((np.int64(cu), np.int64(cv)), x)
    f = ((x3[0] + cx[0] + du) % p, (x3[1] + cx[1] + dv) % p)

    # Singularity check: 4C^3 + 27D^2 == 0 in F_{p^2}.
    c = (np.int64(cu), np.int64(cv))
    d = (np.int64(du), np.int64(dv))
    c3 = mul(mul(c, c), c)
    d2 = mul(d, d)
    if (4 * c3[0] + 27 * d2[0]) % p == 0 and (4 * c3[1] + 27 * d2[1]) % p == 0:
        raise BadReductionError(f"curve is singular over F_{p}^2")

    # f^((p^2 - 1)/2) by square-and-multiply, vectorised over all p^2 values.
    e = (p * p - 1) // 2
    acc = (np.ones_like(xu), np.zeros_like(xu))
    base = f
    while e:
        if e & 1:
            acc = mul(acc, base)
        e >>= 1
        if e:
            base = mul(base, base)
    zero = (f[0] == 0) & (f[1] == 0)
    residue = (acc[0] == 1) & (acc[1] == 0)
    return int(1 + zero.sum() + 2 * residue.sum())
