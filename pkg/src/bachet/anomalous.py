"""Bachet anomalous primes and prime squares.

A prime power q is Bachet anomalous when some y^2 = x^3 + D has exactly
q points over F_q. For primes this happens exactly at the centred hexagonal
numbers 3n^2 + 3n + 1; for prime squares the witnesses come from the Pell
equation (2p)^2 - 3(2n + 1)^2 = 1.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .curves import (
    FQ2_ORACLE_BOUND,
    count_points,
    fq2_count_points,
    has_good_reduction,
    order_candidates,
    trace,
    weil_lift,
)
from .numtheory import hex_form, is_prime, primes_upto

# Anomalous-prime claims below this bound are confirmed by an explicit curve.
VERIFY_BOUND = 5000
PELL_MAX_BITS = 127


def find_anomalous_D(p: int) -> Optional[int]:
    """Smallest D in 1..p-1 with #E(F_p) = p for y^2 = x^3 + D, else None."""
    if p < 5 or not is_prime(p):
        raise ValueError(f"p = {p} must be a prime >= 5")
    if p % 3 == 2 or hex_form(p) is None:
        return None
    for D in range(1, p):
        if count_points(p, 0, D) == p:
            return D
    return None


def is_bachet_anomalous_prime(p: int, verify_bound: int = VERIFY_BOUND) -> bool:
    if p < 5 or not is_prime(p):
        raise ValueError(f"p = {p} must be a prime >= 5")
    anomalous = hex_form(p) is not None
    if p <= verify_bound:
        witness = find_anomalous_D(p)
        if anomalous != (witness is not None):
            raise ArithmeticError(f"hex-form test and curve search disagree at p = {p}")
    return anomalous


def hex_prime_ab(p: int) -> tuple:
    """Integers (a, b) with a^2 + 3b^2 = p and the order formula that hits p.

    Returns ``(a, b, formula)`` where ``formula`` is ``"p+1+a+3b"`` for even n
    and ``"p+1+a-3b"`` for odd n, with p = 3n^2 + 3n + 1.
    """
    n = hex_form(p)
    if n is None or not is_prime(p):
        raise ValueError(f"{p} is not a prime of the form 3n^2 + 3n + 1")
    if n % 2 == 0:
        b = n // 2
        a, sign, formula = -3 * b - 1, 1, "p+1+a+3b"
    else:
        b = (n + 1) // 2
        a, sign, formula = 3 * b - 1, -1, "p+1+a-3b"
    assert a * a + 3 * b * b == p
    assert p + 1 + a + sign * 3 * b == p
    return a, b, formula


@dataclass(frozen=True)
class PellEntry:
    """k-th solution of p^2 = 3n^2 + 3n + 1 with the square-root sequences.

    ``s`` is twice the square root of g_k = (2p - 3n - 2)/12 and ``u`` is the
    square root of c_k = 2p - 3n - 1.
    """

    k: int
    p: int
    n: int
    s: int
    u: int

    def check(self) -> None:
        p, n = self.p, self.n
        if p * p != 3 * n * n + 3 * n + 1:
            raise ArithmeticError(f"entry {self.k}: p^2 != 3n^2 + 3n + 1")
        if (2 * p) ** 2 - 3 * (2 * n + 1) ** 2 != 1:
            raise ArithmeticError(f"entry {self.k}: Pell identity fails")
        if p % 3 != 1:
            raise ArithmeticError(f"entry {self.k}: p != 1 mod 3")
        # (s/2)^2 = g_k  <=>  3 s^2 = 2p - 3n - 2
        if 3 * self.s * self.s != 2 * p - 3 * n - 2:
            raise ArithmeticError(f"entry {self.k}: s^2 does not match g_k")
        if self.u * self.u != 2 * p - 3 * n - 1:
            raise ArithmeticError(f"entry {self.k}: u^2 does not match c_k")

    def d(self) -> int:
        return 2 * self.p + 3 * self.n + 2


def pell_sequence(count: int) -> list:
    if count < 1:
        raise ValueError("count must be positive")
    entries = []
    p0, n0, s0, u0 = 1, 0, 0, 1
    p1, n1, s1, u1 = 13, 7, 1, 2
    for k in range(1, count + 1):
        if p0.bit_length() > PELL_MAX_BITS:
            raise OverflowError(f"Pell entry {k} exceeds {PELL_MAX_BITS} bits")
        entries.append(PellEntry(k, p0, n0, s0, u0))
        p0, p1 = p1, 14 * p1 - p0
        n0, n1 = n1, 14 * n1 - n0 + 6
        s0, s1 = s1, 4 * s1 - s0
        u0, u1 = u1, 4 * u1 - u0
    return entries


def _exact_sqrt(x: int) -> Optional[int]:
    if x < 0:
        return None
    r = math.isqrt(x)
    return r if r * r == x else None


def ab_construct(p: int, n: int) -> tuple:
    """(a, b) with p = a^2 + 3b^2 and (a +- 3b)^2 - 2p = -1 for one sign.

    b is the integer root of whichever of (2p-3n-2)/12, (2p+3n+1)/12 is a
    square; a is then one of +-3b +- sqrt(12b^2 + 1). Of the two admissible
    values a and -a, the one with a = 1 (mod 3) is returned.
    """
    if p * p != 3 * n * n + 3 * n + 1:
        raise ValueError(f"p^2 != 3n^2 + 3n + 1 for (p, n) = ({p}, {n})")
    roots = []
    for num in (2 * p - 3 * n - 2, 2 * p + 3 * n + 1):
        if num % 12 == 0 and _exact_sqrt(num // 12) is not None:
            roots.append(_exact_sqrt(num // 12))
    if len(roots) != 1:
        raise ArithmeticError(f"expected exactly one square among g, h; found {len(roots)}")
    b = roots[0]
    w = _exact_sqrt(12 * b * b + 1)
    if w is None:
        raise ArithmeticError(f"12b^2 + 1 is not a square for b = {b}")
    for a in (3 * b + w, 3 * b - w, -3 * b + w, -3 * b - w):
        if a % 3 == 1 and a * a + 3 * b * b == p:
            if (a + 3 * b) ** 2 - 2 * p == -1 or (a - 3 * b) ** 2 - 2 * p == -1:
                return a, b
    raise ArithmeticError(f"no admissible a for (p, n) = ({p}, {n})")


@dataclass(frozen=True)
class AnomalousCertificate:
    p: int
    n: int
    a: int
    b: int
    t: int
    lifted: int
    oracle_D: Optional[tuple] = None

    def verify(self) -> bool:
        p, n, a, b, t = self.p, self.n, self.a, self.b, self.t
        w = _exact_sqrt(12 * b * b + 1)
        return (
            is_prime(p)
            and p * p == 3 * n * n + 3 * n + 1
            and p == a * a + 3 * b * b
            and b > 0
            and w is not None
            and t in (a + 3 * b, a - 3 * b)
            and self.lifted == t * t - 2 * p == -1
        )

    def as_record(self) -> dict:
        rec = asdict(self)
        rec["oracle_D"] = list(self.oracle_D) if self.oracle_D is not None else None
        return rec


def _fq2_anomalous_witness(p: int) -> Optional[tuple]:
    """First D = u + v*i in F_{p^2} (lexicographic) with #E(F_{p^2}) = p^2."""
    for v in range(p):
        for u in range(p):
            if u == 0 and v == 0:
                continue
            if fq2_count_points(p, 0, (u, v)) == p * p:
                return (u, v)
    return None


def anomalous_square_certificate(p: int, oracle: bool = True) -> AnomalousCertificate:
    """Trace-level certificate that p^2 is a Bachet anomalous number."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n = hex_form(p * p)
    if n is None:
        raise ValueError(f"{p}^2 is not of the form 3n^2 + 3n + 1: not in Pell sequence")
    a, b = ab_construct(p, n)
    t = a + 3 * b if (a + 3 * b) ** 2 - 2 * p == -1 else a - 3 * b
    if p + 1 - t not in order_candidates(p):
        raise ArithmeticError(f"t = {t} is not a Bachet trace over F_{p}")
    lifted = weil_lift(t, p, 2)
    witness = None
    if oracle and p <= FQ2_ORACLE_BOUND:
        witness = _fq2_anomalous_witness(p)
        if witness is None:
            raise ArithmeticError(f"no curve over F_{p}^2 with {p * p} points")
    cert = AnomalousCertificate(p, n, a, b, t, lifted, witness)
    if not cert.verify():
        raise ArithmeticError(f"certificate for p = {p} fails its own checks")
    return cert


def hex_power_check(p: int, r: int) -> bool:
    """Whether p^r passes the hex-form necessary condition."""
    if p < 5 or r < 1:
        raise ValueError("need p >= 5 and r >= 1")
    ok = hex_form(p ** r) is not None
    if r % 3 == 0 and ok:
        # (p^(r/3))^3 + n^3 = (n + 1)^3 has no solutions
        raise ArithmeticError(f"p^{r} = {p ** r} is hex-form; contradicts Fermat for cubes")
    return ok


def count_anomalous_primes(D: int, N: int) -> tuple:
    """(#anomalous primes p <= N for y^2 = x^3 + D, count * log N / sqrt N)."""
    count = 0
    for p in primes_upto(N):
        p = int(p)
        if p < 5 or not has_good_reduction(p, 0, D):
            continue
        if trace(p, 0, D) == 1:
            count += 1
    estimate = count * math.log(N) / math.sqrt(N) if N > 1 else 0.0
    return count, estimate
