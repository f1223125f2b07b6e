"""L-series coefficients and the Type I elliptic Korselt criterion."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .anomalous import find_anomalous_D
from .curves import (
    INFINITY,
    BadReductionError,
    CurveParams,
    FactorFound,
    has_good_reduction,
    scalar_mul,
    trace,
)
from .numtheory import crt_combine, factorize, hex_form, is_prime, primes_upto, sqrt_mod, valuation

REASON_FEW_PRIMES = "fewer than two distinct prime factors"


def _coeffs(curve) -> tuple:
    # Korselt questions are about the global curve; only (C, D) matter.
    return curve.C, curve.D


@lru_cache(maxsize=1 << 16)
def _ap(C: int, D: int, p: int) -> int:
    return trace(p, C, D)


def a_coeff(curve: CurveParams, n: int) -> int:
    """n-th L-series coefficient of y^2 = x^3 + Cx + D.

    a_{p^(k+1)} = a_p a_{p^k} - p a_{p^(k-1)} and a is multiplicative. This is
    not the Frobenius trace over F_{p^k}.
    """
    if n < 1:
        raise ValueError("n must be positive")
    C, D = _coeffs(curve)
    result = 1
    for p, e in factorize(n).items():
        if not has_good_reduction(p, C, D):
            raise BadReductionError(f"bad reduction at p = {p}")
        ap = _ap(C, D, p)
        prev, cur = 1, ap
        for _ in range(e - 1):
            prev, cur = cur, ap * cur - p * prev
        result *= cur
    return result


@dataclass
class PrimeCondition:
    p: int
    exponent: int
    good_reduction: bool
    a_p: Optional[int] = None
    m_p: Optional[int] = None
    divides: bool = False
    ord_condition: bool = False
    note: Optional[str] = None


@dataclass
class KorseltReport:
    n: int
    C: int
    D: int
    per_prime: list
    a_n: Optional[int]
    verdict: bool
    reason: Optional[str] = None

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "curve": {"C": self.C, "D": self.D},
            "a_n": self.a_n,
            "n_plus_1_minus_a_n": None if self.a_n is None else self.n + 1 - self.a_n,
            "per_prime": [vars(pc).copy() for pc in self.per_prime],
            "verdict": self.verdict,
            "reason": self.reason,
        }


def _refuse_small_factors(fac: dict) -> None:
    small = [p for p in fac if p < 5]
    if small:
        raise ValueError(f"n has prime factors {small} below 5; the criterion is not defined there")


def korselt_type1_check(curve: CurveParams, n: int) -> KorseltReport:
    if n < 2:
        raise ValueError("n must be at least 2")
    C, D = _coeffs(curve)
    fac = factorize(n)
    _refuse_small_factors(fac)
    rows = [PrimeCondition(p, e, has_good_reduction(p, C, D)) for p, e in sorted(fac.items())]
    if not all(r.good_reduction for r in rows):
        bad = [r.p for r in rows if not r.good_reduction]
        return KorseltReport(n, C, D, rows, None, False, f"bad reduction at {bad}")
    a_n = a_coeff(curve, n)
    target = n + 1 - a_n
    for r in rows:
        r.a_p = _ap(C, D, r.p)
        r.m_p = r.p + 1 - r.a_p
        r.divides = target % r.m_p == 0
        slack = 0 if r.a_p % r.p == 1 else 1
        if slack == 0:
            r.note = "a_p = 1 mod p (forces a_p = 1 for p >= 7)"
        r.ord_condition = valuation(r.p, a_n - 1) >= r.exponent - slack
    if len(rows) < 2:
        return KorseltReport(n, C, D, rows, a_n, False, REASON_FEW_PRIMES)
    verdict = all(r.divides and r.ord_condition for r in rows)
    return KorseltReport(n, C, D, rows, a_n, verdict)


def korselt_two_prime_check(curve: CurveParams, p: int, q: int) -> bool:
    """Divisibility-only test, equivalent to Type I Korselt for n = pq."""
    if p == q:
        raise ValueError("p and q must be distinct")
    if min(p, q) < 7:
        raise ValueError("both primes must be at least 7")
    C, D = _coeffs(curve)
    for r in (p, q):
        if not is_prime(r):
            raise ValueError(f"{r} is not prime")
        if not has_good_reduction(r, C, D):
            raise BadReductionError(f"bad reduction at p = {r}")
    ap, aq = _ap(C, D, p), _ap(C, D, q)
    target = p * q + 1 - ap * aq
    return target % (p + 1 - ap) == 0 and target % (q + 1 - aq) == 0


def _anomalous_mod(p: int) -> tuple:
    """(C, D) mod p with trace 1, smallest in lexicographic (C, D) order."""
    for C in range(p):
        for D in range(p):
            if has_good_reduction(p, C, D) and trace(p, C, D) == 1:
                return C, D
    raise ArithmeticError(f"no anomalous curve mod {p}")


def build_anomalous_product_curve(primes) -> CurveParams:
    """Integer curve with trace 1 at every given prime, glued by CRT."""
    primes = list(primes)
    if not primes:
        raise ValueError("need at least one prime")
    if len(set(primes)) != len(primes):
        raise ValueError(f"duplicate primes in {primes}")
    for p in primes:
        if p < 5 or not is_prime(p):
            raise ValueError(f"{p} is not a prime >= 5")
    if all(hex_form(p) is not None for p in primes):
        local = [(0, find_anomalous_D(p)) for p in primes]
    else:
        local = [_anomalous_mod(p) for p in primes]
    C = crt_combine((c, p) for (c, _), p in zip(local, primes))
    D = crt_combine((d, p) for (_, d), p in zip(local, primes))
    modulus = math.prod(primes)
    curve = CurveParams(max(modulus, 5), C, D)
    for p in primes:
        assert trace(p, C, D) == 1
    return curve


def gen_silv_classify(curve: CurveParams, n: int) -> set:
    """Which of the three alternatives C1, C2, C3 hold for a square-free Korselt n."""
    fac = factorize(n)
    if any(e > 1 for e in fac.values()):
        raise ValueError(f"{n} is not square-free")
    _refuse_small_factors(fac)
    primes = sorted(fac)
    if len(primes) < 2:
        raise ValueError(REASON_FEW_PRIMES)
    report = korselt_type1_check(curve, n)
    if not report.verdict:
        raise ValueError(f"{n} is not a Type I Korselt number for this curve")
    m = len(primes)
    head = math.prod(primes[:-1])
    traces = {r.p: r.a_p for r in report.per_prime}
    labels = set()
    if head <= 4 ** m:
        labels.add("C1")
    rest = [traces[p] for p in primes[:-1]]
    if traces[primes[-1]] == 1 and all(t in (1, -1) for t in rest) and rest.count(-1) % 2 == 0:
        labels.add("C2")
    # head >= sqrt(p_m) / 4^m, in integers
    if (head * 4 ** m) ** 2 >= primes[-1]:
        labels.add("C3")
    return labels


def sample_point(curve: CurveParams, n: int, rng: np.random.Generator):
    """Random affine point of the curve mod square-free n, lifted by CRT."""
    fac = factorize(n)
    if any(e > 1 for e in fac.values()):
        raise ValueError("point sampling needs a square-free modulus")
    C, D = _coeffs(curve)
    while True:
        x = int(rng.integers(n))
        ys = []
        for p in fac:
            y = sqrt_mod(x ** 3 + C * x + D, p)
            if y is None:
                break
            if rng.integers(2):
                y = -y % p
            ys.append((y, p))
        else:
            return (x, crt_combine(ys))


def _is_killed(C: int, D: int, n: int, k: int, P, split: bool):
    out = scalar_mul(CurveParams(n, C, D), k, P)
    if isinstance(out, FactorFound):
        if not split:
            return out
        # The identity mod n is the identity mod each factor; decide per factor.
        d = out.factor
        return all(
            _is_killed(C, D, m, k, (P[0] % m, P[1] % m), split)
            for m in (d, n // d)
        )
    return out is INFINITY


def elliptic_pseudoprime_check(curve: CurveParams, n: int, P, split: bool = True):
    """True iff (n + 1 - a_n) P is the identity mod n.

    A failed inversion exposes a factor d of n. With ``split`` the check is
    finished on Z/dZ and Z/(n/d)Z; without it the :class:`FactorFound` is
    returned as is.
    """
    fac = factorize(n)
    if len(fac) < 2:
        raise ValueError(REASON_FEW_PRIMES)
    C, D = _coeffs(curve)
    for p in fac:
        if not has_good_reduction(p, C, D):
            raise BadReductionError(f"bad reduction at p = {p}")
    if not CurveParams(n, C, D).contains(P):
        raise ValueError(f"point {P} is not on the curve mod {n}")
    return _is_killed(C, D, n, n + 1 - a_coeff(curve, n), P, split)


def korselt_search(curve: CurveParams, bound: int, progress=None) -> list:
    """All (p, q), 7 <= p < q, pq <= bound, passing the two-prime test."""
    C, D = _coeffs(curve)
    primes = [int(p) for p in primes_upto(bound // 7) if p >= 7 and has_good_reduction(int(p), C, D)]
    found = []
    for i, p in enumerate(primes):
        if p * p >= bound:
            break
        ap = _ap(C, D, p)
        mp = p + 1 - ap
        for q in primes[i + 1:]:
            if p * q > bound:
                break
            aq = _ap(C, D, q)
            target = p * q + 1 - ap * aq
            if target % mp == 0 and target % (q + 1 - aq) == 0:
                found.append((p, q))
        if progress is not None:
            progress(p)
    return found
