"""Monte-Carlo estimate of Pr[#E(Z/nZ) = n + 1 - a_n] for near-Korselt n = pq.

Only the local traces (t_p, t_q) enter the statistic, so a trial draws the
trace pair directly from its conditional law instead of rejection-sampling
curves mod pq.
"""
from __future__ import annotations

import csv
import enum
import io
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .numtheory import is_prime, primes_upto

DEFAULT_EXACT_BOUND = 512
PUBLISHED_SEED = 20160321
CSV_HEADER = ("N", "trials", "estimate", "ci_halfwidth", "seed", "weighting")

# Published Pr(N) estimates, 1000 trials each.
PUBLISHED_TABLE = {
    64: 0.614, 128: 0.725, 256: 0.823, 512: 0.869, 1024: 0.924, 2048: 0.939,
    4096: 0.965, 8192: 0.976, 16384: 0.994, 32768: 0.995, 65536: 0.995,
}


class Weighting(str, enum.Enum):
    PAIR_UNIFORM = "pairs"
    CURVE_EXACT = "exact"


CASE_LABELS = ("both_anomalous", "case1", "case2", "case3")


def exact_bound() -> int:
    return int(os.environ.get("BACHET_EXACT_BOUND", DEFAULT_EXACT_BOUND))


def _hasse(p: int) -> int:
    return math.isqrt(4 * p)


@lru_cache(maxsize=None)
def _trace_distribution(p: int) -> tuple:
    # chi[v] = (v / p)
    chi = np.full(p, -1.0)
    sq = np.arange(1, (p + 1) // 2, dtype=np.int64)
    chi[sq * sq % p] = 1.0
    chi[0] = 0.0
    x = np.arange(p, dtype=np.int64)
    cubes = x * x % p * x % p
    # hist[C, v] = #{x : x^3 + Cx = v}
    hist = np.zeros((p, p))
    for C in range(p):
        hist[C] = np.bincount((cubes + C * x) % p, minlength=p)
    # circ[v, D] = chi(v + D)
    circ = chi[(x[:, None] + x[None, :]) % p]
    sums = np.rint(hist @ circ).astype(np.int64)  # sums[C, D] = sum_x chi(x^3 + Cx + D)

    C, D = np.meshgrid(x, x, indexing="ij")
    singular = (4 * C * C % p * C + 27 * D * D) % p == 0
    n_singular = int(singular.sum())
    if n_singular != p:
        raise ArithmeticError(f"expected {p} singular pairs mod {p}, found {n_singular}")
    traces = -sums[~singular]
    values, counts = np.unique(traces, return_counts=True)
    return tuple(zip(values.tolist(), counts.tolist()))


def trace_distribution_exact(p: int, bound: int | None = None) -> dict:
    """Map trace -> number of nonsingular (C, D) mod p with that trace."""
    bound = exact_bound() if bound is None else bound
    if p > bound:
        raise ValueError(
            f"p = {p} exceeds the exact-mode bound {bound}; use PAIR_UNIFORM weighting"
        )
    if p < 5 or not is_prime(p):
        raise ValueError(f"p = {p} must be a prime >= 5")
    return dict(_trace_distribution(p))


@lru_cache(maxsize=4096)
def _pair_grid(p: int, q: int):
    bp, bq = _hasse(p), _hasse(q)
    tp = np.arange(-bp, bp + 1, dtype=np.int64)
    tq = np.arange(-bq, bq + 1, dtype=np.int64)
    target = p * q + 1 - tp[:, None] * tq[None, :]
    mp = (p + 1 - tp)[:, None]
    mq = (q + 1 - tq)[None, :]
    ok = (target % mp == 0) & (target % mq == 0)
    i, j = np.nonzero(ok)
    tp_v, tq_v = tp[i], tq[j]
    equal = (p + 1 - tp_v) * (q + 1 - tq_v) == p * q + 1 - tp_v * tq_v
    for arr in (tp_v, tq_v, equal):
        arr.setflags(write=False)
    return tp_v, tq_v, equal


def valid_trace_pairs(p: int, q: int) -> list:
    """Trace pairs in the Hasse boxes with both local orders dividing pq + 1 - t_p t_q."""
    if min(p, q) < 5 or p == q:
        raise ValueError("need distinct p, q >= 5")
    tp, tq, _ = _pair_grid(p, q)
    return list(zip(tp.tolist(), tq.tolist()))


def _weights(p: int, q: int, tp, tq, weighting: Weighting) -> np.ndarray:
    if weighting is Weighting.PAIR_UNIFORM:
        return np.ones(len(tp))
    dp, dq = trace_distribution_exact(p), trace_distribution_exact(q)
    return np.array([dp.get(a, 0) * dq.get(b, 0) for a, b in zip(tp.tolist(), tq.tolist())], dtype=float)


def conditional_equality_probability(p: int, q: int, weighting=Weighting.PAIR_UNIFORM) -> float:
    weighting = Weighting(weighting)
    if min(p, q) < 5 or p == q:
        raise ValueError("need distinct p, q >= 5")
    tp, tq, equal = _pair_grid(p, q)
    w = _weights(p, q, tp, tq, weighting)
    total = w.sum()
    if total == 0:
        raise ArithmeticError(f"no valid trace pairs for ({p}, {q})")
    return float(w[equal].sum() / total)


def classify_trial(p: int, q: int, t_p: int, t_q: int) -> str:
    anomalous = (t_p == 1) + (t_q == 1)
    if anomalous == 2:
        return "both_anomalous"
    if anomalous == 1:
        return "case1"
    if (p + 1 - t_p) * (q + 1 - t_q) == p * q + 1 - t_p * t_q:
        return "case3"
    return "case2"


@dataclass(frozen=True)
class OdcTrial:
    p: int
    q: int
    t_p: int
    t_q: int
    divisible: bool
    equality: bool
    case_label: str


@dataclass
class OdcRow:
    N: int
    trials: int
    estimate: float
    ci_halfwidth: float
    seed: int
    weighting: str
    case_counts: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        return {
            "N": self.N,
            "trials": self.trials,
            "estimate": self.estimate,
            "ci_halfwidth": self.ci_halfwidth,
            "seed": self.seed,
            "weighting": self.weighting,
            "case_counts": dict(self.case_counts),
        }


@dataclass
class OdcTable:
    rows: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.N, r.trials, f"{r.estimate:.6f}", f"{r.ci_halfwidth:.6f}", r.seed, r.weighting])
        return buf.getvalue()

    def records(self) -> list:
        return [r.as_record() for r in self.rows]


def trial_rng(seed: int, N: int, index: int) -> np.random.Generator:
    """Independent substream for one trial; never depends on execution order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(N, index)))


def run_trial(primes, rng: np.random.Generator, weighting: Weighting) -> OdcTrial:
    p = int(primes[rng.integers(len(primes))])
    while True:
        q = int(primes[rng.integers(len(primes))])
        if q != p:
            break
    tp, tq, equal = _pair_grid(p, q)
    w = _weights(p, q, tp, tq, weighting)
    cum = np.cumsum(w)
    k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    k = min(k, len(cum) - 1)
    a, b = int(tp[k]), int(tq[k])
    return OdcTrial(p, q, a, b, True, bool(equal[k]), classify_trial(p, q, a, b))


def odc_row(N: int, trials: int, seed: int, weighting=Weighting.PAIR_UNIFORM) -> OdcRow:
    weighting = Weighting(weighting)
    if trials < 1:
        raise ValueError("trials must be positive")
    if N < 7:
        raise ValueError("N must be at least 7")
    primes = [int(p) for p in primes_upto(N) if p >= 5]
    hits = 0
    cases = Counter()
    for i in range(trials):
        trial = run_trial(primes, trial_rng(seed, N, i), weighting)
        hits += trial.equality
        cases[trial.case_label] += 1
    e = hits / trials
    half = 1.96 * math.sqrt(e * (1 - e) / trials)
    counts = {label: cases.get(label, 0) for label in CASE_LABELS}
    return OdcRow(N, trials, e, half, seed, weighting.value, counts)


def odc_table(Ns, trials: int = 1000, seed: int = PUBLISHED_SEED,
              weighting=Weighting.PAIR_UNIFORM, progress=None) -> OdcTable:
    rows = []
    for N in Ns:
        rows.append(odc_row(N, trials, seed, weighting))
        if progress is not None:
            progress(rows[-1])
    return OdcTable(rows)
