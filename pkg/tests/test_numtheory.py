import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bachet.numtheory import (
    ResidueClassification,
    classify_residue,
    crt_combine,
    divisors,
    euler_phi,
    find_sextic_generator,
    gauss_representation,
    hex_form,
    is_prime,
    legendre_symbol,
    pillai_gcd_sum,
    primes_upto,
    random_prime,
    sqrt_mod,
    valuation,
)
from oracles import cubes_mod, is_prime_naive, phi_naive, squares_mod

PRIMES_2000 = [int(p) for p in primes_upto(2000)]


def test_is_prime_examples():
    assert not is_prime(1)
    assert is_prime(13)
    assert not is_prime(157463)  # 53 * 2971


def test_is_prime_matches_trial_division():
    for n in range(20000):
        assert is_prime(n) == is_prime_naive(n), n


def test_is_prime_large():
    assert is_prime(2 ** 61 - 1)
    assert not is_prime((2 ** 31 - 1) * (2 ** 61 - 1))
    # strong pseudoprime to bases 2..37 only beyond 3.3e24; these are classic traps
    assert not is_prime(3215031751)
    assert not is_prime(3825123056546413051)


@pytest.mark.parametrize("a,p,expected", [(0, 7, 0), (2, 7, 1), (3, 7, -1)])
def test_legendre_examples(a, p, expected):
    assert legendre_symbol(a, p) == expected


def test_legendre_rejects_non_odd_prime():
    with pytest.raises(ValueError):
        legendre_symbol(1, 2)
    with pytest.raises(ValueError):
        legendre_symbol(1, 9)


@given(st.sampled_from(PRIMES_2000[2:]), st.integers(-10 ** 6, 10 ** 6))
def test_legendre_is_euler_criterion(p, a):
    r = pow(a, (p - 1) // 2, p)
    assert legendre_symbol(a, p) == {0: 0, 1: 1, p - 1: -1}[r]


@given(st.sampled_from(PRIMES_2000[2:]), st.integers(0, 10 ** 6))
def test_sqrt_mod(p, a):
    r = sqrt_mod(a, p)
    if a % p in squares_mod(p) or a % p == 0:
        assert r * r % p == a % p
    else:
        assert r is None


def test_classify_examples():
    assert classify_residue(1, 7) == ResidueClassification(True, True, 0)
    assert classify_residue(2, 7) == ResidueClassification(True, False, 2)
    assert classify_residue(6, 7) == ResidueClassification(False, True, 3)


def test_classify_rejects_zero():
    with pytest.raises(ValueError):
        classify_residue(14, 7)


def test_classify_p_2_mod_3_has_no_sextic_index():
    for d in range(1, 11):
        c = classify_residue(d, 11)
        assert c.is_cubic_residue and c.sextic_index is None


@pytest.mark.parametrize("p,g", [(7, 3), (13, 2), (31, 3)])
def test_sextic_generator_examples(p, g):
    assert find_sextic_generator(p) == g


def test_sextic_generator_is_smallest_by_enumeration():
    for p in PRIMES_2000:
        if p % 3 != 1:
            continue
        sq, cu = squares_mod(p), cubes_mod(p)
        expected = next(g for g in range(2, p) if g not in sq and g not in cu)
        assert find_sextic_generator(p) == expected


def test_sextic_generator_rejects_2_mod_3():
    with pytest.raises(ValueError):
        find_sextic_generator(11)


def test_classification_partitions_into_six_equal_classes():
    for p in PRIMES_2000:
        if p % 3 != 1:
            continue
        g = find_sextic_generator(p)
        sq, cu = squares_mod(p), cubes_mod(p)
        sextic = {pow(x, 6, p) for x in range(1, p)}
        counts = Counter()
        for d in range(1, p):
            c = classify_residue(d, p)
            i = c.sextic_index
            assert d * pow(g, -i, p) % p in sextic
            assert c.is_quadratic_residue == (d in sq) == (i % 2 == 0)
            assert c.is_cubic_residue == (d in cu) == (i in (0, 3))
            counts[i] += 1
        assert set(counts.values()) == {(p - 1) // 6}, p


@pytest.mark.parametrize("p,a,b", [(7, -2, 1), (13, 1, 2), (19, 4, 1)])
def test_gauss_examples(p, a, b):
    rep = gauss_representation(p)
    assert (rep.a, rep.b) == (a, b)


def test_gauss_round_trip_to_1e5():
    for p in primes_upto(10 ** 5):
        p = int(p)
        if p % 3 != 1:
            continue
        rep = gauss_representation(p)
        assert rep.a ** 2 + 3 * rep.b ** 2 == p and rep.a % 3 == 1 and rep.b > 0


def test_gauss_rejects_2_mod_3():
    with pytest.raises(ValueError):
        gauss_representation(11)


@pytest.mark.parametrize("q,n", [(7, 1), (169, 7), (13, None), (1, None), (3, None)])
def test_hex_form_examples(q, n):
    assert hex_form(q) == n


def test_hex_form_exhaustive_to_1e6():
    hexes = {}
    n = 1
    while 3 * n * n + 3 * n + 1 <= 10 ** 6:
        hexes[3 * n * n + 3 * n + 1] = n
        n += 1
    for q in range(1, 10 ** 6 + 1):
        assert hex_form(q) == hexes.get(q)


def test_hex_form_inverts_for_n_to_1e6():
    for n in range(1, 10 ** 6 + 1, 997):
        assert hex_form(3 * n * n + 3 * n + 1) == n
    assert hex_form(3 * 10 ** 12 + 3 * 10 ** 6 + 1) == 10 ** 6


def test_valuation():
    assert valuation(3, 18) == 2
    assert valuation(5, 7) == 0
    assert valuation(2, 0) == math.inf
    assert valuation(2, 0) > 10 ** 100
    assert valuation(7, -49) == 2


def test_pillai_examples():
    assert pillai_gcd_sum(1) == 1
    assert pillai_gcd_sum(6) == 15
    for p in (5, 7, 101, 9973):
        assert pillai_gcd_sum(p) == 2 * p - 1


def test_pillai_matches_direct_sum_to_1e4():
    for k in range(1, 10 ** 4 + 1):
        direct = int(np.gcd(np.arange(1, k + 1), k).sum())
        assert pillai_gcd_sum(k) == direct, k


@given(st.integers(1, 1000), st.data())
def test_mdphi_identity(n, data):
    divs = [d for d in range(1, n + 1) if n % d == 0]
    S = data.draw(st.lists(st.sampled_from(divs), max_size=30))
    rhs = sum(sum(1 for k in S if k % d == 0) * phi_naive(d) for d in divs)
    assert sum(S) == rhs


def test_divisors_and_phi():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    for n in range(1, 300):
        assert euler_phi(n) == phi_naive(n)


def test_crt_examples():
    assert crt_combine([(1, 5)]) == 1
    x = crt_combine([(2, 7), (3, 19)])
    assert x == 79 and x % 7 == 2 and x % 19 == 3
    with pytest.raises(ValueError):
        crt_combine([(0, 4), (0, 6)])


@given(st.lists(st.sampled_from(PRIMES_2000), min_size=1, max_size=4, unique=True), st.data())
def test_crt_property(moduli, data):
    vals = [data.draw(st.integers(-10 ** 6, 10 ** 6)) for _ in moduli]
    x = crt_combine(zip(vals, moduli))
    assert 0 <= x < math.prod(moduli)
    assert all((x - v) % m == 0 for v, m in zip(vals, moduli))


def test_random_prime():
    rng = np.random.default_rng(0)
    assert random_prime(5, 5, rng) == 5
    with pytest.raises(ValueError):
        random_prime(8, 10, rng)
    a = [random_prime(5, 64, np.random.default_rng(7)) for _ in range(3)]
    assert len(set(a)) == 1 and is_prime(a[0]) and 5 <= a[0] <= 64


def test_random_prime_is_roughly_uniform():
    rng = np.random.default_rng(1)
    draws = Counter(random_prime(5, 30, rng) for _ in range(7000))
    assert set(draws) == {5, 7, 11, 13, 17, 19, 23, 29}
    assert min(draws.values()) > 700


def test_random_prime_wide_range():
    rng = np.random.default_rng(3)
    p = random_prime(10 ** 12, 10 ** 12 + 10 ** 6, rng)
    assert is_prime(p) and 10 ** 12 <= p <= 10 ** 12 + 10 ** 6
