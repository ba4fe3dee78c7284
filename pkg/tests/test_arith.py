import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primesums.arith import (
    WeightKind,
    admissible_modulus,
    check_gcd_sums,
    divisor_count,
    euler_phi,
    factorize,
    forward_difference_ratio,
    moebius,
    multiplicative,
    primes_up_to,
    sieve_weights,
    sweep_gcd_sum_a,
)
from primesums.errors import DomainError


def _naive_factor(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def test_von_mangoldt_small_interval():
    t = sieve_weights(10, 20, WeightKind.VON_MANGOLDT)
    expected = {11: math.log(11), 13: math.log(13), 16: math.log(2), 17: math.log(17), 19: math.log(19)}
    for n in range(11, 21):
        assert t.at(n) == pytest.approx(expected.get(n, 0.0), abs=0)
    assert len(t) == 10


def test_sieve_matches_naive_factorization_to_1e5():
    N = 100_000
    lam = sieve_weights(0, N, WeightKind.VON_MANGOLDT).weights
    mu = sieve_weights(0, N, WeightKind.MOEBIUS).weights
    pl = sieve_weights(0, N, WeightKind.PRIME_LOG).weights
    for n in range(1, N + 1):
        f = _naive_factor(n)
        want_lam = math.log(next(iter(f))) if len(f) == 1 else 0.0
        want_mu = 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)
        want_pl = math.log(n) if f == {n: 1} else 0.0
        assert lam[n - 1] == want_lam, n
        assert mu[n - 1] == want_mu, n
        assert pl[n - 1] == want_pl, n


def test_segmented_sieve_agrees_across_segment_boundary():
    lo, hi = (1 << 20) - 50, (1 << 20) + 50
    seg = sieve_weights(lo, hi, "moebius").weights
    want = [moebius(n) for n in range(lo + 1, hi + 1)]
    assert seg.tolist() == want


def test_unit_weights_and_bad_interval():
    assert sieve_weights(5, 9, WeightKind.UNIT).weights.tolist() == [1.0] * 4
    with pytest.raises(DomainError):
        sieve_weights(10, 5, WeightKind.UNIT)


def test_moebius_and_primelog_examples():
    assert sieve_weights(0, 5, WeightKind.MOEBIUS).weights.tolist() == [1, -1, -1, 0, -1]
    pl = sieve_weights(7, 13, WeightKind.PRIME_LOG)
    assert [pl.at(n) for n in range(8, 14)] == [0, 0, 0, math.log(11), 0, math.log(13)]


def test_primes_up_to():
    assert primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(primes_up_to(10**5)) == 9592


def test_multiplicative_examples():
    assert moebius(6) == 1
    assert euler_phi(10) == 4
    assert moebius(30) == -1
    assert moebius(12) == 0
    assert divisor_count(12) == 6
    assert euler_phi(12) == 4
    assert multiplicative("moebius", 1) == 1
    with pytest.raises(DomainError):
        multiplicative("euler_phi", 0)


def test_factorize_round_trip():
    for n in (1, 2, 97, 360, 2**20, 999_983 * 3):
        assert math.prod(p**e for p, e in factorize(n)) == n


def test_euler_phi_multiplicative_on_coprime_pairs():
    phi = [0] + [euler_phi(n) for n in range(1, 1001)]
    rng = np.random.default_rng(1)
    checked = 0
    for m, n in rng.integers(1, 1001, size=(4000, 2)).tolist():
        if math.gcd(m, n) == 1:
            assert multiplicative("euler_phi", m * n) == phi[m] * phi[n]
            checked += 1
    assert checked > 1000


@given(st.integers(1, 10**6), st.integers(1, 500), st.integers(2, 6))
@settings(max_examples=200, deadline=None)
def test_forward_difference_identity(n, h, k):
    assert forward_difference_ratio(n, h, k) * h + n**k == (n + h) ** k


def test_forward_difference_examples():
    assert forward_difference_ratio(1, 1, 3) == 7
    assert forward_difference_ratio(2, 3, 3) == 39
    assert forward_difference_ratio(5, 2, 4) == 888


def test_admissible_modulus():
    assert admissible_modulus(3) == 2
    assert admissible_modulus(4) == 240
    assert admissible_modulus(2) == 24


def test_gcd_sums_small_cases():
    rep = check_gcd_sums(N=2, r=4, h=1, k=3)
    assert rep.lhs_a == pytest.approx(1 + 4 ** (1 / 3), rel=1e-15)
    assert rep.rhs_a == 6.0
    assert rep.holds_a
    rep = check_gcd_sums(N=1, r=1, h=1, k=3)
    assert rep.lhs_a == 1.0 and rep.rhs_a == 1.0 and rep.holds_a


def test_gcd_sums_against_loop_oracle():
    rep = check_gcd_sums(N=100, r=64, h=2, k=3)
    lhs_b = sum(
        math.gcd(64, ((n + 2) ** 3 - n**3) // 2) ** (1 / 3) for n in range(101, 201) if n % 2
    )
    assert rep.lhs_b == pytest.approx(lhs_b, rel=1e-12)
    assert rep.holds
    assert rep.C == 64.0 and rep.eps == 0.1


def test_gcd_sum_a_sweep_matches_direct_loop():
    for N, r in [(1, 1), (7, 12), (20, 360), (33, 97)]:
        rep = check_gcd_sums(N, r, 1, 3)
        assert rep.holds_a
    assert sweep_gcd_sum_a(60, 60, 3) == []
