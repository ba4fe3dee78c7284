import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primesums.arith import WeightKind, sieve_weights
from primesums.bounds import weyl_dichotomy
from primesums.circle import weight_series
from primesums.errors import ContractError, InvariantError
from primesums.expsum import (
    PhaseContext,
    SumValue,
    dyadic_blocks,
    tree_sum,
    type_i_sum,
    type_ii_sum,
    weighted_sum,
    weyl_sum,
)


def e(t):
    return cmath.exp(2j * math.pi * t)


def circle_dist(u, v):
    d = (u - v) % 1
    return min(d, 1 - d)


def test_weyl_sum_examples():
    assert weyl_sum(PhaseContext(Fraction(0), 3), 10, 10).value == 10
    s = weyl_sum(PhaseContext(Fraction(1, 2), 3), 0, 4).value
    assert abs(s) < 1e-15


def test_weyl_sum_complete_window_against_naive_loop():
    for q in (1, 7, 64, 999, 1000):
        ctx = PhaseContext(Fraction(1, q) % 1, 3)
        naive = sum(e(((n**3) % q) / q) for n in range(q + 1, 2 * q + 1))
        assert abs(weyl_sum(ctx, q, q).value - naive) < 1e-9 * max(1, q)


def test_weighted_sum_examples():
    ctx = PhaseContext(Fraction(0), 3)
    lam = weighted_sum(ctx, sieve_weights(10, 20, WeightKind.VON_MANGOLDT)).value
    assert lam.real == pytest.approx(11.4336, abs=1e-4)
    pl = weighted_sum(ctx, sieve_weights(6, 13, WeightKind.PRIME_LOG)).value
    assert pl.real == pytest.approx(6.9088, abs=1e-4)
    mu = weighted_sum(ctx, sieve_weights(1, 5, WeightKind.MOEBIUS)).value
    assert mu == -3


def test_phase_matches_modular_arithmetic():
    rng = np.random.default_rng(11)
    for _ in range(2000):
        q = int(rng.integers(1, 10**4 + 1))
        a = int(rng.integers(0, q))
        n = int(rng.integers(1, 10**8 + 1))
        ctx = PhaseContext(Fraction(a, q), 3)
        exact = Fraction((a * n**3) % q, q)
        num = ctx.phase_numerator(n)
        assert circle_dist(Fraction(num, 2**ctx.bits), exact) <= Fraction(1, 2**64)
        assert circle_dist(Fraction(ctx.phase_top64(n), 2**64), exact) <= Fraction(1, 2**65) + Fraction(1, 2**180)
        assert circle_dist(Fraction(ctx.phases([n])[0]), exact) <= Fraction(1, 2**53)


def test_bits_budget_enforced():
    ctx = PhaseContext(Fraction(1, 3), 5, bits=128)
    with pytest.raises(ContractError):
        ctx.require(1e13)
    with pytest.raises(ContractError):
        PhaseContext(0.5, 3)


def test_worker_count_does_not_change_sum():
    ctx1 = PhaseContext(Fraction(3, 101), 3, workers=1)
    ctx2 = PhaseContext(Fraction(3, 101), 3, workers=2)
    lo, hi = 10**6, 10**6 + 70_000
    r1 = ctx1.roots(range(lo, hi))
    r2 = ctx2.roots(range(lo, hi))
    assert np.array_equal(r1, r2)


def test_tree_sum_shape():
    v = np.ones(5 * (1 << 16) + 3)
    total, depth = tree_sum(v)
    assert total == v.size and depth == 3
    assert tree_sum(np.zeros(0)) == (0j, 0)


def test_triangle_inequality_asserted():
    with pytest.raises(InvariantError):
        SumValue(3 + 0j, 1, 0, 1.0)


def test_type_i_examples():
    ctx = PhaseContext(Fraction(0), 3)
    assert type_i_sum(lambda m: 1.0, 2, ctx, 10, 10).value == 6
    assert type_i_sum(lambda m: 0.0, 2, ctx, 10, 10).value == 0
    mu = [0, 1, -1]
    ctx = PhaseContext(Fraction(1, 2), 3)
    assert type_i_sum(mu, 1, ctx, 0, 8).value == -4


def test_type_ii_with_unit_eta_matches_type_i():
    ctx = PhaseContext(Fraction(5, 13), 4)
    one = lambda m: 1.0  # noqa: E731
    for M in (1, 3, 10):
        a = type_ii_sum(one, one, M, ctx, 500, 300).value
        b = type_i_sum(one, M, ctx, 500, 300).value
        assert abs(a - b) < 1e-10


def test_type_ii_alpha_zero_is_lattice_count():
    ctx = PhaseContext(Fraction(0), 3)
    one = lambda m: 1.0  # noqa: E731
    x, y, M = 200, 150, 4
    count = sum(1 for m in range(M + 1, 2 * M + 1) for n in range(1, x + y + 1) if x < m * n <= x + y)
    assert type_ii_sum(one, one, M, ctx, x, y).value == count


def test_type_ii_against_double_loop():
    alpha = Fraction(7, 31)
    ctx = PhaseContext(alpha, 3)
    xi = lambda m: math.sin(m)  # noqa: E731
    eta = lambda n: 1.0 / n  # noqa: E731
    x, y, M = 1000, 400, 5
    naive = sum(
        xi(m) * eta(n) * e(((m * n) ** 3 * 7 % 31) / 31)
        for m in range(M + 1, 2 * M + 1)
        for n in range(x // m + 1, (x + y) // m + 1)
    )
    assert abs(type_ii_sum(xi, eta, M, ctx, x, y).value - naive) < 1e-10


def test_dyadic_blocks_cover_range():
    blocks = dyadic_blocks(0.5, 100)
    assert blocks[0] == 0.5 and 2 * blocks[-1] >= 100 and blocks[-1] < 100


@given(st.integers(1, 10**4), st.integers(0, 10**4), st.integers(3, 5))
@settings(max_examples=50, deadline=None)
def test_abs_weyl_sum_bounded_by_length(x, y, k):
    s = weyl_sum(PhaseContext(Fraction(1, 97), k), x, y)
    assert abs(s) <= y + 1e-9


def test_prime_log_series_matches_weighted_sum():
    # f(alpha) via the coefficient series and via the phase engine
    alpha = Fraction(2, 9)
    ser = weight_series(10, 3, 3)
    direct = sum(c * e(float(Fraction(int(m)) * alpha % 1)) for m, c in zip(ser.freqs, ser.coeffs))
    engine = weighted_sum(PhaseContext(alpha, 3), sieve_weights(6, 13, WeightKind.PRIME_LOG)).value
    assert abs(direct - engine) < 1e-12


def test_weyl_dichotomy_reports_a_branch():
    k = 3
    sigma = 1 / 12
    gamma, rho = 4.0, sigma / 4.0
    x = 10**5
    y = 20_000
    rng = np.random.default_rng(5)
    for _ in range(10):
        q = int(rng.integers(2, 500))
        rep = weyl_dichotomy(Fraction(int(rng.integers(1, q)), q), k, x, y, gamma, rho)
        assert rep.holds, rep
