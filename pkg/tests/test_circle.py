import math
from fractions import Fraction

import numpy as np
import pytest

from primesums.circle import (
    CoefficientSeries,
    SeriesKind,
    arc_integral,
    convolve_power,
    hua_moment,
    interval_transform,
    rho_s,
    rho_s_bruteforce,
    weight_series,
    window_primes,
)
from primesums.dioph import dissect
from primesums.errors import ContractError

L2, L3 = math.log(2), math.log(3)


def test_weight_series_examples():
    assert weight_series(10, 3, 3).as_dict() == {343: math.log(7), 1331: math.log(11), 2197: math.log(13)}
    assert weight_series(2, 0.5, 3).as_dict() == {8: L2}
    v = weight_series(2, 1, 3, SeriesKind.SINGULAR_INTEGRAL)
    assert v.freqs.tolist() == list(range(1, 28))
    assert np.allclose(v.coeffs, np.arange(1, 28) ** (-2 / 3) / 3, rtol=1e-15)


def test_window_is_closed():
    assert window_primes(10, 3) == [7, 11, 13]
    assert window_primes(9, 2) == [7, 11]


def test_convolve_power_examples():
    one = CoefficientSeries.from_dict({8: L2})
    assert convolve_power(one, 1).as_dict() == {8: L2}
    assert convolve_power(one, 2).as_dict() == {16: L2 * L2}
    two = CoefficientSeries.from_dict({8: L2, 27: L3})
    sq = convolve_power(two, 2).as_dict()
    assert sq.keys() == {16, 35, 54}
    assert sq[16] == L2 * L2 and sq[54] == L3 * L3
    assert sq[35] == pytest.approx(2 * L2 * L3, rel=1e-15)


def test_dense_and_sparse_powers_agree():
    rng = np.random.default_rng(0)
    freqs = np.arange(100, 160, dtype=np.int64)
    dense = CoefficientSeries(freqs, rng.random(freqs.size))
    keep = np.sort(rng.choice(freqs.size, 6, replace=False))
    sparse = CoefficientSeries(freqs[keep], dense.coeffs[keep])
    assert dense.density > 1 / 8 > sparse.density
    # compare the sparse route with a dense embedding of the same series
    embed = np.zeros(freqs.size)
    embed[keep] = sparse.coeffs
    via_dense = convolve_power(CoefficientSeries(freqs, embed + 0.0), 3).as_dict()
    via_sparse = convolve_power(sparse, 3).as_dict()
    for m, c in via_sparse.items():
        assert via_dense[m] == pytest.approx(c, rel=1e-12)


def test_rho_examples():
    s2 = weight_series(2, 1, 3)
    assert rho_s(16, s2, 2).value == pytest.approx(0.4805, abs=1e-4)
    assert rho_s(35, s2, 2).value == pytest.approx(1.523, abs=1e-3)
    assert rho_s(10**9, s2, 2).value == 0.0


def test_rho_odd_target_with_even_support_is_zero():
    even = CoefficientSeries.from_dict({8: L2, 64: 2.0})
    for n in (17, 65, 73):
        assert rho_s(n, even, 2).value == 0.0


def test_bruteforce_examples():
    for n in (16, 35, 54):
        assert rho_s_bruteforce(n, 2, 1, 3, 2).value == rho_s(n, weight_series(2, 1, 3), 2).value
    assert rho_s_bruteforce(343, 10, 3, 3, 1).value == math.log(7)
    assert rho_s_bruteforce(3 * 14**3, 10, 3, 3, 3).value == 0.0
    sols = rho_s_bruteforce(35, 2, 1, 3, 2, collect=True).solutions
    assert sols == [(2, 3)]


def test_oracle_equivalence_small_grid():
    for X, Y in [(10, 3), (20, 9), (25, 12)]:
        ser = weight_series(X, Y, 3)
        for s in (2, 3):
            power = convolve_power(ser, s)
            for n in power.freqs.tolist():
                assert rho_s(n, ser, s).value == rho_s_bruteforce(n, X, Y, 3, s).value


def test_full_circle_equals_rho():
    ser = weight_series(20, 8, 3)
    power = convolve_power(ser, 3)
    for n in power.freqs[::7].tolist():
        full = arc_integral(ser, 3, n, [(0, 1)])
        assert full.real == rho_s(n, ser, 3).value
        assert full.imag == 0.0


def test_empty_region_is_zero():
    ser = weight_series(20, 8, 3)
    assert arc_integral(ser, 2, 2 * 19**3, []) == 0


def test_arc_additivity_one_dissection():
    ser = weight_series(30, 10, 3)
    D = dissect(3, 400)
    power = convolve_power(ser, 3)
    for n in power.freqs[::11].tolist():
        major = arc_integral(ser, 3, n, D)
        minor = arc_integral(ser, 3, n, list(D.minor))
        total = rho_s(n, ser, 3).value
        assert abs(major + minor - total) <= 1e-6 * max(1.0, abs(total))


def test_interval_transform_zero_frequency_is_length():
    out = interval_transform(np.array([0, 5]), [(Fraction(0), Fraction(1, 3))])
    assert out[0] == pytest.approx(1 / 3)
    with pytest.raises(ContractError):
        interval_transform(np.array([1]), [(Fraction(1, 2), Fraction(1, 3))])


def test_hua_examples():
    ser = weight_series(10, 3, 3)
    want = math.log(7) ** 2 + math.log(11) ** 2 + math.log(13) ** 2
    assert hua_moment(ser, 2, "parseval") == pytest.approx(16.115, abs=1e-3)
    assert hua_moment(ser, 2, "parseval") == pytest.approx(want, rel=1e-14)
    assert hua_moment(ser, 2, "quadrature") == pytest.approx(want, rel=1e-6)
    assert hua_moment(CoefficientSeries.from_dict({}), 4) == 0.0
    with pytest.raises(ContractError):
        hua_moment(ser, 3, "parseval")


def test_hua_moment_normalized_is_finite():
    # empirical Hua ratio at s = 2 t_k is recorded, not bounded
    X, Y, k = 40, 20, 3
    ser = weight_series(X, Y, k)
    s = 4
    ratio = hua_moment(ser, s) / (Y ** (s - 1) * X ** (1 - k))
    assert math.isfinite(ratio) and ratio > 0


def test_nonnegative_powers():
    ser = weight_series(30, 15, 3)
    for s in (2, 3):
        assert convolve_power(ser, s).coeffs.min() >= 0
