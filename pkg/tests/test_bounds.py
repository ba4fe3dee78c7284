import math
from fractions import Fraction

import pytest

from primesums.bounds import (
    SCAN_COLUMNS,
    circle_minor_bound,
    minor_arc_bound,
    minor_arc_scan,
    prime_sum_bound,
    read_baseline,
    sample_alphas,
    write_baseline,
)
from primesums.dioph import RationalApprox, classify_arc
from primesums.errors import DomainError
from primesums.params import SumParams


def _approx(q, alpha=Fraction(0)):
    return RationalApprox(1, q, Fraction(0), alpha, 10.0)


def test_prime_sum_bound_second_term():
    p = SumParams(3, 1e6, 0.9, 1e-4, epsilon=0.05)
    rhs = prime_sum_bound(p, _approx(100), eps=0)
    first = p.y ** (1 - p.rho)
    assert rhs - first == pytest.approx(p.y / 100 ** (1 / 6), rel=1e-12)
    assert p.y / 100 ** (1 / 6) == pytest.approx(p.y / 2.154, rel=1e-3)


def test_prime_sum_bound_decreasing_in_q():
    p = SumParams(3, 1e6, 0.9, 1e-4)
    vals = [prime_sum_bound(p, _approx(q)) for q in range(1, 2000, 37)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_first_term_tends_to_y():
    p = SumParams(3, 1e6, 0.75 + 1e-9, 1.0)
    assert p.rho == pytest.approx(0, abs=1e-10)
    assert prime_sum_bound(p, _approx(10**90), eps=0) == pytest.approx(p.y, rel=1e-9)


def test_minor_arc_bound_example():
    assert minor_arc_bound(1e3, 1e-3, 0) == pytest.approx(993.1, abs=0.05)
    p = SumParams(3, 1e6, 0.9, 1.0)
    assert circle_minor_bound(p, eps=0) == pytest.approx(p.y ** (1 - 0.00078125), rel=1e-12)


def test_scan_single_alpha_record():
    p = SumParams(3, 1e4, 0.85, 1e-4)
    assert p.P < 7 <= p.Q
    res = minor_arc_scan(p, alphas=[Fraction(1, 7)])
    assert len(res.records) == 1
    rec = res.records[0]
    assert (rec.q, rec.a, rec.arc) == (7, 1, "minor")
    assert math.isfinite(rec.ratio) and rec.ratio > 0


def test_scan_skips_major_alpha():
    p = SumParams(3, 1e4, 0.85, 1e-4)
    res = minor_arc_scan(p, alphas=[Fraction(0), Fraction(1, 7)])
    assert len(res.records) == 1
    assert any("major" in note for note in res.notes)
    with pytest.raises(DomainError):
        minor_arc_scan(p, alphas=[Fraction(0)])


def test_scan_is_deterministic():
    p = SumParams(3, 1e5, 0.9, 1e-4)
    a = minor_arc_scan(p, count=5, seed=4).to_csv()
    b = minor_arc_scan(p, count=5, seed=4).to_csv()
    assert a == b
    assert a.splitlines()[0] == ",".join(SCAN_COLUMNS)
    assert minor_arc_scan(p, count=5, seed=5).to_csv() != a


def test_samples_are_minor_and_in_range():
    p = SumParams(3, 1e6, 0.9, 1e-4)
    for q, a, off in sample_alphas(p, 30, seed=1):
        assert p.P < q <= p.Q and math.gcd(a, q) == 1
        assert abs(off) * 2 * q * Fraction(p.Q) in (0, 1)
        assert not classify_arc((Fraction(a, q) + off) % 1, p).major


def test_baseline_round_trip(tmp_path):
    p = SumParams(3, 1e5, 0.9, 1e-4)
    res = minor_arc_scan(p, count=3, seed=0)
    path = tmp_path / "base.csv"
    write_baseline(res, path)
    const, body = read_baseline(path)
    assert const == res.max_ratio
    assert body == res.to_csv()
