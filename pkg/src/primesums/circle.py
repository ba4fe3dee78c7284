"""Representation counts, arc-restricted integrals and Hua moments on the Fourier side.

f(alpha) = sum_{|p - X| <= Y} (log p) e(p^k alpha) is a trigonometric
polynomial, so rho_s(n) = int_0^1 f^s e(-n alpha) is the n-th coefficient of
f^s and no quadrature is needed. Restricting to a union of intervals uses
the closed-form primitive of e(t alpha).

Sparse powers are built by enumerating multisets of the support in
lexicographic order and weighting each by its multinomial count. The
brute-force oracle walks prime tuples in the same order, so both routes
accumulate identical floating products in identical order.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

import numpy as np
from scipy.signal import fftconvolve

from .arith import primes_up_to
from .dioph import ArcDissection
from .errors import ContractError, InvariantError, ResourceError

MAX_MULTISETS = 20_000_000
MAX_DENSE = 50_000_000
MAX_TUPLES = 10**9
DENSE_THRESHOLD = 1 / 8
QUAD_BLOCK = 1 << 20


class SeriesKind(str, Enum):
    PRIME_LOG_AT_PK = "primelog"
    SINGULAR_INTEGRAL = "singular"


@dataclass(frozen=True)
class CoefficientSeries:
    """Sparse map frequency -> coefficient, frequencies ascending."""

    freqs: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.freqs.shape != self.coeffs.shape:
            raise ContractError("freqs and coeffs must have equal length")
        if self.freqs.size > 1 and np.any(np.diff(self.freqs) <= 0):
            raise ContractError("frequencies must be strictly increasing")

    def __len__(self) -> int:
        return int(self.freqs.size)

    @property
    def min_freq(self) -> int:
        return int(self.freqs[0]) if len(self) else 0

    @property
    def max_freq(self) -> int:
        return int(self.freqs[-1]) if len(self) else 0

    @property
    def density(self) -> float:
        if not len(self):
            return 0.0
        return len(self) / (self.max_freq - self.min_freq + 1)

    def coefficient(self, m: int) -> float:
        i = int(np.searchsorted(self.freqs, m))
        if i < len(self) and self.freqs[i] == m:
            return float(self.coeffs[i])
        return 0.0

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.freqs.tolist(), self.coeffs.tolist()))

    @classmethod
    def from_dict(cls, entries: dict[int, float]) -> CoefficientSeries:
        keys = sorted(entries)
        return cls(np.array(keys, dtype=np.int64), np.array([entries[m] for m in keys], dtype=np.float64))

    def _key(self) -> tuple[bytes, bytes]:
        return self.freqs.tobytes(), self.coeffs.tobytes()


def _window(X, Y) -> tuple[Fraction, Fraction]:
    X, Y = Fraction(X), Fraction(Y)
    if not X > Y >= 0:
        raise ContractError(f"need X > Y >= 0, got X={X}, Y={Y}")
    return X - Y, X + Y


def window_primes(X, Y) -> list[int]:
    """Primes p with |p - X| <= Y."""
    a, b = _window(X, Y)
    return [p for p in primes_up_to(math.floor(b)).tolist() if p >= a]


def weight_series(X, Y, k: int, kind: SeriesKind | str = SeriesKind.PRIME_LOG_AT_PK) -> CoefficientSeries:
    """Fourier coefficients of f (prime-log weights at p^k) or of v (m^(1/k - 1)/k)."""
    kind = SeriesKind(kind)
    a, b = _window(X, Y)
    if kind is SeriesKind.PRIME_LOG_AT_PK:
        ps = window_primes(X, Y)
        if ps and ps[-1] ** k >= 2**62:
            raise ResourceError("p^k overflows 64-bit frequencies")
        return CoefficientSeries(
            np.array([p**k for p in ps], dtype=np.int64), np.array([math.log(p) for p in ps])
        )
    lo = math.ceil(a**k)
    hi = math.floor(b**k)
    if hi - lo + 1 > MAX_DENSE:
        raise ResourceError(f"{hi - lo + 1} singular-integral weights exceed the budget")
    m = np.arange(max(lo, 1), hi + 1, dtype=np.int64)
    return CoefficientSeries(m, m.astype(np.float64) ** (-1 + 1 / k) / k)


def _multinomial(counts: Iterable[int], s: int) -> int:
    out = math.factorial(s)
    for c in counts:
        out //= math.factorial(c)
    return out


def _sparse_power(series: CoefficientSeries, s: int) -> CoefficientSeries:
    n = len(series)
    if math.comb(n + s - 1, s) > MAX_MULTISETS:
        raise ResourceError(f"{math.comb(n + s - 1, s)} multisets exceed the budget")
    freqs = series.freqs.tolist()
    ws = series.coeffs.tolist()
    acc: dict[int, float] = {}
    for combo in itertools.combinations_with_replacement(range(n), s):
        m = sum(freqs[i] for i in combo)
        count = _multinomial(Counter(combo).values(), s)
        acc[m] = acc.get(m, 0.0) + count * math.prod(ws[i] for i in combo)
    return CoefficientSeries.from_dict(acc)


def _dense_power(series: CoefficientSeries, s: int) -> CoefficientSeries:
    lo = series.min_freq
    width = series.max_freq - lo + 1
    if s * (width - 1) + 1 > MAX_DENSE:
        raise ResourceError("dense convolution power exceeds the budget")
    base = np.zeros(width)
    base[series.freqs - lo] = series.coeffs
    out = base
    for _ in range(s - 1):
        if out.size * base.size > 10**7:
            out = fftconvolve(out, base)
        else:
            out = np.convolve(out, base)
    return CoefficientSeries(np.arange(out.size, dtype=np.int64) + s * lo, out)


@lru_cache(maxsize=32)
def _power_cached(key: tuple[bytes, bytes], s: int) -> CoefficientSeries:
    freqs = np.frombuffer(key[0], dtype=np.int64)
    coeffs = np.frombuffer(key[1], dtype=np.float64)
    series = CoefficientSeries(freqs, coeffs)
    if s == 1 or len(series) == 0:
        return series
    if series.density > DENSE_THRESHOLD:
        out = _dense_power(series, s)
    else:
        out = _sparse_power(series, s)
    if out.coeffs.size and out.coeffs.min() < -1e-12 * max(1.0, float(np.abs(out.coeffs).max())):
        raise InvariantError("negative coefficient in a convolution power of a nonnegative series")
    return out


def convolve_power(series: CoefficientSeries, s: int) -> CoefficientSeries:
    """Exact s-fold convolution (the coefficients of the s-th power)."""
    if s < 1:
        raise ContractError("s must be >= 1")
    return _power_cached(series._key(), s)


@dataclass(frozen=True)
class RepCount:
    n: int
    s: int
    value: float
    method: str
    solutions: list[tuple[int, ...]] | None = None


def rho_s(n: int, series: CoefficientSeries, s: int) -> RepCount:
    """Weighted number of representations n = p_1^k + ... + p_s^k."""
    return RepCount(n, s, convolve_power(series, s).coefficient(n), "convolution")


def rho_s_bruteforce(n: int, X, Y, k: int, s: int, collect: bool = False) -> RepCount:
    """Brute-force oracle: nondecreasing prime tuples, last prime by table lookup."""
    ps = window_primes(X, Y)
    if math.comb(len(ps) + s - 1, s) > MAX_TUPLES:
        raise ResourceError("tuple space too large for brute force")
    pk = [p**k for p in ps]
    logs = [math.log(p) for p in ps]
    where = {v: i for i, v in enumerate(pk)}
    value = 0.0
    found: list[tuple[int, ...]] = []
    if not pk or n < s * pk[0] or n > s * pk[-1]:
        return RepCount(n, s, 0.0, "bruteforce", found if collect else None)

    def walk(start: int, remaining: int, rest: int, chosen: list[int]):
        nonlocal value
        if remaining == 1:
            j = where.get(rest)
            if j is not None and j >= start:
                idx = chosen + [j]
                count = _multinomial(Counter(idx).values(), s)
                value += count * math.prod(logs[i] for i in idx)
                if collect:
                    found.append(tuple(ps[i] for i in idx))
            return
        for i in range(start, len(pk)):
            if remaining * pk[i] > rest:
                break
            if rest - pk[i] > (remaining - 1) * pk[-1]:
                continue
            chosen.append(i)
            walk(i, remaining - 1, rest - pk[i], chosen)
            chosen.pop()

    walk(0, s, n, [])
    return RepCount(n, s, value, "bruteforce", found if collect else None)


# ---------------------------------------------------------------------------
# arcs


Region = Union[ArcDissection, list]


def _intervals(region: Region) -> list[tuple[Fraction, Fraction]]:
    if isinstance(region, ArcDissection):
        return region.major_intervals()
    return [(Fraction(a), Fraction(b)) for a, b in region]


def _unit_phase(t: np.ndarray, beta: Fraction) -> np.ndarray:
    """e(t beta) for integer t and exact rational beta."""
    u, w = beta.numerator, beta.denominator
    tmax = int(np.abs(t).max()) if t.size else 0
    if tmax * abs(u) < 2**62:
        r = (t * u) % w
    else:
        r = np.array([(int(ti) * u) % w for ti in t.tolist()], dtype=np.float64)
    ph = 2 * math.pi * (r / w)
    return np.cos(ph) + 1j * np.sin(ph)


def interval_transform(t: np.ndarray, intervals: list[tuple[Fraction, Fraction]]) -> np.ndarray:
    """I(t) = sum over [b1, b2] of int e(t alpha) d alpha, exact phases."""
    t = np.asarray(t, dtype=np.int64)
    out = np.zeros(t.shape, dtype=np.complex128)
    nz = t != 0
    tn = t[nz]
    denom = 2j * math.pi * tn
    length = Fraction(0)
    for b1, b2 in intervals:
        if b2 < b1:
            raise ContractError(f"empty interval ({b1}, {b2})")
        length += b2 - b1
        out[nz] += (_unit_phase(tn, b2) - _unit_phase(tn, b1)) / denom
    out[~nz] = float(length)
    return out


def arc_integral(series: CoefficientSeries, s: int, n: int, region: Region) -> complex:
    """int over region of f(alpha)^s e(-n alpha), by the closed-form primitive.

    ``region`` is a list of (b1, b2) intervals, or an ArcDissection
    (meaning its major arcs).
    """
    power = convolve_power(series, s)
    intervals = _intervals(region)
    if not intervals or not len(power):
        return 0j
    I = interval_transform(power.freqs - n, intervals)
    return complex(np.sum(power.coeffs * I))


# ---------------------------------------------------------------------------
# Hua moment


def _moment_quadrature(series: CoefficientSeries, s: int) -> float:
    """Trapezoid rule for int_0^1 |f|^s with step <= 1/(4 s max|freq|).

    f is evaluated on the grid j/N in blocks: with N = N1 N2 and
    j = j1 N2 + j2, each j2 is one length-N1 inverse FFT.
    """
    fmax = int(np.abs(series.freqs).max())
    need = max(4 * s * fmax, 1)
    N1 = min(QUAD_BLOCK, 1 << max(need - 1, 1).bit_length())
    N2 = -(-need // N1)
    N = N1 * N2
    freqs = series.freqs
    res = freqs % N1
    total = 0.0
    for j2 in range(N2):
        ph = 2 * math.pi * (((freqs * j2) % N) / N)
        v = np.zeros(N1, dtype=np.complex128)
        np.add.at(v, res, series.coeffs * (np.cos(ph) + 1j * np.sin(ph)))
        f = np.fft.ifft(v) * N1
        total += float(np.sum(np.abs(f) ** s))
    return total / N


def hua_moment(series: CoefficientSeries, s: int, method: str = "parseval") -> float:
    """int_0^1 |f(alpha)|^s d alpha by Parseval (even s) or Nyquist-safe quadrature."""
    if s < 1:
        raise ContractError("s must be >= 1")
    if not len(series):
        return 0.0
    if method == "parseval":
        if s % 2:
            raise ContractError("Parseval needs even s")
        c = convolve_power(series, s // 2).coeffs
        return float(np.sum(c * c))
    if method == "quadrature":
        return _moment_quadrature(series, s)
    raise ContractError(f"unknown method {method!r}")
