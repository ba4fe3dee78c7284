"""Prime sieving and the arithmetic functions behind every weight.

Provides:
- segmented sieve tabulation of Lambda(n), mu(n), log p, 1 over (lo, hi]
- trial-division multiplicative functions (mu, tau, phi)
- the forward-difference ratio ((n+h)^k - n^k)/h
- exhaustive checkers for the two gcd-power sum inequalities
- the admissible modulus R(k)
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import DomainError, ResourceError

CACHE_ENV = "PRIMESUMS_CACHE_DIR"
MAX_TABLE_ENTRIES = 200_000_000
SEGMENT = 1 << 20
TRIAL_TABLE_LIMIT = 10**6


class WeightKind(str, Enum):
    VON_MANGOLDT = "vonmangoldt"
    MOEBIUS = "moebius"
    PRIME_LOG = "primelog"
    UNIT = "unit"


@dataclass(frozen=True)
class WeightTable:
    """Weights w(n) for lo < n <= hi, stored at index n - lo - 1."""

    lo: int
    hi: int
    kind: WeightKind
    weights: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.hi - self.lo

    def at(self, n: int) -> float:
        if not self.lo < n <= self.hi:
            raise IndexError(f"n={n} outside ({self.lo}, {self.hi}]")
        return float(self.weights[n - self.lo - 1])

    def nonzero(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (n values, weights) where the weight is nonzero."""
        idx = np.flatnonzero(self.weights)
        return idx.astype(np.int64) + self.lo + 1, self.weights[idx]

    def abs_total(self) -> float:
        return float(np.abs(self.weights).sum())


# ---------------------------------------------------------------------------
# primes


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if is_p[i]:
            is_p[i * i :: i] = False
    return np.flatnonzero(is_p).astype(np.int64)


def _cache_path(directory: Path, bound: int) -> Path:
    return directory / f"primes_le_{bound}.txt"


def _read_cache(limit: int) -> np.ndarray | None:
    directory = os.environ.get(CACHE_ENV)
    if not directory:
        return None
    best = None
    for path in Path(directory).glob("primes_le_*.txt"):
        try:
            bound = int(path.stem.rsplit("_", 1)[1])
        except ValueError:
            continue
        if bound >= limit and (best is None or bound < best[0]):
            best = (bound, path)
    if best is None:
        return None
    primes = np.loadtxt(best[1], dtype=np.int64, ndmin=1)
    return primes[primes <= limit]


def _write_cache(limit: int, primes: np.ndarray) -> None:
    directory = os.environ.get(CACHE_ENV)
    if not directory:
        return
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    target = _cache_path(path, limit)
    tmp = target.with_suffix(".tmp")
    tmp.write_text("".join(f"{p}\n" for p in primes.tolist()))
    tmp.replace(target)


@lru_cache(maxsize=16)
def _primes_cached(limit: int) -> np.ndarray:
    cached = _read_cache(limit)
    if cached is not None:
        return cached
    primes = _simple_sieve(limit)
    _write_cache(limit, primes)
    return primes


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit, ascending.

    If the ``PRIMESUMS_CACHE_DIR`` environment variable is set, a cache file
    ``primes_le_<bound>.txt`` (one decimal prime per line) is read from or
    written to that directory.
    """
    primes = _primes_cached(int(limit))
    primes.flags.writeable = False
    return primes


# ---------------------------------------------------------------------------
# segmented sieve


def _segment_weights(a: int, b: int, kind: WeightKind, base: np.ndarray) -> np.ndarray:
    """Weights for a <= n < b (a >= 1)."""
    size = b - a
    n = np.arange(a, b, dtype=np.int64)
    if kind is WeightKind.UNIT:
        return np.ones(size)

    if kind is WeightKind.MOEBIUS:
        mu = np.ones(size, dtype=np.int8)
        rem = n.copy()
        for p in base.tolist():
            if p * p > b - 1:
                break
            mu[(-a) % p :: p] *= -1
            mu[(-a) % (p * p) :: p * p] = 0
            pe = p
            while pe < b:
                rem[(-a) % pe :: pe] //= p
                pe *= p
        # a cofactor > 1 is a single prime above sqrt(b)
        mu[rem > 1] *= -1
        return mu.astype(np.float64)

    is_p = np.ones(size, dtype=bool)
    is_p[n < 2] = False
    for p in base.tolist():
        if p * p > b - 1:
            break
        start = max(p * p, ((a + p - 1) // p) * p)
        if start < b:
            is_p[start - a :: p] = False
    w = np.zeros(size)
    w[is_p] = np.log(n[is_p].astype(np.float64))
    if kind is WeightKind.PRIME_LOG:
        return w
    # prime powers p^j, j >= 2
    for p in base.tolist():
        if p * p >= b:
            break
        logp = math.log(p)
        q = p * p
        while q < b:
            if q >= a:
                w[q - a] = logp
            q *= p
    return w


def sieve_weights(lo: int, hi: int, kind: WeightKind | str) -> WeightTable:
    """Tabulate an arithmetic weight over the integers lo < n <= hi.

    Args:
        lo: exclusive lower end, lo >= 0
        hi: inclusive upper end, hi > lo
        kind: which weight (von Mangoldt, Moebius, log on primes, unit)

    Raises:
        ResourceError: if hi - lo exceeds ``MAX_TABLE_ENTRIES``.
    """
    kind = WeightKind(kind)
    lo, hi = int(lo), int(hi)
    if lo < 0 or hi < lo:
        raise DomainError(f"need 0 <= lo <= hi, got lo={lo}, hi={hi}")
    if hi - lo > MAX_TABLE_ENTRIES:
        raise ResourceError(f"range of {hi - lo} entries exceeds cap {MAX_TABLE_ENTRIES}")
    base = primes_up_to(math.isqrt(hi) + 1)
    out = np.empty(hi - lo)
    for a in range(lo + 1, hi + 1, SEGMENT):
        b = min(a + SEGMENT, hi + 1)
        out[a - lo - 1 : b - lo - 1] = _segment_weights(a, b, kind, base)
    out.flags.writeable = False
    return WeightTable(lo, hi, kind, out)


# ---------------------------------------------------------------------------
# multiplicative functions


@lru_cache(maxsize=1)
def _trial_primes() -> list[int]:
    return primes_up_to(TRIAL_TABLE_LIMIT).tolist()


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division against the prime table."""
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    out = []
    limit = math.isqrt(n)
    if limit > TRIAL_TABLE_LIMIT:
        raise ResourceError(f"{n} is beyond the trial-division table")
    for p in _trial_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        out.append((n, 1))
    return out


def multiplicative(fn: str, n: int) -> int:
    """Evaluate 'moebius', 'divisor_count' or 'euler_phi' at n >= 1."""
    if n < 1:
        raise DomainError(f"{fn} is defined for n >= 1, got {n}")
    fac = factorize(n)
    if fn == "moebius":
        if any(e > 1 for _, e in fac):
            return 0
        return -1 if len(fac) % 2 else 1
    if fn == "divisor_count":
        return math.prod(e + 1 for _, e in fac)
    if fn == "euler_phi":
        return math.prod((p - 1) * p ** (e - 1) for p, e in fac)
    raise DomainError(f"unknown multiplicative function {fn!r}")


def moebius(n: int) -> int:
    return multiplicative("moebius", n)


def divisor_count(n: int) -> int:
    return multiplicative("divisor_count", n)


def euler_phi(n: int) -> int:
    return multiplicative("euler_phi", n)


def forward_difference_ratio(n: int, h: int, k: int) -> int:
    """R(n, h) = ((n + h)^k - n^k) / h, always an integer."""
    if n < 1 or h < 1 or k < 2:
        raise DomainError("need n, h >= 1 and k >= 2")
    q, r = divmod((n + h) ** k - n**k, h)
    assert r == 0
    return q


def admissible_modulus(k: int) -> int:
    """R(k) = prod p^eta over primes p with (p - 1) | k.

    eta = tau + 2 when p = 2 and tau > 0, otherwise tau + 1, where
    p^tau exactly divides k.
    """
    if k < 2:
        raise DomainError("admissible modulus needs k >= 2")
    R = 1
    for p in primes_up_to(k + 1).tolist():
        if k % (p - 1):
            continue
        tau = 0
        while k % p ** (tau + 1) == 0:
            tau += 1
        eta = tau + 2 if (p == 2 and tau > 0) else tau + 1
        R *= p**eta
    return R


# ---------------------------------------------------------------------------
# gcd-power sum inequalities


@dataclass(frozen=True)
class GcdSumReport:
    N: int
    r: int
    h: int
    k: int
    C: float
    eps: float
    lhs_a: float
    rhs_a: float
    lhs_b: float
    rhs_b: float

    @property
    def holds_a(self) -> bool:
        return self.lhs_a <= self.rhs_a * (1 + 1e-12)

    @property
    def holds_b(self) -> bool:
        return self.lhs_b <= self.rhs_b * (1 + 1e-12)

    @property
    def holds(self) -> bool:
        return self.holds_a and self.holds_b


def check_gcd_sums(
    N: int, r: int, h: int, k: int, C: float | None = None, eps: float = 0.1
) -> GcdSumReport:
    """Evaluate both gcd-power inequalities over N < n <= 2N.

    (a) sum (r, n^k)^(1/k) <= N tau(r)
    (b) sum over (n, h) = 1 of (r, R(n, h))^(1/k) <= C (N r^eps + r^(1/k + eps))

    ``C`` defaults to 4^k.
    """
    if min(N, r, h) < 1 or k < 3:
        raise DomainError("need N, r, h >= 1 and k >= 3")
    if C is None:
        C = 4.0**k
    lhs_a = 0.0
    lhs_b = 0.0
    for n in range(N + 1, 2 * N + 1):
        lhs_a += math.gcd(r, n**k) ** (1.0 / k)
        if math.gcd(n, h) == 1:
            lhs_b += math.gcd(r, forward_difference_ratio(n, h, k)) ** (1.0 / k)
    rhs_a = float(N * divisor_count(r))
    rhs_b = C * (N * r**eps + r ** (1.0 / k + eps))
    return GcdSumReport(N, r, h, k, C, eps, lhs_a, rhs_a, lhs_b, rhs_b)


def sweep_gcd_sum_a(N_max: int, r_max: int, k: int) -> list[tuple[int, int, float, float]]:
    """All (N, r) with inequality (a) violated, for N <= N_max, r <= r_max.

    Vectorized over N through prefix sums; returns the list of violations
    as (N, r, lhs, rhs).
    """
    n = np.arange(1, 2 * N_max + 1, dtype=np.int64)
    nk = n**k
    Ns = np.arange(1, N_max + 1)
    bad = []
    for r in range(1, r_max + 1):
        g = np.gcd(nk, r).astype(np.float64) ** (1.0 / k)
        cum = np.concatenate(([0.0], np.cumsum(g)))
        lhs = cum[2 * Ns] - cum[Ns]
        rhs = Ns * float(divisor_count(r))
        viol = np.flatnonzero(lhs > rhs * (1 + 1e-12))
        bad.extend((int(Ns[i]), r, float(lhs[i]), float(rhs[i])) for i in viol)
    return bad


def sweep_gcd_sum_b(
    N_max: int, r_max: int, h_max: int, k: int, C: float | None = None, eps: float = 0.1
) -> list[tuple[int, int, int, float, float]]:
    """Violations of inequality (b) for N <= N_max, r <= r_max, h <= h_max."""
    if C is None:
        C = 4.0**k
    n = np.arange(1, 2 * N_max + 1, dtype=np.int64)
    Ns = np.arange(1, N_max + 1)
    bad = []
    for h in range(1, h_max + 1):
        R = ((n + h) ** k - n**k) // h
        coprime = np.gcd(n, h) == 1
        for r in range(1, r_max + 1):
            g = np.where(coprime, np.gcd(R, r).astype(np.float64) ** (1.0 / k), 0.0)
            cum = np.concatenate(([0.0], np.cumsum(g)))
            lhs = cum[2 * Ns] - cum[Ns]
            rhs = C * (Ns * r**eps + r ** (1.0 / k + eps))
            viol = np.flatnonzero(lhs > rhs * (1 + 1e-12))
            bad.extend((int(Ns[i]), r, h, float(lhs[i]), float(rhs[i])) for i in viol)
    return bad
