"""Singular series, complete sums S(q, a), singular integral and the main term.

    S(q, a) = sum_{1 <= r <= q, (r, q) = 1} e(a r^k / q)
    A(q, n) = phi(q)^(-s) sum_{(a, q) = 1} S(q, a)^s e(-n a / q)
    singular series = sum_q A(q, n)

All phases are exact rationals t/q with t computed in integer arithmetic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import admissible_modulus, euler_phi, factorize, primes_up_to
from .circle import SeriesKind, convolve_power, rho_s, weight_series
from .errors import DomainError, InvariantError

DEFAULT_QS = 1000
IMAG_TOL = 1e-10


@lru_cache(maxsize=4096)
def _roots_of_unity(q: int) -> np.ndarray:
    t = 2 * np.pi * np.arange(q) / q
    out = np.cos(t) + 1j * np.sin(t)
    out.flags.writeable = False
    return out


def _units(q: int) -> np.ndarray:
    r = np.arange(1, q + 1, dtype=np.int64)
    return r[np.gcd(r, q) == 1]


def _powmod(r: np.ndarray, k: int, q: int) -> np.ndarray:
    out = np.ones_like(r) % q
    base = r % q
    while k:
        if k & 1:
            out = (out * base) % q
        base = (base * base) % q
        k >>= 1
    return out


def gauss_sum(q: int, a: int, k: int) -> complex:
    """S(q, a) by direct summation over units r mod q."""
    if q < 1:
        raise DomainError("q must be >= 1")
    if math.gcd(a, q) != 1:
        warnings.warn(f"gauss_sum called with (a, q) = ({a}, {q}) not coprime", stacklevel=2)
    E = _roots_of_unity(q)
    total = 0j
    for r in range(1, q + 1):
        if math.gcd(r, q) == 1:
            total += E[(a * pow(r, k, q)) % q]
    return total


@lru_cache(maxsize=8192)
def _gauss_vector(q: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """(units a mod q, S(q, a) for each) via residue counts of r^k."""
    units = _units(q)
    residues, counts = np.unique(_powmod(units, k, q), return_counts=True)
    E = _roots_of_unity(q)
    S = (E[np.outer(units, residues) % q] * counts).sum(axis=1)
    return units, S


def series_term(q: int, n: int, s: int, k: int) -> float:
    """A(q, n); the imaginary part cancels and is checked to be <= 1e-10."""
    if q < 1:
        raise DomainError("q must be >= 1")
    if q == 1:
        return 1.0
    units, S = _gauss_vector(q, k)
    E = _roots_of_unity(q)
    phase = E[(-n * units) % q]
    value = np.sum(S**s * phase) / float(euler_phi(q)) ** s
    if abs(value.imag) > IMAG_TOL:
        raise InvariantError(f"A({q}, {n}) has imaginary part {value.imag:.3e}")
    return float(value.real)


def local_factor(p: int, n: int, s: int, k: int, Q_S: int) -> float:
    """1 + sum_{j >= 1, p^j <= Q_S} A(p^j, n)."""
    terms = [1.0]
    pj = p
    while pj <= Q_S:
        terms.append(series_term(pj, n, s, k))
        pj *= p
    return math.fsum(terms)


def local_density(q: int, n: int, s: int, k: int) -> float:
    """q * #{units r_i mod q : sum r_i^k = n mod q} / phi(q)^s, counted exactly.

    For q = p^J this equals the truncated local factor at p.
    """
    units = _units(q)
    counts = np.bincount(_powmod(units, k, q), minlength=q).astype(object)
    dist = np.zeros(q, dtype=object)
    dist[0] = 1
    for _ in range(s):
        nxt = np.zeros(q, dtype=object)
        for j in np.flatnonzero(counts):
            nxt += np.roll(dist, j) * counts[j]
        dist = nxt
    return q * int(dist[n % q]) / len(units) ** s


def local_obstructions(n: int, s: int, k: int) -> list[int]:
    """Prime powers p^eta exactly dividing R(k) at which the local density of n vanishes.

    Empty exactly when n = s (mod R(k)); each entry is a modulus q with no
    solution to r_1^k + ... + r_s^k = n in units mod q.
    """
    return [
        p**e for p, e in factorize(admissible_modulus(k)) if local_density(p**e, n, s, k) == 0
    ]


@dataclass
class SingularSeriesResult:
    n: int
    s: int
    k: int
    Q_S: int
    terms: dict[int, float] = field(repr=False)
    total: float | None
    euler_product_total: float | None
    local_factors: dict[int, float] = field(repr=False)
    tail_estimate: float

    @property
    def discrepancy(self) -> float | None:
        if self.total is None or self.euler_product_total is None:
            return None
        return abs(self.total - self.euler_product_total)


def _tail_estimate(terms: dict[int, float], Q_S: int) -> float:
    """Heuristic bound on sum_{q > Q_S} |A(q, n)| from the last decade's decay.

    Fits |A(q)| ~ q^(-beta) on q in (Q_S/10, Q_S], takes the envelope
    constant C = max |A(q)| q^beta and returns C Q_S^(1-beta)/(beta-1);
    infinite when the fit is impossible or beta <= 1.
    """
    pts = [(q, abs(v)) for q, v in terms.items() if q > Q_S / 10 and abs(v) > 1e-12]
    if not pts and Q_S >= 10:
        return 0.0
    if len(pts) < 5:
        return math.inf
    lq = np.log([q for q, _ in pts])
    la = np.log([v for _, v in pts])
    slope = np.polyfit(lq, la, 1)[0]
    beta = -slope
    if beta <= 1:
        return math.inf
    C = float(np.max(la + beta * lq))
    return math.exp(C) * Q_S ** (1 - beta) / (beta - 1)


def singular_series(n: int, s: int, k: int, Q_S: int = DEFAULT_QS, method: str = "both") -> SingularSeriesResult:
    """Truncated sum over q <= Q_S and/or the Euler product over p <= Q_S."""
    if Q_S < 1:
        raise DomainError("Q_S must be >= 1")
    if method not in ("truncate", "euler", "both"):
        raise DomainError(f"unknown method {method!r}")
    terms = {q: series_term(q, n, s, k) for q in range(1, Q_S + 1)}
    total = math.fsum(terms.values()) if method != "euler" else None
    factors = {}
    euler = None
    if method != "truncate":
        for p in primes_up_to(Q_S).tolist():
            f = [1.0]
            pj = p
            while pj <= Q_S:
                f.append(terms[pj])
                pj *= p
            factors[p] = math.fsum(f)
        euler = math.prod(factors.values())
    return SingularSeriesResult(n, s, k, Q_S, terms, total, euler, factors, _tail_estimate(terms, Q_S))


def singular_integral(n: int, X, Y, k: int, s: int) -> float:
    """n-th coefficient of v^s, v(beta) = k^-1 sum m^(1/k - 1) e(beta m) over the window."""
    v = weight_series(X, Y, k, SeriesKind.SINGULAR_INTEGRAL)
    return convolve_power(v, s).coefficient(n)


def main_term(n: int, X, Y, k: int, s: int, Q_S: int = DEFAULT_QS) -> dict:
    """Singular series times singular integral, against the scale Y^(s-1) X^(1-k).

    The exact rho_s(n) is reported alongside for exploration only.
    """
    ss = singular_series(n, s, k, Q_S, "truncate")
    J = singular_integral(n, X, Y, k, s)
    scale = float(Y) ** (s - 1) * float(X) ** (1 - k)
    product = ss.total * J
    exact = rho_s(n, weight_series(X, Y, k), s).value
    return {
        "n": n,
        "S": ss.total,
        "J": J,
        "product": product,
        "scale": scale,
        "ratio": product / scale,
        "tail_estimate": ss.tail_estimate,
        "rho_exact": exact,
    }
