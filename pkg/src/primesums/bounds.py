"""Right-hand sides of the minor-arc bounds and empirical scanning harnesses.

No bound is checked as a theorem: implied constants are unknown, so a
baseline scan pins the observed max ratio and later runs regress against it.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .arith import WeightKind, sieve_weights
from .dioph import RationalApprox, classify_arc, dirichlet_approx, exact_alpha, format_alpha
from .errors import DomainError
from .expsum import PhaseContext, weighted_sum, weyl_sum
from .params import SumParams

SCAN_COLUMNS = ["k", "x", "theta", "q", "a", "offset", "abs_sum", "rhs", "ratio", "arc"]
BASELINE_PREFIX = "# calibration_max_ratio="


def prime_sum_bound(params: SumParams, approx: RationalApprox, eps: float | None = None) -> float:
    """y^(1 - rho + eps) + y x^eps / (q + y^2 x^(k-2) |q alpha - a|)^(1/(2k)), constant 1."""
    if params.rho <= 0:
        raise DomainError("rho_k(theta) <= 0: need theta > 3/4")
    eps = params.epsilon if eps is None else eps
    x, y, k = params.x, params.y, params.k
    first = y ** (1 - params.rho + eps)
    second = y * x**eps / (approx.q + y * y * x ** (k - 2) * float(approx.err)) ** (1 / (2 * k))
    return first + second


def minor_arc_bound(Y: float, varrho: float, eps: float) -> float:
    return Y ** (1 - varrho + eps)


def circle_minor_bound(params: SumParams, eps: float | None = None) -> float:
    """Y^(1 - varrho + eps) with varrho = rho_k(theta) / 2 and Y = params.y."""
    if params.rho <= 0:
        raise DomainError("rho_k(theta) <= 0: need theta > 3/4")
    return minor_arc_bound(params.y, params.varrho, params.epsilon if eps is None else eps)


# ---------------------------------------------------------------------------
# scan


@dataclass(frozen=True)
class ScanRecord:
    k: int
    x: float
    theta: float
    q: int
    a: int
    offset: Fraction
    alpha: Fraction
    abs_sum: float
    rhs: float
    arc: str

    @property
    def ratio(self) -> float:
        return self.abs_sum / self.rhs

    def row(self) -> list[str]:
        return [
            str(self.k), repr(float(self.x)), repr(float(self.theta)), str(self.q), str(self.a),
            repr(float(self.offset)), repr(self.abs_sum), repr(self.rhs), repr(self.ratio), self.arc,
        ]


@dataclass
class ScanResult:
    records: list[ScanRecord]
    notes: list[str]

    @property
    def max_ratio(self) -> float:
        return max(r.ratio for r in self.records)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SCAN_COLUMNS)
        for rec in self.records:
            w.writerow(rec.row())
        return buf.getvalue()


def sample_alphas(params: SumParams, count: int, seed: int = 0, offsets=(0, 1, -1)) -> list[tuple[int, int, Fraction]]:
    """(q, a, offset) triples: q log-uniform on (P, Q], a a random unit mod q.

    ``offsets`` are multiples of 1/(2 q Q).
    """
    rng = np.random.default_rng(seed)
    q_lo = math.floor(params.P) + 1
    q_hi = math.floor(params.Q)
    if q_hi < q_lo:
        raise DomainError(f"no q with P < q <= Q (P={params.P:g}, Q={params.Q:g})")
    Qx = Fraction(params.Q)
    out = []
    for _ in range(count):
        u = rng.uniform(math.log(q_lo), math.log(q_hi))
        q = min(max(int(round(math.exp(u))), q_lo), q_hi)
        while True:
            a = int(rng.integers(1, q)) if q > 1 else 0
            if math.gcd(a, q) == 1:
                break
        for j in offsets:
            out.append((q, a, Fraction(j) / (2 * q * Qx)))
    return out


def _scan_point(args) -> ScanRecord | str:
    params, table, q, a, offset, bits = args
    alpha = (Fraction(a, q) + offset) % 1
    tag = classify_arc(alpha, params)
    if tag.major:
        return f"skipped alpha={format_alpha(alpha)}: major arc ({tag.q}, {tag.a})"
    ctx = PhaseContext(alpha, params.k, bits)
    s = weighted_sum(ctx, table)
    approx = dirichlet_approx(alpha, params.Q)
    rhs = prime_sum_bound(params, approx)
    return ScanRecord(params.k, params.x, params.theta, q, a, offset, alpha, abs(s.value), rhs, tag.label)


def minor_arc_scan(
    params: SumParams,
    count: int | None = None,
    seed: int = 0,
    alphas: list[Fraction] | None = None,
    bits: int = 320,
    workers: int = 1,
) -> ScanResult:
    """Evaluate |S_k| / prime_sum_bound over sampled minor-arc alphas.

    Give either ``count`` (number of sampled q; three offsets each) or an
    explicit list of ``alphas``. Major-arc samples are skipped with a note.
    """
    if alphas is not None:
        triples = []
        for al in alphas:
            al = exact_alpha(al)
            triples.append((al.denominator, al.numerator, Fraction(0)))
    else:
        triples = sample_alphas(params, count or 1, seed)
    lo, hi = params.interval
    table = sieve_weights(lo, hi, WeightKind.VON_MANGOLDT)
    jobs = [(params, table, q, a, off, bits) for q, a, off in triples]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_point, jobs, chunksize=8))
    else:
        results = [_scan_point(j) for j in jobs]
    records = [r for r in results if isinstance(r, ScanRecord)]
    notes = [r for r in results if isinstance(r, str)]
    if not records:
        raise DomainError("no minor-arc samples left after classification")
    return ScanResult(records, notes)


def write_baseline(result: ScanResult, path: Path) -> None:
    text = f"{BASELINE_PREFIX}{result.max_ratio!r}\n" + result.to_csv()
    Path(path).write_text(text)


def read_baseline(path: Path) -> tuple[float, str]:
    """Return (calibration constant, CSV body) from a baseline file."""
    text = Path(path).read_text()
    first, _, body = text.partition("\n")
    if not first.startswith(BASELINE_PREFIX):
        raise DomainError(f"{path} lacks a calibration header")
    return float(first[len(BASELINE_PREFIX):]), body


# ---------------------------------------------------------------------------
# Weyl-sum dichotomy monitor


@dataclass(frozen=True)
class DichotomyReport:
    abs_sum: float
    minor_bound: float
    major_bound: float | None
    q: int | None
    a: int | None
    C: float

    @property
    def holds(self) -> bool:
        if self.abs_sum <= self.C * self.minor_bound:
            return True
        return self.major_bound is not None and self.abs_sum <= self.C * self.major_bound


def weyl_dichotomy(alpha, k: int, x: int, y: int, gamma: float, rho: float,
                   eps: float = 0.05, C: float = 1.0) -> DichotomyReport:
    """Check that a Weyl sum over (x, x+y] obeys one branch of the dichotomy.

    Either |sum| <= C y^(1-rho+eps), or some a/q with q <= y^(k rho),
    |q alpha - a| <= x^(1-k) y^(k rho - 1) gives
    |sum| <= C (y^(1-rho+eps) + y / (q + y x^(k-1) |q alpha - a|)^(1/k)).
    """
    sigma = 1.0 / (2 * k * (k - 1))
    if gamma < 3 or not 0 < rho <= sigma / gamma:
        raise DomainError("need gamma >= 3 and 0 < rho <= sigma_k / gamma")
    if y > x or y < x ** (gamma / (2 * gamma - sigma - 1)):
        raise DomainError("need x^(gamma/(2 gamma - sigma_k - 1)) <= y <= x")
    alpha = exact_alpha(alpha)
    s = abs(weyl_sum(PhaseContext(alpha, k), x, y).value)
    minor = y ** (1 - rho + eps)
    q_max = math.floor(y ** (k * rho))
    tol = Fraction(x ** (1 - k) * y ** (k * rho - 1))
    found = None
    for q in range(1, q_max + 1):
        a = round(q * alpha)
        if math.gcd(a, q) == 1 and abs(q * alpha - a) <= tol:
            found = (q, a, abs(q * alpha - a))
            break
    major = None
    if found:
        q, a, err = found
        major = minor + y / (q + y * x ** (k - 1) * float(err)) ** (1 / k)
    return DichotomyReport(s, minor, major, found[0] if found else None, found[1] if found else None, C)
