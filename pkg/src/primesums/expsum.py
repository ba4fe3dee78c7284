"""Phase-exact evaluation of Weyl sums, weighted prime sums and bilinear forms.

alpha is held as a B-bit fixed-point integer A (alpha ~ A / 2^B). The phase of
n^k alpha is (n^k * A mod 2^B) / 2^B, computed with Python big integers, so it
carries no accumulated floating error. Only the top 64 fractional bits are
turned into a double before taking e(.). Sums are reduced with a fixed
chunked pairwise tree, so results do not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np

from .arith import WeightTable
from .dioph import DEFAULT_BITS, exact_alpha
from .errors import ContractError, InvariantError
from .params import SumParams

CHUNK = 1 << 16
TWO_PI = 2.0 * math.pi

Coefficients = Union[Callable[[int], float], np.ndarray, Sequence[float]]


@dataclass(frozen=True)
class PhaseContext:
    """alpha (exact) rounded to ``bits``-bit fixed point, for the phase n^k alpha."""

    alpha: Fraction
    k: int
    bits: int = DEFAULT_BITS
    x_max: float | None = None
    workers: int = field(default=1, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", exact_alpha(self.alpha))
        if self.k < 1:
            raise ContractError("k must be >= 1")
        if self.bits < 64:
            raise ContractError("need at least 64 fixed-point bits")
        if self.x_max is not None:
            self.require(self.x_max)

    @property
    def A(self) -> int:
        return round(self.alpha * (1 << self.bits)) % (1 << self.bits)

    def require(self, n_max: float) -> None:
        """Raise ContractError unless bits >= k log2(n_max) + 64."""
        need = self.k * math.log2(max(float(n_max), 2.0)) + 64
        if self.bits < need:
            raise ContractError(
                f"{self.bits} bits too few for k={self.k}, n up to {n_max:g} (need {math.ceil(need)})"
            )

    def phase_numerator(self, n: int) -> int:
        """Exact fixed-point phase: (n^k A mod 2^B), so phase = result / 2^B."""
        return (pow(n, self.k) * self.A) & ((1 << self.bits) - 1)

    def phase_top64(self, n: int) -> int:
        """The phase of n^k alpha rounded to 64 fractional bits, as an integer mod 2^64."""
        return _top_chunk(self.A, self.k, self.bits, [n])[0]

    def phases(self, ns) -> np.ndarray:
        """Phases of n^k alpha mod 1 as doubles in [-1/2, 1/2)."""
        ns = [int(n) for n in ns]
        if ns:
            self.require(max(ns))
        top = _top_bits(self.A, self.k, self.bits, ns, self.workers)
        return np.array(top, dtype=np.uint64).view(np.int64) / 2.0**64

    def roots(self, ns) -> np.ndarray:
        """e(n^k alpha) for each n."""
        ph = TWO_PI * self.phases(ns)
        return np.cos(ph) + 1j * np.sin(ph)


def _top_chunk(A: int, k: int, bits: int, ns: list[int]) -> list[int]:
    # phase rounded to the nearest multiple of 2^-64, wrapped mod 1
    mask = (1 << bits) - 1
    shift = bits - 64
    half = 1 << (shift - 1)
    top = (1 << 64) - 1
    return [((((n**k * A) & mask) + half) >> shift) & top for n in ns]


def _top_bits(A: int, k: int, bits: int, ns: list[int], workers: int) -> list[int]:
    if workers <= 1 or len(ns) <= CHUNK:
        return _top_chunk(A, k, bits, ns)
    chunks = [ns[i : i + CHUNK] for i in range(0, len(ns), CHUNK)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_top_chunk, [A] * len(chunks), [k] * len(chunks), [bits] * len(chunks), chunks)
        out: list[int] = []
        for part in parts:
            out.extend(part)
    return out


@lru_cache(maxsize=4)
def _root_table(ctx: PhaseContext, lo: int, hi: int) -> np.ndarray:
    table = ctx.roots(range(lo + 1, hi + 1))
    table.flags.writeable = False
    return table


def root_table(ctx: PhaseContext, lo: int, hi: int) -> np.ndarray:
    """e(n^k alpha) for lo < n <= hi, index n - lo - 1 (cached)."""
    return _root_table(ctx, int(lo), int(hi))


# ---------------------------------------------------------------------------
# reduction


def tree_sum(values: np.ndarray) -> tuple[complex, int]:
    """Sum in chunks of CHUNK terms, then combine chunk sums pairwise.

    Returns (sum, depth of the pairwise tree).
    """
    values = np.asarray(values)
    if values.size == 0:
        return 0j, 0
    level = [complex(values[i : i + CHUNK].sum()) for i in range(0, values.size, CHUNK)]
    depth = 0
    while len(level) > 1:
        nxt = [level[i] + level[i + 1] for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
        depth += 1
    return level[0], depth


@dataclass(frozen=True)
class SumValue:
    value: complex
    terms: int
    reduction_depth: int
    abs_weight: float = 0.0
    notes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if abs(self.value) > self.abs_weight * (1 + 1e-9) + 1e-9:
            raise InvariantError(f"|S| = {abs(self.value)} exceeds sum of |weights| = {self.abs_weight}")

    def __abs__(self) -> float:
        return abs(self.value)

    def __complex__(self) -> complex:
        return self.value


ZERO = SumValue(0j, 0, 0, 0.0)


def interval(x, y) -> tuple[int, int]:
    """Integer endpoints (lo, hi] with lo = floor(x), hi = floor(x + y)."""
    if y < 0:
        raise ContractError("y must be non-negative")
    if isinstance(x, float) or isinstance(y, float):
        return math.floor(x), math.floor(x + y)
    return math.floor(Fraction(x)), math.floor(Fraction(x) + Fraction(y))


# ---------------------------------------------------------------------------
# sums


def weyl_sum(ctx: PhaseContext, x, y) -> SumValue:
    """sum_{x < n <= x + y} e(n^k alpha)."""
    lo, hi = interval(x, y)
    if hi <= lo:
        return ZERO
    total, depth = tree_sum(root_table(ctx, lo, hi))
    return SumValue(total, hi - lo, depth, float(hi - lo))


def weighted_sum(ctx: PhaseContext, table: WeightTable) -> SumValue:
    """sum w(n) e(n^k alpha) over the table's range, phases taken only where w != 0.

    With a von Mangoldt table over (x, x + y] this is S_k(x, y; alpha); with a
    prime-log table over [X - Y, X + Y] it is f(alpha).
    """
    ns, ws = table.nonzero()
    if ns.size == 0:
        return ZERO
    total, depth = tree_sum(ws * ctx.roots(ns.tolist()))
    return SumValue(total, int(ns.size), depth, float(np.abs(ws).sum()))


def _coef_vector(f: Coefficients, start: int, stop: int) -> np.ndarray:
    """Coefficient values for the integers start..stop inclusive."""
    if stop < start:
        return np.zeros(0)
    if callable(f):
        return np.fromiter((f(m) for m in range(start, stop + 1)), dtype=np.float64, count=stop - start + 1)
    arr = np.asarray(f, dtype=np.float64)
    if stop >= arr.size:
        raise ContractError(f"coefficient table of length {arr.size} does not cover index {stop}")
    return arr[start : stop + 1]


def _bilinear(
    xi: Coefficients,
    m_lo: int,
    m_hi: int,
    eta: Coefficients | None,
    ctx: PhaseContext,
    lo: int,
    hi: int,
    with_log: bool,
) -> SumValue:
    """sum_{m_lo < m <= m_hi} xi(m) sum_{lo < mn <= hi} eta(n) [log n] e((mn)^k alpha)."""
    m_lo = max(m_lo, 0)
    m_hi = min(m_hi, hi)
    if m_hi <= m_lo or hi <= lo:
        return ZERO
    table = root_table(ctx, lo, hi)
    xs = _coef_vector(xi, m_lo + 1, m_hi)
    outer = []
    terms = 0
    abs_w = 0.0
    depth = 0
    for m, c in zip(range(m_lo + 1, m_hi + 1), xs.tolist()):
        if c == 0:
            continue
        n0, n1 = lo // m + 1, hi // m
        if n1 < n0:
            continue
        inner = table[n0 * m - lo - 1 :: m]
        w = None
        if eta is not None:
            w = _coef_vector(eta, n0, n1)
        if with_log:
            logs = np.log(np.arange(n0, n1 + 1, dtype=np.float64))
            w = logs if w is None else w * logs
        if w is None:
            s, d = tree_sum(inner)
            abs_w += abs(c) * inner.size
        else:
            s, d = tree_sum(w * inner)
            abs_w += abs(c) * float(np.abs(w).sum())
        outer.append(c * s)
        terms += inner.size
        depth = max(depth, d)
    total, d = tree_sum(np.array(outer, dtype=np.complex128))
    return SumValue(total, terms, depth + d + 1, abs_w)


def _m_range(M: float, cap: float | None) -> tuple[int, int]:
    top = 2 * M if cap is None else min(2 * M, cap)
    return math.floor(M), math.floor(top)


def type_i_sum(
    xi: Coefficients,
    M: float,
    ctx: PhaseContext,
    x,
    y,
    with_log: bool = False,
    cap: float | None = None,
) -> SumValue:
    """Type I sum: sum_{M < m <= 2M} xi(m) sum_{x < mn <= x+y} e((mn)^k alpha) [log n].

    ``xi`` is a callable or an array indexed by m. ``cap`` clips the outer
    range to m <= cap, for dyadic covers of a non-dyadic range.
    """
    lo, hi = interval(x, y)
    m_lo, m_hi = _m_range(M, cap)
    return _bilinear(xi, m_lo, m_hi, None, ctx, lo, hi, with_log)


def type_ii_sum(
    xi: Coefficients,
    eta: Coefficients,
    M: float,
    ctx: PhaseContext,
    x,
    y,
    params: SumParams | None = None,
    cap: float | None = None,
) -> SumValue:
    """Type II sum: sum_{M < m <= 2M} xi(m) sum_{x < mn <= x+y} eta(n) e((mn)^k alpha).

    When ``params`` is given, ``notes['window_ok']`` records whether
    x^(1/2) <= M <= y^(1 - 2 rho) holds (implied constant 1).
    """
    lo, hi = interval(x, y)
    m_lo, m_hi = _m_range(M, cap)
    out = _bilinear(xi, m_lo, m_hi, eta, ctx, lo, hi, False)
    if params is not None:
        ok = math.sqrt(params.x) <= M <= params.y ** (1 - 2 * params.rho)
        out.notes["window_ok"] = bool(ok)
    return out


def dyadic_blocks(start: float, stop: float) -> list[float]:
    """Values M with (M, 2M] covering (start, stop]."""
    out = []
    M = start
    while M < stop:
        out.append(M)
        M *= 2
    return out


def combine(values: list[SumValue]) -> SumValue:
    """Sum several SumValues with the same pairwise reduction."""
    if not values:
        return ZERO
    total, d = tree_sum(np.array([v.value for v in values], dtype=np.complex128))
    return SumValue(
        total,
        sum(v.terms for v in values),
        max(v.reduction_depth for v in values) + d,
        sum(v.abs_weight for v in values),
    )
