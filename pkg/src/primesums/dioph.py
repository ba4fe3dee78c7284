"""Continued fractions, Dirichlet approximation and the major/minor arc dissection.

Every alpha handled here is exact: a ``Fraction`` (a rational, or a B-bit
binary fixed-point value, which is a rational with denominator 2^B).
Floats are rejected rather than silently rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from numbers import Integral

from .errors import ContractError, DomainError
from .params import SumParams

DEFAULT_BITS = 320


def exact_alpha(alpha) -> Fraction:
    """Coerce to an exact ``Fraction`` in [0, 1); floats raise ContractError."""
    if isinstance(alpha, bool) or isinstance(alpha, float):
        raise ContractError("alpha must be exact (Fraction or int), not float")
    if isinstance(alpha, Integral):
        alpha = Fraction(int(alpha))
    if not isinstance(alpha, Fraction):
        raise ContractError(f"cannot use {type(alpha).__name__} as an exact alpha")
    if not 0 <= alpha < 1:
        raise ContractError(f"alpha must lie in [0, 1), got {alpha}")
    return alpha


def fixed_point(decimal: str, bits: int) -> Fraction:
    """Round a decimal string to the nearest ``bits``-bit binary fixed-point value."""
    try:
        d = Fraction(Decimal(decimal))
    except (InvalidOperation, ValueError) as exc:
        raise ContractError(f"not a decimal: {decimal!r}") from exc
    if bits < 1:
        raise ContractError("bits must be positive")
    scale = 1 << bits
    return Fraction(round(d * scale), scale) % 1


def parse_alpha(text: str, bits: int | None = None) -> Fraction:
    """Parse ``a/q`` (exact rational) or ``0.ddd@B`` / a decimal plus ``bits``.

    A bare decimal without a bit count is rejected.
    """
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            value = Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError) as exc:
            raise ContractError(f"bad rational alpha {text!r}") from exc
        return exact_alpha(value % 1)
    if "@" in text:
        dec, _, b = text.partition("@")
        try:
            bits = int(b)
        except ValueError as exc:
            raise ContractError(f"bad bit count in {text!r}") from exc
        return fixed_point(dec, bits)
    if bits is None:
        if text.lstrip("+-").isdigit():
            return exact_alpha(Fraction(int(text)) % 1)
        raise ContractError(f"inexact alpha {text!r}: use a/q or 0.ddd@B (or give --bits)")
    return fixed_point(text, bits)


def format_alpha(alpha: Fraction) -> str:
    return f"{alpha.numerator}/{alpha.denominator}"


# ---------------------------------------------------------------------------
# continued fractions


def continued_fraction(alpha, max_terms: int = 256) -> list[tuple[int, int]]:
    """Convergents (a_i, q_i) of an exact alpha in [0, 1).

    >>> continued_fraction(Fraction(1, 3))
    [(0, 1), (1, 3)]
    """
    alpha = exact_alpha(alpha)
    if max_terms < 1:
        raise ContractError("max_terms must be >= 1")
    num, den = alpha.numerator, alpha.denominator
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    out = []
    while len(out) < max_terms:
        c, rem = divmod(num, den)
        h_prev, h = h, c * h + h_prev
        k_prev, k = k, c * k + k_prev
        out.append((h, k))
        if rem == 0:
            break
        num, den = den, rem
    return out


@dataclass(frozen=True)
class RationalApprox:
    """a/q with err = |q alpha - a|, built against a given Q."""

    a: int
    q: int
    err: Fraction
    alpha: Fraction
    Q: float

    def verify(self) -> bool:
        """Exact check of 1 <= q <= Q, (a, q) = 1, |q alpha - a| <= 1/Q."""
        Qx = Fraction(self.Q)
        return (
            1 <= self.q <= Qx
            and math.gcd(self.a, self.q) == 1
            and abs(self.q * self.alpha - self.a) == self.err
            and self.err * Qx <= 1
        )


def dirichlet_approx(alpha, Q: float) -> RationalApprox:
    """Return the convergent a/q with the largest q <= Q and |q alpha - a| <= 1/Q."""
    alpha = exact_alpha(alpha)
    if Q < 1:
        raise DomainError(f"Q must be >= 1, got {Q}")
    Qx = Fraction(Q)
    best = None
    for a, q in continued_fraction(alpha, max_terms=10_000):
        if q > Qx:
            break
        err = abs(q * alpha - a)
        if err * Qx <= 1:
            best = (a, q, err)
    if best is None:  # not reachable: Dirichlet's theorem
        raise DomainError("no admissible approximation found")
    approx = RationalApprox(best[0], best[1], best[2], alpha, Q)
    if not approx.verify():
        raise DomainError(f"approximation {approx} failed exact verification")
    return approx


# ---------------------------------------------------------------------------
# arcs


@dataclass(frozen=True)
class ArcTag:
    major: bool
    q: int
    a: int
    err: Fraction

    @property
    def label(self) -> str:
        return "major" if self.major else "minor"


def _q_ceiling(Q: float) -> int:
    return math.ceil(Fraction(Q))


def _major_hit(alpha: Fraction, P: float, Qc: int) -> tuple[int, int, Fraction] | None:
    """Smallest q <= P with some a, |q alpha - a| <= 1/Qc, or None."""
    qmax = math.floor(P)
    if Qc > 2 * qmax:
        # Legendre: any such a/q is a convergent of alpha
        for a, q in continued_fraction(alpha, max_terms=10_000):
            if q > qmax:
                return None
            err = abs(q * alpha - a)
            if err * Qc <= 1:
                return q, a, err
        return None
    for q in range(1, qmax + 1):
        for a in (math.floor(q * alpha), math.floor(q * alpha) + 1):
            err = abs(q * alpha - a)
            if err * Qc <= 1:
                return q, a, err
    return None


def classify(alpha, P: float, Q: float) -> ArcTag:
    """Major/minor tag for alpha against the dissection with parameters P, Q.

    Arcs use the integer ceiling of Q, so the tag agrees exactly with
    membership in :func:`dissect`'s intervals. A minor tag carries the
    Dirichlet approximant for Q.
    """
    alpha = exact_alpha(alpha)
    hit = _major_hit(alpha, P, _q_ceiling(Q))
    if hit is not None:
        q, a, err = hit
        return ArcTag(True, q, a, err)
    approx = dirichlet_approx(alpha, Q)
    return ArcTag(False, approx.q, approx.a, approx.err)


def classify_arc(alpha, params: SumParams) -> ArcTag:
    return classify(alpha, params.P, params.Q)


@dataclass(frozen=True)
class Arc:
    q: int
    a: int
    lo: Fraction
    hi: Fraction

    @property
    def center(self) -> Fraction:
        return Fraction(self.a, self.q)

    @property
    def halfwidth(self) -> Fraction:
        return (self.hi - self.lo) / 2 if 0 < self.a < self.q else self.hi - self.lo


@dataclass(frozen=True)
class ArcDissection:
    """Major arcs around a/q (0 <= a <= q <= P) and the minor intervals between them.

    0 and 1 are identified: the arcs at 0/1 and 1/1 are the two halves of
    one arc, clipped to [0, 1).
    """

    P: float
    Q: float
    Qc: int
    arcs: tuple[Arc, ...]
    minor: tuple[tuple[Fraction, Fraction], ...]

    def major_intervals(self) -> list[tuple[Fraction, Fraction]]:
        return [(arc.lo, arc.hi) for arc in self.arcs]

    def major_measure(self) -> Fraction:
        return sum((arc.hi - arc.lo for arc in self.arcs), Fraction(0))

    def minor_measure(self) -> Fraction:
        return sum((b - a for a, b in self.minor), Fraction(0))

    def contains(self, alpha) -> bool:
        """True when alpha mod 1 lies in a (closed) major arc."""
        alpha = exact_alpha(alpha) % 1
        return any(arc.lo <= alpha <= arc.hi for arc in self.arcs)


def dissect(P: float, Q: float) -> ArcDissection:
    """Build the arc dissection for real P >= 1 and Q > 2 P^2."""
    if P < 1:
        raise DomainError(f"P must be >= 1, got {P}")
    if not Q > 2 * P * P:
        raise DomainError(f"major arcs overlap: Q = {Q:g} <= 2 P^2 = {2 * P * P:g}")
    Qc = _q_ceiling(Q)
    qmax = math.floor(P)
    pairs = [(1, 0), (1, 1)]
    pairs += [(q, a) for q in range(2, qmax + 1) for a in range(1, q) if math.gcd(a, q) == 1]
    pairs.sort(key=lambda qa: Fraction(qa[1], qa[0]))
    arcs = []
    for q, a in pairs:
        c = Fraction(a, q)
        h = Fraction(1, q * Qc)
        arcs.append(Arc(q, a, max(c - h, Fraction(0)), min(c + h, Fraction(1))))
    minor = tuple((arcs[i].hi, arcs[i + 1].lo) for i in range(len(arcs) - 1))
    return ArcDissection(P, Q, Qc, tuple(arcs), minor)


def build_dissection(params: SumParams) -> ArcDissection:
    return dissect(params.P, params.Q)
