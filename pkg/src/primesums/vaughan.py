"""Vaughan's identity: S_k(x, y; alpha) = S1 - S2 - S3 with an exact residual check.

    S1 = sum_{d <= V} mu(d) sum_{x < md <= x+y} (log m) e((md)^k alpha)
    S2 = sum_{v <= UV} lambda0(v) sum_{x < lv <= x+y} e((lv)^k alpha)
    S3 = sum_{V < u <= (x+y)/U} lambda1(u) sum_{x < mu <= x+y, m > U} Lambda(m) e((mu)^k alpha)

U and V are floored to integers; the identity holds for any integer cut
as long as every n in the interval exceeds U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import WeightKind, sieve_weights
from .errors import ContractError, InvariantError, ResourceError
from .expsum import (
    PhaseContext,
    SumValue,
    combine,
    dyadic_blocks,
    interval,
    type_i_sum,
    type_ii_sum,
    weighted_sum,
)
from .params import SumParams

MAX_PLAN_ENTRIES = 50_000_000


@dataclass(frozen=True)
class VaughanPlan:
    """Tabulated lambda0 on [1, UV] and lambda1 on (V, (x+y)/U] for one interval."""

    U: int
    V: int
    U_real: float
    V_real: float
    lo: int
    hi: int
    lambda0: np.ndarray = field(repr=False)  # index v, 0 <= v <= UV
    lambda1: np.ndarray = field(repr=False)  # index u, 0 <= u <= hi // U (zero for u <= V)
    eta: np.ndarray = field(repr=False)  # Lambda(m) [m > U], index m
    mu: np.ndarray = field(repr=False)  # mu(d), index d <= V
    comparability: dict = field(default_factory=dict)

    @property
    def u_max(self) -> int:
        return self.lambda1.size - 1


def _divisor_counts(lo: int, hi: int) -> np.ndarray:
    """tau(u) for lo < u <= hi."""
    out = np.zeros(hi - lo, dtype=np.int64)
    for d in range(1, hi + 1):
        first = ((lo // d) + 1) * d
        if first <= hi:
            out[first - lo - 1 :: d] += 1
    return out


def build_plan(params: SumParams | None = None, *, U: float | None = None, V: float | None = None,
               x=None, y=None) -> VaughanPlan:
    """Tabulate the Vaughan coefficients for params (or explicit U, V, x, y).

    U = x^(theta/2 - rho), V = x^(1 - theta + 2 rho) when taken from params.
    """
    if params is not None:
        U_real, V_real = params.U, params.V
        lo, hi = params.interval
        xr, exponent = params.x, 1 - params.theta / 2 + params.rho
    else:
        if None in (U, V, x, y):
            raise ContractError("give params or all of U, V, x, y")
        U_real, V_real = float(U), float(V)
        lo, hi = interval(x, y)
        xr, exponent = float(x), None
    Ui, Vi = max(1, math.floor(U_real)), max(1, math.floor(V_real))
    if lo < Ui:
        raise ContractError(f"interval ({lo}, {hi}] reaches below U = {Ui}; the identity needs n > U")
    u_max = hi // Ui
    m_max = hi // (Vi + 1)
    if Ui * Vi + u_max + m_max > MAX_PLAN_ENTRIES:
        raise ResourceError("Vaughan plan exceeds the table budget")

    mu = np.zeros(Vi + 1)
    mu[1:] = sieve_weights(0, Vi, WeightKind.MOEBIUS).weights
    lam_small = np.zeros(Ui + 1)
    lam_small[1:] = sieve_weights(0, Ui, WeightKind.VON_MANGOLDT).weights

    # lambda0(v) = sum_{md = v, d <= V, m <= U} mu(d) Lambda(m)
    lambda0 = np.zeros(Ui * Vi + 1)
    ms = np.flatnonzero(lam_small)
    for d in np.flatnonzero(mu).tolist():
        np.add.at(lambda0, ms * d, mu[d] * lam_small[ms])

    # lambda1(u) = sum_{d | u, d <= V} mu(d), kept for u > V only
    lambda1 = np.zeros(u_max + 1, dtype=np.int64)
    for d in np.flatnonzero(mu).tolist():
        lambda1[d::d] += int(mu[d])
    lambda1[: Vi + 1] = 0

    eta = np.zeros(m_max + 1)
    if m_max >= 1:
        eta[1:] = sieve_weights(0, m_max, WeightKind.VON_MANGOLDT).weights
    eta[: Ui + 1] = 0.0

    v = np.arange(2, lambda0.size)
    if np.any(np.abs(lambda0[2:]) > np.log(v) * (1 + 1e-12)) or lambda0[1] != 0:
        raise InvariantError("|lambda0(v)| <= log v violated")
    if u_max > Vi:
        tau = _divisor_counts(Vi, u_max)
        if np.any(np.abs(lambda1[Vi + 1 :]) > tau):
            raise InvariantError("|lambda1(u)| <= tau(u) violated")

    comp = {"UV": Ui * Vi, "(x+y)/U": (xr + (hi - lo)) / U_real}
    if exponent is not None:
        scale = xr**exponent
        comp.update(scale=scale, uv_ratio=U_real * V_real / scale, xu_ratio=comp["(x+y)/U"] / scale)
    for arr in (lambda0, lambda1, eta, mu):
        arr.flags.writeable = False
    return VaughanPlan(Ui, Vi, U_real, V_real, lo, hi, lambda0, lambda1, eta, mu, comp)


def lambda1_bruteforce(u: int, V: int) -> int:
    """sum_{d | u, d <= V} mu(d) by a divisor loop."""
    from .arith import moebius

    return sum(moebius(d) for d in range(1, min(u, V) + 1) if u % d == 0)


@dataclass(frozen=True)
class Decomposition:
    S1: SumValue
    S2: SumValue
    S3: SumValue

    @property
    def total(self) -> complex:
        return self.S1.value - self.S2.value - self.S3.value


def _check(plan: VaughanPlan, x, y) -> tuple[int, int]:
    lo, hi = interval(x, y)
    if (lo, hi) != (plan.lo, plan.hi):
        raise ContractError(f"plan built for ({plan.lo}, {plan.hi}], called with ({lo}, {hi}]")
    return lo, hi


def decompose(plan: VaughanPlan, ctx: PhaseContext, x, y) -> Decomposition:
    lo, hi = _check(plan, x, y)
    ctx.require(hi)
    s1 = [type_i_sum(plan.mu, M, ctx, x, y, with_log=True, cap=plan.V) for M in dyadic_blocks(0.5, plan.V)]
    uv = plan.lambda0.size - 1
    s2 = [type_i_sum(plan.lambda0, M, ctx, x, y, cap=uv) for M in dyadic_blocks(0.5, uv)]
    s3 = [
        type_ii_sum(plan.lambda1, plan.eta, M, ctx, x, y, cap=plan.u_max)
        for M in dyadic_blocks(float(plan.V), plan.u_max)
    ]
    return Decomposition(combine(s1), combine(s2), combine(s3))


def direct_sum(plan: VaughanPlan, ctx: PhaseContext) -> SumValue:
    """S_k over the plan's interval from a von Mangoldt table."""
    return weighted_sum(ctx, sieve_weights(plan.lo, plan.hi, WeightKind.VON_MANGOLDT))


def residual(plan: VaughanPlan, ctx: PhaseContext, x, y) -> float:
    """|S_k - (S1 - S2 - S3)| / max(1, |S_k|)."""
    _check(plan, x, y)
    sk = direct_sum(plan, ctx).value
    dec = decompose(plan, ctx, x, y)
    return abs(sk - dec.total) / max(1.0, abs(sk))
