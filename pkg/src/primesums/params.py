"""The parameter bundle (k, x, theta, delta, epsilon) and its derived quantities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .errors import DomainError


@dataclass(frozen=True)
class SumParams:
    """Parameters of a short-interval sum with y = x**theta.

    With ``circle_mode=True`` the constraint 4 K delta < min(theta - 3/4, 1 - theta)
    used for the major/minor arc analysis is enforced. In circle mode ``x``
    plays the role of the centre X and ``y`` of the half-width Y.
    """

    k: int
    x: float
    theta: float
    delta: float
    epsilon: float = 0.05
    circle_mode: bool = False

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 3:
            raise DomainError(f"k must be an integer >= 3, got {self.k}")
        if not 0.75 < self.theta <= 1:
            raise DomainError(f"theta must lie in (3/4, 1], got {self.theta}")
        if self.x < 2:
            raise DomainError(f"x must be >= 2, got {self.x}")
        if self.delta <= 0 or self.epsilon <= 0:
            raise DomainError("delta and epsilon must be positive")
        if self.circle_mode and not 4 * self.K * self.delta < min(self.theta - 0.75, 1 - self.theta):
            raise DomainError(
                f"4*K*delta = {4 * self.K * self.delta:g} must be < "
                f"min(theta - 3/4, 1 - theta) = {min(self.theta - 0.75, 1 - self.theta):g}"
            )

    @property
    def y(self) -> float:
        return self.x**self.theta

    @property
    def t_k(self) -> int:
        return self.k * (self.k - 1)

    @property
    def K(self) -> int:
        return 2 * self.t_k * (self.t_k + 2)

    @property
    def sigma_k(self) -> float:
        return 1.0 / (2 * self.t_k)

    @cached_property
    def rho(self) -> float:
        return min(self.sigma_k * (self.theta - 0.75) / 8, self.delta)

    @property
    def varrho(self) -> float:
        return self.rho / 2

    @property
    def gamma(self) -> float:
        return 1.0 / (self.theta - 0.75)

    @cached_property
    def P(self) -> float:
        return self.x ** (2 * self.K * self.delta)

    @cached_property
    def Q(self) -> float:
        return self.x ** (self.k - 2) * self.y**2 / self.P

    @property
    def U(self) -> float:
        return self.x ** (self.theta / 2 - self.rho)

    @property
    def V(self) -> float:
        return self.x ** (1 - self.theta + 2 * self.rho)

    @property
    def interval(self) -> tuple[int, int]:
        """Integer endpoints (lo, hi] of the summation range (x, x + y]."""
        return math.floor(self.x), math.floor(self.x + self.y)

    def as_dict(self) -> dict[str, float]:
        return {
            "k": self.k,
            "x": self.x,
            "theta": self.theta,
            "y": self.y,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "t_k": self.t_k,
            "K": self.K,
            "sigma_k": self.sigma_k,
            "rho": self.rho,
            "varrho": self.varrho,
            "gamma": self.gamma,
            "P": self.P,
            "Q": self.Q,
            "U": self.U,
            "V": self.V,
        }
