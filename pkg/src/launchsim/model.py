"""Discrete experiment-launch chain.

A scalar parameter x is tuned by unit-step proposals: at each step a move to
x-1 or x+1 is proposed with probability 1/2 each, measured with standard
error sigma, and launched when the measured lift clears a one-sided z-test
at level alpha.  This module provides the true effects, launch
probabilities, the one-step transition law, its exact drift and variance,
and the linearized mean-reversion rate used by the continuous-time limit.

All operations are pure functions over frozen parameter records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from . import gaussian
from .errors import DomainError


class EffectMode(Enum):
    """How the metric change of a unit move is computed.

    GRADIENT uses the local gradient of the quadratic objective (the
    linearization the continuous-time theory rests on); EXACT keeps the
    curvature term, i.e. the exact finite difference of the objective.
    The two differ by exactly r/2 for every (x, direction).
    """

    GRADIENT = "gradient"
    EXACT = "exact"


def _finite(value: float, name: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(v):
        raise DomainError(f"{name} must be finite, got {v!r}")
    return v


@dataclass(frozen=True)
class SystemParams:
    """True objective curvature r, experiment standard error sigma, and the
    constant metric value attained at the optimum x = 0."""

    r: float
    sigma: float
    optimum: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", _finite(self.r, "r"))
        object.__setattr__(self, "sigma", _finite(self.sigma, "sigma"))
        object.__setattr__(self, "optimum", _finite(self.optimum, "optimum"))
        if self.r <= 0.0:
            raise DomainError(f"r must be > 0, got {self.r}")
        if self.sigma <= 0.0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")

    def metric_mean(self, x: float) -> float:
        """Expected metric at parameter value x: optimum - r*x^2/2."""
        return self.optimum - 0.5 * self.r * x * x


@dataclass(frozen=True)
class DecisionRule:
    """One-sided launch test at level alpha with z-threshold c.

    c is derived from alpha at construction, so survival(c) = alpha holds by
    construction.  alpha is restricted to (0, 1/2] so that c >= 0.
    """

    alpha: float
    c: float = field(init=False)

    def __post_init__(self) -> None:
        alpha = _finite(self.alpha, "alpha")
        if not (0.0 < alpha <= 0.5):
            raise DomainError(f"alpha must lie in (0, 0.5], got {alpha}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "c", gaussian.inv_survival(alpha))


@dataclass(frozen=True)
class StepDistribution:
    """One-step law of the chain: P(move down), P(move up), P(stay)."""

    p_down: float
    p_up: float
    p_stay: float

    def __post_init__(self) -> None:
        for name in ("p_down", "p_up"):
            v = getattr(self, name)
            if not (0.0 <= v <= 0.5):
                raise DomainError(f"{name} must lie in [0, 0.5], got {v}")
        if not (0.0 <= self.p_stay <= 1.0):
            raise DomainError(f"p_stay must lie in [0, 1], got {self.p_stay}")
        total = self.p_down + self.p_up + self.p_stay
        if abs(total - 1.0) > 1e-15:
            raise DomainError(f"probabilities must sum to 1, got {total!r}")


def true_effect(x: float, direction: int, mode: EffectMode, sys: SystemParams) -> float:
    """Metric change caused by moving from x to x + direction.

    GRADIENT: -direction*r*x (so a downward move from x > 0 improves the
    metric by r*x).  EXACT: the finite difference of the quadratic
    objective, -direction*r*x - r/2.
    """
    if direction not in (-1, 1):
        raise DomainError(f"direction must be -1 or +1, got {direction!r}")
    x = _finite(x, "x")
    effect = -direction * sys.r * x
    if mode is EffectMode.EXACT:
        effect -= 0.5 * sys.r
    return effect


def launch_probability(
    x: float, direction: int, mode: EffectMode, sys: SystemParams, rule: DecisionRule
) -> float:
    """Probability the proposed move to x + direction launches,
    conditional on that direction being proposed."""
    effect = true_effect(x, direction, mode, sys)
    return gaussian.survival(rule.c - effect / sys.sigma)


def step_distribution(
    x: float, mode: EffectMode, sys: SystemParams, rule: DecisionRule
) -> StepDistribution:
    """Full one-step law at x: each direction is proposed with prior 1/2."""
    p_down = 0.5 * launch_probability(x, -1, mode, sys, rule)
    p_up = 0.5 * launch_probability(x, +1, mode, sys, rule)
    return StepDistribution(p_down, p_up, 1.0 - p_down - p_up)


def exact_drift(x: float, sys: SystemParams, rule: DecisionRule) -> float:
    """Exact one-step mean displacement E[X_{t+1} - x] under GRADIENT effects.

    Equals survival(c + r*x/sigma)/2 - survival(c - r*x/sigma)/2: mean
    reverting (negative for x > 0), bounded by 1/2 in magnitude, and equal
    to -theta*x + O((r*x/sigma)^3) with theta = r*pdf(c)/sigma.
    """
    x = _finite(x, "x")
    u = sys.r * x / sys.sigma
    return 0.5 * gaussian.survival(rule.c + u) - 0.5 * gaussian.survival(rule.c - u)


def exact_step_variance(x: float, sys: SystemParams, rule: DecisionRule) -> float:
    """Exact one-step variance of the displacement under GRADIENT effects.

    E[(dX)^2] - E[dX]^2 = p_down + p_up - drift^2, which tends to alpha as
    r*x/sigma -> 0.
    """
    x = _finite(x, "x")
    u = sys.r * x / sys.sigma
    p_down = 0.5 * gaussian.survival(rule.c - u)
    p_up = 0.5 * gaussian.survival(rule.c + u)
    drift = p_up - p_down
    return p_down + p_up - drift * drift


def linearized_theta(sys: SystemParams, rule: DecisionRule) -> float:
    """Mean-reversion rate of the linearized chain: r*pdf(c)/sigma."""
    return sys.r * gaussian.pdf(rule.c) / sys.sigma
