"""Closed-form Ornstein-Uhlenbeck solutions for the launch chain.

The linearized chain is the OU diffusion

    dX = -theta*(X - mu) dt + sqrt(diffusion) dW

whose marginal at every time is Gaussian with closed-form mean and
variance.  The same functional form covers the plain chain (mu = 0), the
biased-updates scenario (theta rescaled by the signal-to-noise gain), and
the biased-objective scenario (theta rescaled and mu shifted), so all three
are expressed as parameter transforms into a single OUParams shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import gaussian, model
from .errors import DomainError
from .model import DecisionRule, SystemParams


def _finite(value: float, name: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(v):
        raise DomainError(f"{name} must be finite, got {v!r}")
    return v


@dataclass(frozen=True)
class OUParams:
    """Drift rate theta (1/time), diffusion coefficient (the launch level
    alpha for the unbiased chain), and attractor mean mu."""

    theta: float
    diffusion: float
    mu: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", _finite(self.theta, "theta"))
        object.__setattr__(self, "diffusion", _finite(self.diffusion, "diffusion"))
        object.__setattr__(self, "mu", _finite(self.mu, "mu"))
        if self.theta <= 0.0:
            raise DomainError(f"theta must be > 0, got {self.theta}")
        if not (0.0 < self.diffusion <= 1.0):
            raise DomainError(f"diffusion must lie in (0, 1], got {self.diffusion}")


@dataclass(frozen=True)
class GaussianDist:
    """A (mean, variance) pair."""

    mean: float
    var: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean", _finite(self.mean, "mean"))
        object.__setattr__(self, "var", _finite(self.var, "var"))
        if self.var < 0.0:
            raise DomainError(f"var must be >= 0, got {self.var}")


@dataclass(frozen=True)
class UpdateBias:
    """Attenuation of measured effects by gamma_r traded against a
    standard-error shrink by gamma_sigma; the attractor is unchanged."""

    gamma_r: float
    gamma_sigma: float

    def __post_init__(self) -> None:
        for name in ("gamma_r", "gamma_sigma"):
            v = _finite(getattr(self, name), name)
            object.__setattr__(self, name, v)
            if v <= 0.0:
                raise DomainError(f"{name} must be > 0, got {v}")

    @property
    def gamma(self) -> float:
        """Signal-to-noise gain gamma_sigma / gamma_r."""
        return self.gamma_sigma / self.gamma_r


@dataclass(frozen=True)
class ObjectiveBias:
    """A surrogate objective with curvature r_prime, measurement error
    sigma_prime, and its own optimizer at mu instead of 0."""

    r_prime: float
    sigma_prime: float
    mu: float

    def __post_init__(self) -> None:
        for name in ("r_prime", "sigma_prime"):
            v = _finite(getattr(self, name), name)
            object.__setattr__(self, name, v)
            if v <= 0.0:
                raise DomainError(f"{name} must be > 0, got {v}")
        object.__setattr__(self, "mu", _finite(self.mu, "mu"))


def ou_from_system(sys: SystemParams, rule: DecisionRule) -> OUParams:
    """Continuous-time limit of the unbiased chain: theta = r*pdf(c)/sigma,
    diffusion = alpha, attractor at the true optimum."""
    return OUParams(
        theta=model.linearized_theta(sys, rule), diffusion=rule.alpha, mu=0.0
    )


def solution_at(t: float, x0: float, ou: OUParams) -> GaussianDist:
    """Marginal law at time t >= 0 starting from the point mass x0.

    mean = x0*exp(-theta*t) + mu*(1 - exp(-theta*t))
    var  = (diffusion / 2*theta) * (1 - exp(-2*theta*t))
    """
    t = _finite(t, "t")
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t}")
    decay = math.exp(-ou.theta * t)
    mean = x0 * decay + ou.mu * (1.0 - decay)
    var = ou.diffusion / (2.0 * ou.theta) * (1.0 - decay * decay)
    return GaussianDist(mean=mean, var=var)


def stationary(ou: OUParams) -> GaussianDist:
    """Limit law: N(mu, diffusion / 2*theta)."""
    return GaussianDist(mean=ou.mu, var=ou.diffusion / (2.0 * ou.theta))


def expected_metric_at(t: float, x0: float, sys: SystemParams, ou: OUParams) -> float:
    """Expected true metric at time t: optimum - r*E[X_t^2]/2.

    The curvature is always the true system's r, even when the dynamics
    follow a biased/surrogate OUParams.
    """
    dist = solution_at(t, x0, ou)
    second_moment = dist.mean * dist.mean + dist.var
    return sys.optimum - 0.5 * sys.r * second_moment


def stationary_gap(sys: SystemParams, rule: DecisionRule) -> float:
    """Long-run optimality gap of the unbiased chain: (sigma/4) * Mills(c).

    Algebraically identical to r*alpha / (4*theta) with
    theta = r*pdf(c)/sigma; the Mills-ratio form stays accurate for
    stringent thresholds where tail quantities underflow separately.
    """
    return 0.25 * sys.sigma * gaussian.mills_ratio(rule.c)


def apply_update_bias(
    sys: SystemParams, rule: DecisionRule, bias: UpdateBias
) -> tuple[SystemParams, OUParams]:
    """Biased-updates transform: measured effects shrink by gamma_r and the
    standard error by gamma_sigma.

    Returns the surrogate system (r/gamma_r, sigma/gamma_sigma) and the
    resulting dynamics: theta scaled by gamma = gamma_sigma/gamma_r,
    diffusion and attractor unchanged.  The true stationary gap becomes
    r*alpha / (4*gamma*theta) with the ORIGINAL r.
    """
    surrogate = SystemParams(
        r=sys.r / bias.gamma_r, sigma=sys.sigma / bias.gamma_sigma, optimum=sys.optimum
    )
    base = ou_from_system(sys, rule)
    ou = OUParams(theta=bias.gamma * base.theta, diffusion=rule.alpha, mu=0.0)
    return surrogate, ou


def apply_objective_bias(
    sys: SystemParams, rule: DecisionRule, bias: ObjectiveBias
) -> OUParams:
    """Biased-objective transform: optimizing a surrogate metric whose own
    optimum sits at mu.

    gamma = (r'/sigma') / (r/sigma) is the signal-to-noise gain; the
    dynamics keep diffusion alpha but revert at rate gamma*theta toward mu.
    """
    gamma = (bias.r_prime / bias.sigma_prime) / (sys.r / sys.sigma)
    base = ou_from_system(sys, rule)
    return OUParams(theta=gamma * base.theta, diffusion=rule.alpha, mu=bias.mu)


def improvement_condition(mu: float, ou_base: OUParams, gamma: float) -> bool:
    """Whether a surrogate with offset mu and signal-to-noise gain gamma
    improves the long-run true objective over the unbiased chain.

    True iff mu^2 < (diffusion / 2*theta) * (1 - 1/gamma), strictly; a tie
    is not an improvement.
    """
    mu = _finite(mu, "mu")
    gamma = _finite(gamma, "gamma")
    if gamma <= 0.0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    rhs = stationary(ou_base).var * (1.0 - 1.0 / gamma)
    return mu * mu < rhs


def frontier_mu(ou_base: OUParams, gamma: float) -> float:
    """Largest |mu| still improving at signal-to-noise gain gamma:
    sqrt((diffusion / 2*theta) * (1 - 1/gamma)).  NaN for gamma <= 1, where
    no offset improves."""
    gamma = _finite(gamma, "gamma")
    if gamma <= 0.0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    if gamma <= 1.0:
        return math.nan
    return math.sqrt(stationary(ou_base).var * (1.0 - 1.0 / gamma))


def time_to_fraction(ou: OUParams, fraction: float) -> float:
    """Time at which the mean displacement from the attractor has decayed
    to the given fraction of its initial value: -ln(fraction)/theta."""
    fraction = _finite(fraction, "fraction")
    if not (0.0 < fraction < 1.0):
        raise DomainError(f"fraction must lie in (0, 1), got {fraction}")
    return -math.log(fraction) / ou.theta
