"""Parameter sweeps over launch policies and bias scenarios.

Sweeps are analytic by default (every cell is a direct closed-form call, so
results are pointwise reproducible against the analytic module); an opt-in
simulated mode re-measures cells with the Monte Carlo chain for validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import analytic, model, montecarlo
from .analytic import ObjectiveBias, UpdateBias
from .errors import DomainError
from .model import DecisionRule, SystemParams
from .montecarlo import SimSpec

DEFAULT_ALPHAS = (0.40, 0.20, 0.10, 0.05, 0.01)


@dataclass
class SweepResult:
    """Grid axes plus one dict per cell, in row-major grid order."""

    kind: str
    axes: dict[str, tuple]
    rows: tuple[dict, ...]
    provenance: str  # "analytic" | "simulated"
    extras: dict = field(default_factory=dict)


def default_horizons(sys: SystemParams, alphas: Sequence[float]) -> tuple[float, ...]:
    """Log-spaced horizons in units of the fastest time constant among the
    swept levels (multiples 0.1 .. 16 of 1/theta_max)."""
    theta_max = max(model.linearized_theta(sys, DecisionRule(alpha=a)) for a in alphas)
    return tuple(m / theta_max for m in (0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0))


def _simulated_gap(
    sys: SystemParams,
    rule: DecisionRule,
    law: montecarlo.Law,
    steps: int,
    sim: SimSpec,
    cell: int,
    threads: int,
) -> float:
    seed = int(np.random.SeedSequence(sim.seed, spawn_key=(cell,)).generate_state(1, np.uint64)[0])
    spec = SimSpec(
        steps=steps,
        replicas=sim.replicas,
        seed=seed,
        record_at=(steps,),
        effect_mode=sim.effect_mode,
        x0=0.0,
    )
    stats = montecarlo.simulate(spec, sys, rule, law=law, threads=threads)
    return montecarlo.empirical_metric_gap(stats, sys)


def crossover_horizon(
    alpha_lax: float,
    alpha_strict: float,
    sys: SystemParams,
    x0: float,
    t_max: float,
) -> float | None:
    """First time at which the stricter level's expected metric overtakes
    the laxer level's, scanned then bisected on (0, t_max].

    Returns 0.0 when the strict level dominates from the start (e.g.
    x0 = 0), None when no crossover occurs within t_max.
    """
    if not (0.0 < alpha_strict < alpha_lax <= 0.5):
        raise DomainError("need 0 < alpha_strict < alpha_lax <= 0.5")
    rule_lax = DecisionRule(alpha=alpha_lax)
    rule_strict = DecisionRule(alpha=alpha_strict)
    ou_lax = analytic.ou_from_system(sys, rule_lax)
    ou_strict = analytic.ou_from_system(sys, rule_strict)

    def diff(t: float) -> float:
        return analytic.expected_metric_at(t, x0, sys, ou_strict) - analytic.expected_metric_at(
            t, x0, sys, ou_lax
        )

    n_scan = 256
    t_prev = t_max / n_scan
    if diff(t_prev) >= 0.0:
        return 0.0
    for i in range(2, n_scan + 1):
        t = t_max * i / n_scan
        if diff(t) >= 0.0:
            lo, hi = t_prev, t
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if diff(mid) >= 0.0:
                    hi = mid
                else:
                    lo = mid
            return 0.5 * (lo + hi)
        t_prev = t
    return None


def threshold_sweep(
    alphas: Sequence[float],
    horizons: Sequence[float],
    sys: SystemParams,
    x0: float,
    *,
    mode: str = "analytic",
    sim: SimSpec | None = None,
    threads: int = 1,
) -> SweepResult:
    """Speed-vs-final-state tradeoff across launch levels.

    One row per (alpha, horizon) with the mean-reversion rate, its time
    constant, the expected metric at the horizon, and the stationary gap.
    extras["crossovers"] lists, for every (laxer, stricter) pair, the
    horizon where the stricter level overtakes (None when absent in range).
    """
    alphas = tuple(float(a) for a in alphas)
    horizons = tuple(float(t) for t in horizons)
    if any(not (0.0 < a <= 0.5) for a in alphas):
        raise DomainError("alphas must lie in (0, 0.5]")
    if any(t < 0.0 for t in horizons):
        raise DomainError("horizons must be >= 0")
    rows = []
    cell = 0
    for a in alphas:
        rule = DecisionRule(alpha=a)
        ou = analytic.ou_from_system(sys, rule)
        gap = analytic.stationary_gap(sys, rule)
        sim_gaps: dict[float, float] = {}
        if mode == "simulated":
            if sim is None:
                raise DomainError("simulated mode requires a SimSpec template")
            law = montecarlo.launch_law(sys, rule, sim.effect_mode)
            for t in horizons:
                cell += 1
                steps = int(round(t))
                spec = SimSpec(
                    steps=steps,
                    replicas=sim.replicas,
                    seed=int(
                        np.random.SeedSequence(sim.seed, spawn_key=(cell,)).generate_state(
                            1, np.uint64
                        )[0]
                    ),
                    record_at=(steps,) if steps > 0 else (0,),
                    effect_mode=sim.effect_mode,
                    x0=x0,
                )
                stats = montecarlo.simulate(spec, sys, rule, law=law, threads=threads)
                sim_gaps[t] = stats.rows[-1].metric_mean
        for t in horizons:
            row = {
                "alpha": a,
                "horizon": t,
                "theta": ou.theta,
                "time_constant": 1.0 / ou.theta,
                "e_metric": analytic.expected_metric_at(t, x0, sys, ou),
                "stationary_gap": gap,
            }
            if mode == "simulated":
                row["sim_metric"] = sim_gaps[t]
            rows.append(row)
    t_max = max(horizons) if horizons else 0.0
    crossovers = []
    ordered = sorted(alphas, reverse=True)
    for i, a_lax in enumerate(ordered):
        for a_strict in ordered[i + 1 :]:
            if a_strict == a_lax:
                continue
            t_star = crossover_horizon(a_lax, a_strict, sys, x0, t_max) if t_max > 0 else None
            crossovers.append(
                {"alpha_lax": a_lax, "alpha_strict": a_strict, "t_star": t_star}
            )
    return SweepResult(
        kind="threshold",
        axes={"alpha": alphas, "horizon": horizons},
        rows=tuple(rows),
        provenance="simulated" if mode == "simulated" else "analytic",
        extras={"crossovers": crossovers},
    )


def update_bias_sweep(
    gamma_r_grid: Sequence[float],
    gamma_sigma_grid: Sequence[float],
    sys: SystemParams,
    rule: DecisionRule,
    *,
    mode: str = "analytic",
    sim: SimSpec | None = None,
    threads: int = 1,
) -> SweepResult:
    """Stationary-gap surface over (gamma_r, gamma_sigma) attenuation pairs.

    Cells are annotated improve/neutral/worsen by the signal-to-noise gain
    gamma = gamma_sigma/gamma_r relative to 1; the diagonal is exactly
    neutral.
    """
    rows = []
    cell = 0
    for gr in gamma_r_grid:
        for gs in gamma_sigma_grid:
            cell += 1
            bias = UpdateBias(gamma_r=float(gr), gamma_sigma=float(gs))
            surrogate, ou = analytic.apply_update_bias(sys, rule, bias)
            gap = 0.5 * sys.r * analytic.stationary(ou).var
            gamma = bias.gamma
            verdict = "neutral" if gamma == 1.0 else ("improve" if gamma > 1.0 else "worsen")
            row = {
                "gamma_r": float(gr),
                "gamma_sigma": float(gs),
                "gamma": gamma,
                "theta_biased": ou.theta,
                "stationary_gap": gap,
                "verdict": verdict,
            }
            if mode == "simulated":
                if sim is None:
                    raise DomainError("simulated mode requires a SimSpec template")
                law = montecarlo.launch_law(surrogate, rule, sim.effect_mode)
                steps = max(1, math.ceil(10.0 / ou.theta))
                row["sim_gap"] = _simulated_gap(sys, rule, law, steps, sim, cell, threads)
            rows.append(row)
    return SweepResult(
        kind="update-bias",
        axes={"gamma_r": tuple(gamma_r_grid), "gamma_sigma": tuple(gamma_sigma_grid)},
        rows=tuple(rows),
        provenance="simulated" if mode == "simulated" else "analytic",
    )


def objective_bias_frontier(
    mu_grid: Sequence[float],
    gamma_grid: Sequence[float],
    sys: SystemParams,
    rule: DecisionRule,
    *,
    mode: str = "analytic",
    sim: SimSpec | None = None,
    threads: int = 1,
) -> SweepResult:
    """True stationary gap and improvement flag over (mu, gamma) surrogate
    cells, plus the analytic frontier curve mu*(gamma).

    The gap is r*(mu^2 + alpha/(2*gamma*theta))/2 -- quadratic in the
    offset, linear in the inverse signal-to-noise gain.
    """
    if any(g <= 0.0 for g in gamma_grid):
        raise DomainError("gamma grid must be positive")
    ou_base = analytic.ou_from_system(sys, rule)
    rows = []
    cell = 0
    for g in gamma_grid:
        for mu in mu_grid:
            cell += 1
            bias = ObjectiveBias(
                r_prime=sys.r, sigma_prime=sys.sigma / float(g), mu=float(mu)
            )
            ou = analytic.apply_objective_bias(sys, rule, bias)
            stat = analytic.stationary(ou)
            gap = 0.5 * sys.r * (stat.mean * stat.mean + stat.var)
            row = {
                "mu": float(mu),
                "gamma": float(g),
                "theta_biased": ou.theta,
                "stationary_gap_true": gap,
                "improves": analytic.improvement_condition(mu, ou_base, g),
                "mu_star": analytic.frontier_mu(ou_base, g),
            }
            if mode == "simulated":
                if sim is None:
                    raise DomainError("simulated mode requires a SimSpec template")
                surrogate = SystemParams(
                    r=sys.r, sigma=sys.sigma / float(g), optimum=sys.optimum
                )
                law = montecarlo.launch_law(surrogate, rule, sim.effect_mode, shift=float(mu))
                steps = max(1, math.ceil(10.0 / ou.theta))
                row["sim_gap"] = _simulated_gap(sys, rule, law, steps, sim, cell, threads)
            rows.append(row)
    frontier = [{"gamma": float(g), "mu_star": analytic.frontier_mu(ou_base, g)} for g in gamma_grid]
    return SweepResult(
        kind="objective-frontier",
        axes={"mu": tuple(mu_grid), "gamma": tuple(gamma_grid)},
        rows=tuple(rows),
        provenance="simulated" if mode == "simulated" else "analytic",
        extras={"frontier_curve": frontier},
    )
