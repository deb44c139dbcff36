"""Exact, reproducible ensemble simulation of the discrete launch chain.

Determinism contract
--------------------
Replica k draws its uniforms from a dedicated stream seeded by
``SeedSequence(master_seed, spawn_key=(k,))``, so its trajectory depends on
(master seed, k) only -- never on the number of replicas, threads, or
scheduling.  Ensembles are assembled by replica index, which makes whole-run
output bit-identical across thread counts.

Engine
------
One proposed experiment is one time unit (dt = 1).  Each step consumes one
uniform per replica, compared against the cumulative branch probabilities
(down, down+up) of the one-step law.  Since the state only ever moves by
+-1 from x0, launch probabilities are functions of the integer offset
j = x - x0 and are cached on a lattice table, leaving a handful of
vectorized array ops per step.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import model
from .errors import DomainError, HorizonExhausted
from .model import DecisionRule, EffectMode, SystemParams

# One uniform draw per replica per step, buffered in blocks of this many
# steps; bounds the working memory at replicas * block * 8 bytes.
_TIME_BLOCK = 256
_TABLE_PAD = 8

Law = Callable[[float], "tuple[float, float]"]


@dataclass(frozen=True)
class SimSpec:
    """Description of one ensemble run.

    record_at holds the step indices to snapshot (strictly increasing,
    within [0, steps]).  x0 is the common starting parameter value.
    """

    steps: int
    replicas: int
    seed: int
    record_at: tuple[int, ...]
    effect_mode: EffectMode = EffectMode.GRADIENT
    x0: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.steps, int) or self.steps < 0:
            raise DomainError(f"steps must be a nonnegative int, got {self.steps!r}")
        if not isinstance(self.replicas, int) or self.replicas < 1:
            raise DomainError(f"replicas must be an int >= 1, got {self.replicas!r}")
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2**64):
            raise DomainError(f"seed must be a 64-bit unsigned int, got {self.seed!r}")
        record = tuple(int(s) for s in self.record_at)
        if any(not (0 <= s <= self.steps) for s in record):
            raise DomainError(f"record_at must lie within [0, {self.steps}]")
        if any(b <= a for a, b in zip(record, record[1:])):
            raise DomainError("record_at must be strictly increasing")
        object.__setattr__(self, "record_at", record)
        if not isinstance(self.effect_mode, EffectMode):
            raise DomainError(f"effect_mode must be an EffectMode, got {self.effect_mode!r}")
        x0 = float(self.x0)
        if not math.isfinite(x0):
            raise DomainError(f"x0 must be finite, got {self.x0!r}")
        object.__setattr__(self, "x0", x0)


@dataclass(frozen=True)
class SnapshotStats:
    """Ensemble summary at one recorded step."""

    step: int
    mean: float
    var: float
    q05: float
    q25: float
    q50: float
    q75: float
    q95: float
    metric_mean: float
    launch_rate: float


@dataclass
class EnsembleStats:
    """Per-snapshot summaries plus (by default) the raw ensembles of X.

    trajectories is (replicas, steps+1) and populated only on request;
    memory otherwise scales with len(record_at).
    """

    spec: SimSpec
    rows: tuple[SnapshotStats, ...]
    ensembles: dict[int, np.ndarray] | None = None
    trajectories: np.ndarray | None = None


def launch_law(
    sys: SystemParams,
    rule: DecisionRule,
    mode: EffectMode = EffectMode.GRADIENT,
    shift: float = 0.0,
) -> Law:
    """Branch probabilities (P(down), P(up)) at x, with effects measured
    around a surrogate optimum at ``shift``.

    The unbiased chain is shift = 0 with the true system; a surrogate
    objective is expressed by passing its own (r', sigma') system and its
    optimizer offset as shift.
    """

    def law(x: float) -> tuple[float, float]:
        xs = x - shift
        p_down = 0.5 * model.launch_probability(xs, -1, mode, sys, rule)
        p_up = 0.5 * model.launch_probability(xs, +1, mode, sys, rule)
        return p_down, p_up

    return law


def step_chain(
    x: float,
    sys: SystemParams,
    rule: DecisionRule,
    mode: EffectMode,
    rng_draw: float,
) -> float:
    """Advance the chain one step using a single uniform draw in [0, 1).

    Returns x-1 when the draw falls below P(down), x+1 when it falls in
    the next P(up)-wide band, x otherwise.
    """
    if not (0.0 <= rng_draw < 1.0):
        raise DomainError(f"rng_draw must lie in [0, 1), got {rng_draw!r}")
    dist = model.step_distribution(x, mode, sys, rule)
    if rng_draw < dist.p_down:
        return x - 1.0
    if rng_draw < dist.p_down + dist.p_up:
        return x + 1.0
    return x


class _LatticeTable:
    """Cumulative branch thresholds for x = x0 + j, grown on demand."""

    def __init__(self, law: Law, x0: float):
        self._law = law
        self._x0 = x0
        self.j_lo = 0
        self.thr_down = np.empty(0)
        self.thr_move = np.empty(0)

    def _compute(self, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
        t1 = np.empty(hi - lo)
        t2 = np.empty(hi - lo)
        for i, j in enumerate(range(lo, hi)):
            p_down, p_up = self._law(self._x0 + j)
            t1[i] = p_down
            t2[i] = p_down + p_up
        return t1, t2

    def ensure(self, j_min: int, j_max: int) -> None:
        lo = j_min - _TABLE_PAD
        hi = j_max + _TABLE_PAD + 1
        if self.thr_down.size == 0:
            self.j_lo = lo
            self.thr_down, self.thr_move = self._compute(lo, hi)
            return
        cur_hi = self.j_lo + self.thr_down.size
        if lo < self.j_lo:
            t1, t2 = self._compute(lo, self.j_lo)
            self.thr_down = np.concatenate([t1, self.thr_down])
            self.thr_move = np.concatenate([t2, self.thr_move])
            self.j_lo = lo
        if hi > cur_hi:
            t1, t2 = self._compute(cur_hi, hi)
            self.thr_down = np.concatenate([self.thr_down, t1])
            self.thr_move = np.concatenate([self.thr_move, t2])


def _run_chunk(
    spec: SimSpec,
    law: Law,
    rep_lo: int,
    rep_hi: int,
    keep_traj: bool,
) -> tuple[dict[int, tuple[np.ndarray, np.ndarray]], np.ndarray | None]:
    """Simulate replicas [rep_lo, rep_hi); returns per-recorded-step
    (offsets, launch counts) and optionally the full offset trajectories."""
    n = rep_hi - rep_lo
    gens = [
        np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(k,)))
        for k in range(rep_lo, rep_hi)
    ]
    j = np.zeros(n, dtype=np.int64)
    launched = np.zeros(n, dtype=np.int64)
    table = _LatticeTable(law, spec.x0)
    records: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    traj = np.zeros((n, spec.steps + 1), dtype=np.int64) if keep_traj else None

    pending = list(spec.record_at)
    if pending and pending[0] == 0:
        records[0] = (j.copy(), launched.copy())
        pending.pop(0)

    uniforms = np.empty((n, min(_TIME_BLOCK, max(spec.steps, 1))))
    step = 0
    while step < spec.steps:
        block = min(_TIME_BLOCK, spec.steps - step)
        # within a block the chain can move at most `block` sites
        table.ensure(int(j.min()) - block, int(j.max()) + block)
        for i, gen in enumerate(gens):
            uniforms[i, :block] = gen.random(block)
        for s in range(block):
            u = uniforms[:, s]
            idx = j - table.j_lo
            down = u < table.thr_down[idx]
            moved = u < table.thr_move[idx]
            j += moved
            j -= down
            j -= down
            launched += moved
            step += 1
            if traj is not None:
                traj[:, step] = j
            if pending and pending[0] == step:
                records[step] = (j.copy(), launched.copy())
                pending.pop(0)
    return records, traj


def _nearest_rank(sorted_x: np.ndarray, p: float) -> float:
    idx = max(0, math.ceil(p * sorted_x.size) - 1)
    return float(sorted_x[idx])


def _chunk_bounds(replicas: int, threads: int) -> list[tuple[int, int]]:
    parts = max(1, min(threads, replicas))
    base, extra = divmod(replicas, parts)
    bounds = []
    lo = 0
    for i in range(parts):
        hi = lo + base + (1 if i < extra else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def simulate(
    spec: SimSpec,
    sys: SystemParams,
    rule: DecisionRule,
    *,
    law: Law | None = None,
    threads: int = 1,
    keep_ensembles: bool = True,
    keep_trajectories: bool = False,
) -> EnsembleStats:
    """Run the ensemble described by spec and summarize it at record_at.

    The transition law defaults to the unbiased chain for (sys, rule,
    spec.effect_mode); pass ``law`` to drive the chain with a surrogate
    rule while still summarizing the TRUE metric of ``sys``.  Output is
    bit-identical for a fixed (seed, spec) at any thread count.
    """
    if law is None:
        law = launch_law(sys, rule, spec.effect_mode)
    bounds = _chunk_bounds(spec.replicas, threads)
    if len(bounds) == 1:
        chunk_results = [_run_chunk(spec, law, 0, spec.replicas, keep_trajectories)]
    else:
        with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
            futures = [
                pool.submit(_run_chunk, spec, law, lo, hi, keep_trajectories)
                for lo, hi in bounds
            ]
            chunk_results = [f.result() for f in futures]

    ensembles: dict[int, np.ndarray] = {}
    launch_counts: dict[int, np.ndarray] = {}
    for step in spec.record_at:
        ensembles[step] = np.empty(spec.replicas)
        launch_counts[step] = np.empty(spec.replicas, dtype=np.int64)
    for (lo, hi), (records, _) in zip(bounds, chunk_results):
        for step, (offsets, launched) in records.items():
            ensembles[step][lo:hi] = spec.x0 + offsets
            launch_counts[step][lo:hi] = launched
    trajectories = None
    if keep_trajectories:
        trajectories = np.empty((spec.replicas, spec.steps + 1))
        for (lo, hi), (_, traj) in zip(bounds, chunk_results):
            trajectories[lo:hi] = spec.x0 + traj

    rows = []
    for step in spec.record_at:
        x = ensembles[step]
        sorted_x = np.sort(x)
        mean = float(x.mean())
        var = float(x.var(ddof=1)) if spec.replicas > 1 else 0.0
        metric_mean = float(np.mean(sys.optimum - 0.5 * sys.r * x * x))
        rate = float(launch_counts[step].mean() / step) if step > 0 else 0.0
        rows.append(
            SnapshotStats(
                step=step,
                mean=mean,
                var=var,
                q05=_nearest_rank(sorted_x, 0.05),
                q25=_nearest_rank(sorted_x, 0.25),
                q50=_nearest_rank(sorted_x, 0.50),
                q75=_nearest_rank(sorted_x, 0.75),
                q95=_nearest_rank(sorted_x, 0.95),
                metric_mean=metric_mean,
                launch_rate=rate,
            )
        )
    return EnsembleStats(
        spec=spec,
        rows=tuple(rows),
        ensembles=ensembles if keep_ensembles else None,
        trajectories=trajectories,
    )


def first_passage(
    spec: SimSpec,
    sys: SystemParams,
    rule: DecisionRule,
    threshold: float,
    *,
    law: Law | None = None,
    threads: int = 1,
) -> int:
    """Smallest recorded step at which |ensemble mean of X| <= threshold.

    Step 0 is always checked, whether or not it is in record_at.  Raises
    HorizonExhausted when the target is never reached within spec.steps.
    """
    threshold = float(threshold)
    if not (threshold > 0.0) or not math.isfinite(threshold):
        raise DomainError(f"threshold must be > 0, got {threshold!r}")
    record = spec.record_at if (spec.record_at and spec.record_at[0] == 0) else (0,) + spec.record_at
    stats = simulate(
        replace(spec, record_at=record), sys, rule,
        law=law, threads=threads, keep_ensembles=False,
    )
    for row in stats.rows:
        if abs(row.mean) <= threshold:
            return row.step
    raise HorizonExhausted(
        f"|ensemble mean| never reached {threshold} within {spec.steps} steps"
    )


def empirical_metric_gap(stats: EnsembleStats, sys: SystemParams) -> float:
    """Realized optimality gap, optimum minus the ensemble-mean metric at
    the last recorded step."""
    if not stats.rows:
        raise DomainError("stats has no recorded steps")
    return sys.optimum - stats.rows[-1].metric_mean
