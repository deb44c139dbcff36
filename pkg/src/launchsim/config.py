"""Scenario configuration: a single JSON document, strictly validated.

Layout (all sections shown; update_bias and objective_bias are optional and
may be null):

    {
      "system": {"r": 1.0, "sigma": 100.0, "optimum": 0.0},
      "rule": {"alpha": 0.05},
      "sim": {"steps": 5000, "replicas": 2000, "seed": 20260809,
              "record_at": [0, 25, ...] | null,
              "effect_mode": "gradient" | "exact", "x0": 100.0},
      "update_bias": {"gamma_r": 2.0, "gamma_sigma": 4.0} | null,
      "objective_bias": {"r_prime": 1.0, "sigma_prime": 50.0, "mu": 3.0} | null
    }

Unknown fields are rejected at every level.  A null/missing record_at is
resolved to about 200 evenly spaced snapshots; loading then re-emitting a
resolved config is byte-idempotent, and the sha256 of the emitted document
is the config hash embedded in every output.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .analytic import ObjectiveBias, UpdateBias
from .errors import ConfigError, DomainError
from .model import DecisionRule, EffectMode, SystemParams
from .montecarlo import SimSpec
from .serialize import emit_json

DEFAULTS: dict[str, Any] = {
    "system": {"r": 1.0, "sigma": 100.0, "optimum": 0.0},
    "rule": {"alpha": 0.05},
    "sim": {
        "steps": 5000,
        "replicas": 2000,
        "seed": 20260809,
        "record_at": None,
        "effect_mode": "gradient",
        "x0": 100.0,
    },
    "update_bias": None,
    "objective_bias": None,
}


@dataclass(frozen=True)
class ScenarioConfig:
    system: SystemParams
    rule: DecisionRule
    sim: SimSpec
    update_bias: UpdateBias | None = None
    objective_bias: ObjectiveBias | None = None


def _require_mapping(obj: Any, path: str) -> dict:
    if not isinstance(obj, Mapping):
        raise ConfigError(f"{path} must be an object, got {type(obj).__name__}")
    return dict(obj)


def _check_fields(data: Mapping[str, Any], allowed: tuple[str, ...], path: str) -> None:
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown field(s) in {path}: {sorted(unknown)}")


def _number(data: Mapping[str, Any], key: str, path: str, default: Any = ...) -> Any:
    if key not in data:
        if default is ...:
            raise ConfigError(f"missing required field {path}.{key}")
        return default
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key} must be a number, got {v!r}")
    return v


def default_record_at(steps: int, points: int = 200) -> tuple[int, ...]:
    """About `points` evenly spaced snapshot steps, always including 0 and
    the final step."""
    if steps == 0:
        return (0,)
    stride = max(1, steps // points)
    record = list(range(0, steps + 1, stride))
    if record[-1] != steps:
        record.append(steps)
    return tuple(record)


def load_config(source: str | Path | Mapping[str, Any] | None) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a JSON file path, a mapping,
    or None (package defaults).  All domain invariants are re-checked."""
    if source is None:
        raw: dict = {}
    elif isinstance(source, Mapping):
        raw = dict(source)
    else:
        path = Path(source)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config document must be a single JSON object")

    _check_fields(raw, ("system", "rule", "sim", "update_bias", "objective_bias"), "config")

    try:
        sys_data = _require_mapping(raw.get("system", DEFAULTS["system"]), "system")
        _check_fields(sys_data, ("r", "sigma", "optimum"), "system")
        system = SystemParams(
            r=float(_number(sys_data, "r", "system", DEFAULTS["system"]["r"])),
            sigma=float(_number(sys_data, "sigma", "system", DEFAULTS["system"]["sigma"])),
            optimum=float(_number(sys_data, "optimum", "system", DEFAULTS["system"]["optimum"])),
        )

        rule_data = _require_mapping(raw.get("rule", DEFAULTS["rule"]), "rule")
        _check_fields(rule_data, ("alpha",), "rule")
        rule = DecisionRule(
            alpha=float(_number(rule_data, "alpha", "rule", DEFAULTS["rule"]["alpha"]))
        )

        sim_data = _require_mapping(raw.get("sim", {}), "sim")
        _check_fields(
            sim_data, ("steps", "replicas", "seed", "record_at", "effect_mode", "x0"), "sim"
        )
        sim_defaults = DEFAULTS["sim"]
        steps = _number(sim_data, "steps", "sim", sim_defaults["steps"])
        replicas = _number(sim_data, "replicas", "sim", sim_defaults["replicas"])
        seed = _number(sim_data, "seed", "sim", sim_defaults["seed"])
        for name, v in (("steps", steps), ("replicas", replicas), ("seed", seed)):
            if not isinstance(v, int):
                raise ConfigError(f"sim.{name} must be an integer, got {v!r}")
        record_at = sim_data.get("record_at", sim_defaults["record_at"])
        if record_at is None:
            record_at = default_record_at(steps)
        elif isinstance(record_at, list) and all(isinstance(s, int) for s in record_at):
            record_at = tuple(record_at)
        else:
            raise ConfigError("sim.record_at must be null or a list of integers")
        mode_name = sim_data.get("effect_mode", sim_defaults["effect_mode"])
        try:
            effect_mode = EffectMode(mode_name)
        except ValueError as exc:
            raise ConfigError(
                f"sim.effect_mode must be 'gradient' or 'exact', got {mode_name!r}"
            ) from exc
        sim = SimSpec(
            steps=steps,
            replicas=replicas,
            seed=seed,
            record_at=record_at,
            effect_mode=effect_mode,
            x0=float(_number(sim_data, "x0", "sim", sim_defaults["x0"])),
        )

        update_bias = None
        if raw.get("update_bias") is not None:
            ub = _require_mapping(raw["update_bias"], "update_bias")
            _check_fields(ub, ("gamma_r", "gamma_sigma"), "update_bias")
            update_bias = UpdateBias(
                gamma_r=float(_number(ub, "gamma_r", "update_bias")),
                gamma_sigma=float(_number(ub, "gamma_sigma", "update_bias")),
            )

        objective_bias = None
        if raw.get("objective_bias") is not None:
            ob = _require_mapping(raw["objective_bias"], "objective_bias")
            _check_fields(ob, ("r_prime", "sigma_prime", "mu"), "objective_bias")
            objective_bias = ObjectiveBias(
                r_prime=float(_number(ob, "r_prime", "objective_bias")),
                sigma_prime=float(_number(ob, "sigma_prime", "objective_bias")),
                mu=float(_number(ob, "mu", "objective_bias")),
            )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc

    if update_bias is not None and objective_bias is not None:
        raise ConfigError("update_bias and objective_bias cannot be combined")
    return ScenarioConfig(
        system=system,
        rule=rule,
        sim=sim,
        update_bias=update_bias,
        objective_bias=objective_bias,
    )


def to_dict(cfg: ScenarioConfig) -> dict:
    """Fully resolved, canonical config document."""
    doc: dict[str, Any] = {
        "system": {
            "r": cfg.system.r,
            "sigma": cfg.system.sigma,
            "optimum": cfg.system.optimum,
        },
        "rule": {"alpha": cfg.rule.alpha},
        "sim": {
            "steps": cfg.sim.steps,
            "replicas": cfg.sim.replicas,
            "seed": cfg.sim.seed,
            "record_at": list(cfg.sim.record_at),
            "effect_mode": cfg.sim.effect_mode.value,
            "x0": cfg.sim.x0,
        },
        "update_bias": None,
        "objective_bias": None,
    }
    if cfg.update_bias is not None:
        doc["update_bias"] = {
            "gamma_r": cfg.update_bias.gamma_r,
            "gamma_sigma": cfg.update_bias.gamma_sigma,
        }
    if cfg.objective_bias is not None:
        doc["objective_bias"] = {
            "r_prime": cfg.objective_bias.r_prime,
            "sigma_prime": cfg.objective_bias.sigma_prime,
            "mu": cfg.objective_bias.mu,
        }
    return doc


def emit_config(cfg: ScenarioConfig) -> str:
    return emit_json(to_dict(cfg), indent=2) + "\n"


def config_hash(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(emit_config(cfg).encode("utf-8")).hexdigest()
