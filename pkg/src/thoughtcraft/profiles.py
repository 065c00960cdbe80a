"""Fidelity profiles: the rule-parameter bundle that separates the cheap
deterministic thought game from the richer stochastic target game."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ConfigInvalidError, FileMissingError

PROFILE_NAMES = ("thought", "target")


@dataclass(frozen=True)
class FidelityProfile:
    name: str
    max_steps: int
    mineral_income_per_worker_per_step: float
    gas_income_per_worker_per_step: float
    bonus_damage_scale: float
    combat_noise: float
    income_offset: float
    damage_offset: float
    combat_rounds_cap: int
    ticks_per_step: int
    starting_minerals: float
    starting_gas: float
    feature_schema: tuple
    normalizers: dict

    def __post_init__(self):
        if self.name not in PROFILE_NAMES:
            raise ConfigInvalidError(f"profile name must be one of {PROFILE_NAMES}, got {self.name!r}")
        if self.max_steps < 1:
            raise ConfigInvalidError("max_steps must be >= 1")
        if self.mineral_income_per_worker_per_step <= 0:
            raise ConfigInvalidError("mineral_income_per_worker_per_step must be > 0")
        if self.gas_income_per_worker_per_step < 0:
            raise ConfigInvalidError("gas_income_per_worker_per_step must be >= 0")
        if self.bonus_damage_scale < 0:
            raise ConfigInvalidError("bonus_damage_scale must be >= 0")
        if not 0.0 <= self.combat_noise <= 0.5:
            raise ConfigInvalidError("combat_noise must be in [0, 0.5]")
        if self.combat_rounds_cap < 1:
            raise ConfigInvalidError("combat_rounds_cap must be >= 1")
        if self.ticks_per_step < 1:
            raise ConfigInvalidError("ticks_per_step must be >= 1")
        if self.name == "thought":
            if self.combat_noise != 0.0:
                raise ConfigInvalidError("thought profile must be deterministic (combat_noise 0)")
            if self.income_offset != 0.0 or self.damage_offset != 0.0:
                raise ConfigInvalidError("income/damage offsets apply only to the target profile")
        missing = [f for f in self.feature_schema if f not in self.normalizers]
        if missing:
            raise ConfigInvalidError(f"normalizers missing for features {missing}")
        if len(set(self.feature_schema)) != len(self.feature_schema):
            raise ConfigInvalidError("feature_schema contains duplicate names")


def load_profile(path) -> FidelityProfile:
    path = Path(path)
    if not path.is_file():
        raise FileMissingError(f"profile file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigInvalidError(f"profile is not valid JSON: {exc}") from exc
    return profile_from_dict(raw)


def profile_from_dict(raw: dict) -> FidelityProfile:
    if not isinstance(raw, dict):
        raise ConfigInvalidError("profile must be a JSON object")
    try:
        return FidelityProfile(
            name=raw["name"],
            max_steps=int(raw["max_steps"]),
            mineral_income_per_worker_per_step=float(raw["mineral_income_per_worker_per_step"]),
            gas_income_per_worker_per_step=float(raw.get("gas_income_per_worker_per_step", 0.0)),
            bonus_damage_scale=float(raw["bonus_damage_scale"]),
            combat_noise=float(raw["combat_noise"]),
            income_offset=float(raw.get("income_offset", 0.0)),
            damage_offset=float(raw.get("damage_offset", 0.0)),
            combat_rounds_cap=int(raw["combat_rounds_cap"]),
            ticks_per_step=int(raw.get("ticks_per_step", 1)),
            starting_minerals=float(raw["starting_minerals"]),
            starting_gas=float(raw.get("starting_gas", 0.0)),
            feature_schema=tuple(raw["feature_schema"]),
            normalizers={str(k): float(v) for k, v in raw["normalizers"].items()},
        )
    except KeyError as exc:
        raise ConfigInvalidError(f"profile missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigInvalidError(f"profile field has wrong type: {exc}") from exc


def validate_profile_pair(thought: FidelityProfile, target: FidelityProfile) -> None:
    """Cross-profile invariants required for state mapping and transfer."""
    if thought.name != "thought" or target.name != "target":
        raise ConfigInvalidError("expected one thought profile and one target profile")
    if thought.max_steps > target.max_steps:
        raise ConfigInvalidError("thought max_steps must not exceed target max_steps")
    missing = set(thought.feature_schema) - set(target.feature_schema)
    if missing:
        raise ConfigInvalidError(f"thought features absent from target schema: {sorted(missing)}")
    for name in thought.feature_schema:
        if thought.normalizers[name] != target.normalizers[name]:
            raise ConfigInvalidError(f"shared feature {name!r} has different normalizers")


def default_profile_path(name: str) -> Path:
    if name not in PROFILE_NAMES:
        raise ConfigInvalidError(f"no bundled profile named {name!r}")
    return Path(resources.files("thoughtcraft.data") / f"profile_{name}.json")


def default_catalog_path() -> Path:
    return Path(resources.files("thoughtcraft.data") / "catalog.json")
