"""Experiment configuration: file loading, overrides, hashing."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

from centaur.engine import EngineConfig, Role
from centaur.team import ManagerSpec

ENGINE_DIR_ENV = "CENTAUR_ENGINE_DIR"


def _expand_engine_dir(executable: str) -> str:
    if "${ENGINE_DIR}" in executable:
        engine_dir = os.environ.get(ENGINE_DIR_ENV, "")
        return executable.replace("${ENGINE_DIR}", engine_dir)
    return executable


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    engine_m: EngineConfig
    engine_l: EngineConfig
    adversary: EngineConfig
    manager: ManagerSpec
    openings_path: str
    expert: Optional[EngineConfig] = None
    train_openings_path: Optional[str] = None  # disjointness-checked
    openings_count: Optional[int] = None  # None: use the whole suite
    both_colors: bool = True
    workers: int = 0  # 0: logical CPUs - 1
    master_seed: int = 0
    output_dir: str = "runs"
    max_ply: int = 512
    abort_threshold: float = 0.10
    pgn_date: str = "????.??.??"
    train: dict = field(default_factory=dict)  # manager-training settings

    def config_hash(self) -> str:
        """Hash of the result-relevant fields (workers and output location
        do not affect artifacts)."""
        payload = asdict(self)
        payload.pop("workers")
        payload.pop("output_dir")
        payload["manager"] = {k: v for k, v in payload["manager"].items()}
        blob = json.dumps(payload, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _engine_from_dict(raw: dict, default_name: str, role: Role) -> EngineConfig:
    raw = dict(raw)
    raw.setdefault("name", default_name)
    raw["executable"] = _expand_engine_dir(raw["executable"])
    raw.setdefault("role", role)
    if isinstance(raw.get("role"), str):
        raw["role"] = Role(raw["role"])
    return EngineConfig(**raw)


def _manager_from_dict(raw: dict) -> ManagerSpec:
    return ManagerSpec(**raw)


def config_from_dict(raw: dict) -> ExperimentConfig:
    raw = dict(raw)
    raw["engine_m"] = _engine_from_dict(raw["engine_m"], "member-m",
                                        Role.TEAM_MEMBER_M)
    raw["engine_l"] = _engine_from_dict(raw["engine_l"], "member-l",
                                        Role.TEAM_MEMBER_L)
    raw["adversary"] = _engine_from_dict(raw["adversary"], "adversary",
                                         Role.ADVERSARY)
    if raw.get("expert"):
        raw["expert"] = _engine_from_dict(raw["expert"], "expert",
                                          Role.EXPERT)
    raw["manager"] = _manager_from_dict(raw["manager"])
    return ExperimentConfig(**raw)


def load_config(path, overrides=None) -> ExperimentConfig:
    """Load a TOML or JSON experiment file with `key=value` overrides
    (dotted keys reach into nested tables)."""
    path = Path(path)
    if path.suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        raw = tomllib.loads(path.read_text())
    else:
        raw = json.loads(path.read_text())
    for item in overrides or []:
        key, _, value = item.partition("=")
        _apply_override(raw, key.strip(), value.strip())
    return config_from_dict(raw)


def _apply_override(raw: dict, dotted: str, value: str):
    keys = dotted.split(".")
    target = raw
    for key in keys[:-1]:
        target = target.setdefault(key, {})
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        parsed = value
    target[keys[-1]] = parsed


def config_to_dict(cfg: ExperimentConfig) -> dict:
    payload = asdict(cfg)
    for key in ("engine_m", "engine_l", "adversary", "expert"):
        if payload.get(key) and payload[key].get("role") is not None:
            payload[key]["role"] = payload[key]["role"].value
    return payload


def save_config(cfg: ExperimentConfig, path):
    with open(path, "w") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
