"""YAML experiment configs -> validated dataclass configs.

A config file is a flat mapping of dataclass fields, with an optional
``augment`` sub-mapping. Unknown keys are an error: silently dropped keys
are how typos turn into silently wrong experiments.
"""

from __future__ import annotations

import dataclasses
import os
from pathlib import Path

import yaml

from playbc.bc import BCConfig
from playbc.datasets import AugmentConfig
from playbc.errors import ConfigError
from playbc.pretrain import PretrainConfig

DATA_ROOT_ENV = "PLAYBC_DATA_ROOT"
RUNS_DIR_ENV = "PLAYBC_RUNS_DIR"
DEFAULT_RUNS_DIR = "runs"


def load_yaml_config(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        loaded = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise ConfigError(f"{path}: config must be a mapping, got {type(loaded).__name__}")
    return loaded


def _build(cls, raw: dict, where: str):
    raw = dict(raw)
    if "augment" in raw and isinstance(raw["augment"], dict):
        raw["augment"] = AugmentConfig(**raw["augment"])
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{where}: unknown config keys {unknown}; known keys are {sorted(known)}")
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def pretrain_config_from_dict(raw: dict, where: str = "pretrain config") -> PretrainConfig:
    return _build(PretrainConfig, raw, where)


def bc_config_from_dict(raw: dict, where: str = "bc config") -> BCConfig:
    return _build(BCConfig, raw, where)


def resolve_data_path(path: str | Path) -> Path:
    """Relative data paths resolve against $PLAYBC_DATA_ROOT when it is set."""
    path = Path(path)
    root = os.environ.get(DATA_ROOT_ENV)
    if root and not path.is_absolute():
        return Path(root) / path
    return path


def default_runs_dir() -> Path:
    return Path(os.environ.get(RUNS_DIR_ENV, DEFAULT_RUNS_DIR))
