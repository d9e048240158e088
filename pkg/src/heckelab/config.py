"""Runtime configuration: flags > HECKELAB_CONFIG file > defaults."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields


@dataclass
class Config:
    dim_cap: int = 512
    sweep_kmax: int = 80
    basis_kmax: int = 120
    cache_dir: str | None = None


def load_config(overrides: dict | None = None) -> Config:
    """Assemble the effective configuration.

    Precedence: explicit overrides (CLI flags), then the JSON file named
    by HECKELAB_CONFIG, then HECKELAB_CACHE_DIR for the cache location,
    then built-in defaults.
    """
    cfg = Config()
    env_cache = os.environ.get("HECKELAB_CACHE_DIR")
    if env_cache:
        cfg.cache_dir = env_cache
    cfg_path = os.environ.get("HECKELAB_CONFIG")
    if cfg_path:
        with open(cfg_path, "r", encoding="utf-8") as f:
            data = json.load(f)
        _apply(cfg, data, source=cfg_path)
    if overrides:
        _apply(cfg, {k: v for k, v in overrides.items() if v is not None},
               source="flags")
    if cfg.dim_cap < 1 or cfg.sweep_kmax < 12 or cfg.basis_kmax < 12:
        raise ValueError("configured caps are out of range")
    return cfg


def _apply(cfg: Config, data: dict, source: str) -> None:
    known = {f.name for f in fields(Config)}
    for key, value in data.items():
        if key not in known:
            raise ValueError(f"unknown configuration key {key!r} from {source}")
        setattr(cfg, key, value)
