"""Service configuration: defaults, JSON config file, CLI flag overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from typing import Any, Mapping, Optional

DEFAULT_LISTEN = "127.0.0.1:8000"
DEFAULT_DATA_FILE = "data/measurements.jsonl"
DEFAULT_MODEL_DIR = "models"


@dataclass
class ServiceConfig:
    listen: str = DEFAULT_LISTEN
    data_file: str = DEFAULT_DATA_FILE
    model_dir: str = DEFAULT_MODEL_DIR
    recluster_interval_s: float = 900.0
    dedup_window_s: float = 10.0
    k: int = 5
    search_radius_m: float = 100.0
    candidate_limit: int = 3
    rng_seed: int = 1234

    def __post_init__(self) -> None:
        if self.recluster_interval_s < 1:
            raise ValueError("recluster_interval_s must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.listen or not self.data_file or not self.model_dir:
            raise ValueError("listen, data_file, and model_dir must be non-empty")
        if self.dedup_window_s < 0:
            raise ValueError("dedup_window_s must be >= 0")
        if self.search_radius_m <= 0:
            raise ValueError("search_radius_m must be > 0")
        if self.candidate_limit < 1:
            raise ValueError("candidate_limit must be >= 1")

    @property
    def host(self) -> str:
        return self.listen.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen.rsplit(":", 1)[1])


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> ServiceConfig:
    """Build a config from defaults, then the JSON config file (if any),
    then explicit overrides (CLI flags); later sources win."""
    values: dict[str, Any] = {}
    known = {f.name for f in fields(ServiceConfig)}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ValueError(f"config file {path} must hold a JSON object")
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        values.update(doc)
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return ServiceConfig(**values)
