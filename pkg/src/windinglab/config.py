"""Experiment configuration shared by the batch engine and the runner."""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Union

from .errors import ConfigError

SAMPLERS = ("SkewProduct", "DirectEuler")
THREADS_ENV = "WINDINGLAB_THREADS"


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int = 1
    paths: int = 10_000
    log_horizons: tuple = (50.0,)
    delta: float = 1e-3
    # multiplier on the internal-clock cap 400 (log t / 2)^2
    u_cap_factor: float = 1e4
    sampler: str = "SkewProduct"
    workers: Union[int, str] = "auto"
    output_dir: str = "windinglab-out"
    ks_level: float = 1e-3
    fast_forward: bool = True
    first_index: int = 0
    # direct sampler
    h0: float = 1e-3
    max_steps: int = 20_000_000
    # claim-specific knobs
    cross_log_t: float = math.log(10.0)
    hit_log_radius: float = 2.0
    maxtime_tolerance: float = 0.03
    spitzer_tolerance: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "log_horizons", tuple(float(v) for v in self.log_horizons))

    def validate(self, allow_empty: bool = False) -> "ExperimentConfig":
        if not isinstance(self.master_seed, int) or not (0 <= self.master_seed < 2**64):
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if not isinstance(self.paths, int) or self.paths < (0 if allow_empty else 1):
            raise ConfigError(f"paths must be a positive integer, got {self.paths!r}")
        hs = self.log_horizons
        if not hs:
            raise ConfigError("log_horizons must not be empty")
        if any(not (h > 0.0 and math.isfinite(h)) for h in hs):
            raise ConfigError("log_horizons must be positive and finite")
        if any(b <= a for a, b in zip(hs, hs[1:])):
            raise ConfigError("log_horizons must be strictly increasing")
        if not (0.0 < self.delta <= 0.01):
            raise ConfigError(f"delta must lie in (0, 0.01], got {self.delta!r}")
        if not (self.u_cap_factor > 0.0):
            raise ConfigError("u_cap_factor must be positive")
        if self.sampler not in SAMPLERS:
            raise ConfigError(f"sampler must be one of {SAMPLERS}, got {self.sampler!r}")
        if self.workers != "auto" and (not isinstance(self.workers, int) or self.workers < 1):
            raise ConfigError(f"workers must be 'auto' or a positive integer, got {self.workers!r}")
        if not (0.0 < self.ks_level < 1.0):
            raise ConfigError("ks_level must lie in (0, 1)")
        if not isinstance(self.first_index, int) or self.first_index < 0:
            raise ConfigError("first_index must be a non-negative integer")
        if not (0.0 < self.h0 <= 1e-3):
            raise ConfigError("h0 must lie in (0, 1e-3]")
        return self

    def resolved_workers(self) -> int:
        n = (os.cpu_count() or 1) if self.workers == "auto" else int(self.workers)
        cap = os.environ.get(THREADS_ENV)
        if cap:
            try:
                n = min(n, max(1, int(cap)))
            except ValueError:
                raise ConfigError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
        return max(1, n)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["log_horizons"] = list(self.log_horizons)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)
