"""Dataclass configuration for the verification suite."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field

SUITES = (
    "compat",
    "gauge",
    "cohomology",
    "kgram",
    "stokes",
    "markov",
    "canonical",
    "spectrum",
    "numeric",
)

WORKERS_ENV = "GRASSQKZ_WORKERS"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class NumericTolerances:
    detprop: float = 1e-8
    leading: float = 1e-10
    hrr: float = 1e-9
    qkz_shift: float = 1e-8
    truncation: int = 40


@dataclass(frozen=True)
class SuiteConfig:
    max_n: int = 4
    which: frozenset = field(default_factory=lambda: frozenset(SUITES))
    tolerances: NumericTolerances = field(default_factory=NumericTolerances)
    output: str | None = None
    seed: int = 0
    spectrum_max_n: int = 10
    workers: int | None = None

    def __post_init__(self):
        if not (1 <= self.max_n <= 5):
            raise ConfigError("max_n must lie in 1..5 (exterior-power memory guard)")
        unknown = set(self.which) - set(SUITES)
        if unknown:
            raise ConfigError(f"unknown suites: {sorted(unknown)}")
        if self.spectrum_max_n < 2:
            raise ConfigError("spectrum_max_n must be at least 2")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be positive")

    def worker_count(self) -> int:
        if self.workers is not None:
            return self.workers
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            w = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV}={raw!r} is not an integer") from exc
        if w < 1:
            raise ConfigError(f"{WORKERS_ENV} must be positive")
        return w

    def to_json(self) -> dict:
        d = asdict(self)
        d["which"] = sorted(self.which)
        d.pop("workers")
        d.pop("output")
        return d
