from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from functools import lru_cache

from sphere_det.errors import ConfigError


def _resolve_int(*names: str, default: int, minimum: int = 0) -> int:
    for name in names:
        raw = (os.getenv(name) or "").strip()
        if not raw:
            continue
        try:
            value = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{name} must be an integer, got {raw!r}") from exc
        if value < minimum:
            raise ConfigError(f"{name} must be >= {minimum}, got {value}")
        return value
    return default


@dataclass(frozen=True, slots=True)
class Settings:
    precision_bits: int = 128
    workers: int = 1
    e_asymptotic_max_order: int = 8
    interpolation_extra_checks: int = 3
    abel_max_terms: int = 20000
    positivity_check_kmax: int = 200
    db_path: str = ""
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> Settings:
        return cls(
            precision_bits=_resolve_int("SPHERE_DET_PRECISION", "MPMATH_PREC", default=128, minimum=53),
            workers=cls._resolve_workers(),
            e_asymptotic_max_order=_resolve_int("SPHERE_DET_E_ORDER", default=8),
            interpolation_extra_checks=_resolve_int("SPHERE_DET_EXTRA_CHECKS", default=3, minimum=1),
            abel_max_terms=_resolve_int("SPHERE_DET_ABEL_MAX_TERMS", default=20000, minimum=10),
            positivity_check_kmax=_resolve_int("SPHERE_DET_POSITIVITY_KMAX", default=200),
            db_path=(os.getenv("SPHERE_DET_DB") or "").strip(),
            log_level=cls._resolve_log_level(),
        )

    @staticmethod
    def _resolve_workers() -> int:
        raw = (os.getenv("SPHERE_DET_WORKERS") or os.getenv("SPHERE_DET_THREADS") or "").strip().lower()
        if raw == "auto":
            return os.cpu_count() or 1
        return _resolve_int("SPHERE_DET_WORKERS", "SPHERE_DET_THREADS", default=1, minimum=1)

    @staticmethod
    def _resolve_log_level() -> str:
        level = (os.getenv("SPHERE_DET_LOG_LEVEL") or os.getenv("LOG_LEVEL") or "WARNING").strip().upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ConfigError(f"unknown log level {level!r}")
        return level


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings.from_env()
