"""Runtime settings."""

import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


def _default_threads() -> int:
    return max(1, min(8, os.cpu_count() or 1))


class Settings(BaseSettings):
    """Application settings.

    Every field can be overridden through an ``EXPSUM_``-prefixed environment
    variable (``EXPSUM_THREADS=4``) or a ``.env`` file.
    """

    model_config = SettingsConfigDict(
        env_prefix="EXPSUM_",
        env_file=".env",
        extra="ignore",
    )

    # Execution
    threads: int = Field(default_factory=_default_threads, ge=1)
    seed: int = 20240101

    # Artifacts and cache
    out_dir: str = "runs"
    cache_dir: str = ".cache"
    cache_enabled: bool = True
    cache_ttl_seconds: int = 7 * 86400
    log_level: str = "INFO"

    # Frequency lattice
    relation_bound: int = Field(default=50, ge=1)
    frequency_tolerance: float = Field(default=1e-9, gt=0)

    # Algebra
    coefficient_cutoff: float = Field(default=1e-12, ge=0)

    # Zero finding
    residual_tolerance: float = Field(default=1e-10, gt=0)
    separation_factor: float = Field(default=1e-6, gt=0)
    boundary_tolerance: float = Field(default=1e-8, gt=0)
    multistart_factor: int = Field(default=32, ge=1)
    strip_initial_radius: float = Field(default=0.5, gt=0)
    strip_max_radius: float = Field(default=64.0, gt=0)
    cover_tolerance: float = Field(default=0.05, gt=0)

    # Mean values
    compare_tolerance: float = Field(default=1e-3, gt=0)
    convergence_tolerance: float = Field(default=1e-2, gt=0)

    # Torus
    isolation_radius: float = Field(default=1e-3, gt=0)
    curve_max_step: float = Field(default=1e-3, gt=0)


settings = Settings()
