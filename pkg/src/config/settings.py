"""Simulator runtime settings using Pydantic BaseSettings."""
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime configuration loaded from CIMTPU_* environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="CIMTPU_",
        extra="ignore",
    )

    # Evaluation concurrency cap (decode steps, sweep points)
    threads: int = Field(default=1, ge=1)

    # Logging
    log_level: str = "WARNING"

    # Memoized best mappings per process
    mapping_cache_size: int = Field(default=4096, ge=1)

    # Diffusion steps for DiT end-to-end runs
    diffusion_steps: int = Field(default=50, ge=1)


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
