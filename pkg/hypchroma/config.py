#!/usr/bin/env python3
"""
Runtime Settings
Reads hypchroma settings from the environment (and a local .env file)
"""

import logging
import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from .errors import ConfigError

load_dotenv()

DEFAULT_VERTEX_CAP = 10_000_000
DEFAULT_BUDGET = 10_000_000


class Settings(BaseModel):
    """Environment-derived defaults shared by the library and the CLI."""
    results_dir: str = Field("results", description="Default output directory for saved artifacts")
    vertex_cap: int = Field(DEFAULT_VERTEX_CAP, gt=0, description="Size guard for finite trees and complexes")
    budget: int = Field(DEFAULT_BUDGET, gt=0, description="Default node budget for exact search")
    jobs: int = Field(1, ge=1, description="Default worker count")
    log_level: str = Field("WARNING", description="Logging level name")


_settings: Optional[Settings] = None


def load_settings() -> Settings:
    """Build Settings from HYPCHROMA_* environment variables."""
    raw = {
        "results_dir": os.getenv("HYPCHROMA_RESULTS_DIR"),
        "vertex_cap": os.getenv("HYPCHROMA_VERTEX_CAP"),
        "budget": os.getenv("HYPCHROMA_BUDGET"),
        "jobs": os.getenv("HYPCHROMA_JOBS"),
        "log_level": os.getenv("HYPCHROMA_LOG_LEVEL"),
    }
    try:
        settings = Settings(**{k: v for k, v in raw.items() if v not in (None, "")})
    except ValidationError as e:
        raise ConfigError(f"Invalid HYPCHROMA_* environment: {e}") from e

    if not isinstance(logging.getLevelName(settings.log_level.upper()), int):
        raise ConfigError(f"Unknown log level: {settings.log_level}")
    return settings


def get_settings() -> Settings:
    """Cached settings; call reset_settings() after changing the environment."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings() -> None:
    global _settings
    _settings = None
