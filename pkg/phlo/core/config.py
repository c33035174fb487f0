"""
Configuration settings for the toolkit.
"""

from functools import lru_cache

from pydantic import ConfigDict, Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Process-level settings read from the environment or a .env file."""

    model_config = ConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="ignore"
    )

    PROJECT_NAME: str = "PhLO exterior-calculus toolkit"
    VERSION: str = "1.0.0"

    # Logging
    LOG_LEVEL: str = Field(default="INFO", description="Logging level")
    LOG_JSON: bool = Field(default=True, description="Render log events as JSON lines")

    # Verification
    DEFAULT_SEED: int = Field(default=0x5EEDF10, description="Seed for randomized sweeps")
    REPORT_INDENT: int = Field(default=2, ge=0, description="Indentation of JSON reports")
    STAR_TABLE_CHECK_SAMPLES: int = Field(
        default=10_000, ge=1, description="Random pairs used to check the Hodge defining relation"
    )

    # Finite differences
    FD_STEP: float = Field(default=1e-3, gt=0, description="Default finite-difference step")


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
