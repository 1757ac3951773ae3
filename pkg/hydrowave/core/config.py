"""
Configuration Module - Application Settings

Handles environment variables and configuration using Pydantic Settings.
Every key can be overridden with a HYDROWAVE_ prefixed environment variable.
"""

from functools import lru_cache

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # Application settings
    APP_NAME: str = "Hydrowave"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Server settings
    HOST: str = "0.0.0.0"
    PORT: int = 8001

    # Parallelism (HYDROWAVE_THREADS)
    THREADS: int = 1

    # Verification thresholds
    WAVE_TOLERANCE: float = 1e-8
    COMMUTE_TOLERANCE: float = 1e-6
    COMMUTE_TOLERANCE_NUMERIC: float = 1e-4
    CONSTRAINT_TOLERANCE: float = 1e-8

    # Finite differences: step = FD_STEP * (1 + |coordinate|)
    FD_STEP: float = 1e-4

    # Implicit characteristic label solver
    ETA_SCAN_FACTOR: float = 1e3
    ETA_MAX_BISECTIONS: int = 200

    # Hodograph Newton solver
    NEWTON_MAX_ITER: int = 50
    NEWTON_MAX_HALVINGS: int = 30

    # ODE integration
    ODE_RTOL: float = 1e-11
    ODE_ATOL: float = 1e-13

    # Output
    CSV_DIGITS: int = 17
    DEFAULT_GRID: int = 30

    # Logging settings
    LOG_LEVEL: str = "INFO"

    model_config = {
        "env_prefix": "HYDROWAVE_",
        "env_file": ".env",
        "case_sensitive": True,
        "extra": "ignore",
    }


@lru_cache()
def get_settings():
    """Get cached settings instance"""
    return Settings()


settings = get_settings()
