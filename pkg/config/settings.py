"""
FuzzyCesaro Configuration Management
Handles all numerical defaults and environment variables
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Settings(BaseSettings):
    """Application settings with validation"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="CESARO_",
        case_sensitive=False,
        extra="ignore",
    )

    # Fuzzy arithmetic
    alpha_levels: int = Field(33, ge=2, description="Uniform alpha-grid size")
    equality_atol: float = Field(1e-12, ge=0.0)
    validation_atol: float = Field(1e-9, ge=0.0)

    # Sampling plan defaults
    t_max: float = Field(1000.0, gt=0.0)
    n_steps: int = Field(20000, ge=2)
    quad_tol: float = Field(1e-9, gt=0.0)
    quad_max_depth: int = Field(40, ge=1)
    quad_max_panels: int = Field(4_000_000, ge=1)

    # Limit estimation
    limit_tol: float = Field(1e-2, gt=0.0)
    divergence_threshold: float = Field(1e6, gt=0.0)

    # Tauberian checker defaults
    checker_eps: float = Field(0.5, gt=0.0)
    checker_lambda: float = Field(1.5, gt=1.0)
    checker_ell: float = Field(0.5, gt=0.0, lt=1.0)
    checker_backward_lambda: float = Field(0.7, gt=0.0, lt=1.0)
    checker_t0: float = Field(1.0, ge=0.0)
    scan_stride: int = Field(10, ge=1)

    # Logging Configuration
    log_level: str = Field("INFO")
    log_file: str = Field("")
    log_max_size: str = Field("10 MB")
    log_backup_count: int = Field(5, ge=0)

    # Export
    export_path: str = Field("./data/exports/")


# Global settings instance
settings = Settings()

# Checker registry: CLI flag -> checker name used in reports
CHECKER_NAMES = {
    "star": "condition-star",
    "doublestar": "condition-doublestar",
    "slow_decrease": "slow-decrease",
    "backward_slow_decrease": "backward-slow-decrease",
    "landau": "landau",
}

# Exit codes of the command-line front end
EXIT_CODES = {
    0: "completed (verdicts are data, not errors)",
    1: "unexpected internal error",
    2: "configuration or validation error (bad expression, invalid plan, bad parameters)",
    3: "numeric failure (quadrature did not converge within its node budget)",
    4: "I/O failure (output path not writable)",
}


def get_log_config() -> dict:
    """Get logging configuration for the stderr and optional file sinks"""
    return {
        "console_format": (
            "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
            "<cyan>{name}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
        ),
        "file_format": "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{line} - {message}",
        "level": settings.log_level,
        "file": settings.log_file,
        "rotation": settings.log_max_size,
        "retention": settings.log_backup_count,
    }
