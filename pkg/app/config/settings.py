"""Application configuration settings."""
from functools import lru_cache
from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix ``QFRAG_``)."""

    model_config = SettingsConfigDict(
        env_prefix="QFRAG_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Application
    app_name: str = "qfrag"
    debug: bool = False
    log_level: str = "INFO"

    # Execution backend (QFRAG_BACKEND overrides)
    backend: Literal["exact", "noisy-shots"] = "noisy-shots"
    max_qubits: int = 20
    shots: int = 128  # 2^7, the shot count picked by the sweep
    seed: int = 7
    trajectory_block_size: int = 1024

    # Default noise model
    noise_p1: float = 0.002
    noise_p2: float = 0.02
    noise_p_ro: float = 0.03

    # Fragmentation
    threshold: float = 50.0
    max_cut: int = 2
    max_fragment_depth: int = 8

    # Learning
    poly_degree: int = 3
    sweep_degree: int = 3
    svr_epsilon: float = 0.1
    svr_tol: float = 1e-3
    svr_max_iter: int = 100_000
    lasso_tol: float = 1e-10
    lasso_max_iter: int = 100_000
    forest_trees: int = 100
    forest_max_depth: int = 8
    cv_folds: int = 5
    model_schema_version: int = 1

    # Output
    out_dir: str = "runs"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
