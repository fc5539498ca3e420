"""
Library settings using Pydantic.

@help.category Configuration
@help.title Library Settings
@help.description Centralized numerical and runtime configuration using Pydantic Settings.
All settings can be configured via environment variables or .env file.
@help.example
    from src.config.settings import get_settings
    settings = get_settings()
    print(settings.resolv_threads)  # Output: 1
"""
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Library configuration.

    @help.title Settings Class
    @help.description Loads settings from environment variables or .env file.
    Uses Pydantic for validation and type safety.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Parallelism
    # @help.title Parallelism
    resolv_threads: int = Field(default=1, ge=1)
    # @help.description Worker cap for Monte Carlo replicates (env RESOLV_THREADS).

    # Numerics
    # @help.title Numerical Configuration
    # @help.description Tolerances and caps used by the grid, quadrature and Hessian routines
    lattice_cap: int = Field(default=10_000_000, ge=1)
    # @help.description Maximum number of grid points a single enumeration may produce.
    quadrature_tolerance: float = Field(default=1e-10, gt=0)
    # @help.description Absolute tolerance for adaptive quadrature of affinities and divergences.
    hessian_mesh_points: int = Field(default=101, ge=2)
    # @help.description Mesh points per axis when taking eigenvalue extrema over a box.
    fd_step_scale: float = Field(default=1e-4, gt=0)
    # @help.description Central finite-difference step h = fd_step_scale * (1 + |theta|).

    # Monte Carlo
    # @help.title Monte Carlo Configuration
    comparison_sigmas: float = Field(default=3.0, gt=0)
    # @help.description Standard errors added to the MC risk before comparing with a certificate.
    default_reps: int = Field(default=2000, ge=2)
    default_seed: int = 20190417
    default_trials: int = Field(default=1000, ge=1)
    budget_seconds: int = Field(default=60, ge=1)
    # @help.description Wall-clock budget per experiment configuration.

    # Logging
    # @help.title Logging Configuration
    log_level: str = "INFO"
    # @help.description Logging level: DEBUG, INFO, WARNING, ERROR, CRITICAL


def get_settings() -> Settings:
    """
    Get library settings.

    @help.title Get Settings Function
    @help.description Returns a freshly loaded settings instance, so environment changes
    made by callers (or tests) are always picked up.
    @help.example
        settings = get_settings()
        workers = settings.resolv_threads
    """
    return Settings()
