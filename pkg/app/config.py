"""Application configuration using Pydantic Settings."""

from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix ``HCIZ_``)."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="HCIZ_",
        extra="ignore",
    )

    # Workers for Monte Carlo chunks and study rows (HCIZ_THREADS).
    # Results never depend on it, so it is not echoed in outputs.
    threads: int = 1

    # Multiprecision evaluation of confluent determinants
    precision_bits: int = 256
    verify_factor: int = 2
    max_precision_bits: int = 16384
    precision_attempts: int = 4

    # Routing between the double-precision and multiprecision paths
    degeneracy_rel_gap: float = 1e-6
    det_max_dim: int = 8

    # Quadrature and root finding
    quad_epsabs: float = 1e-11
    root_xtol: float = 1e-14
    edge_infinity: float = 1e8

    # Bounded-Lipschitz linear program
    bl_grid_size: int = 512
    lp_tolerance: float = 1e-10

    # Monte Carlo
    mc_batch_size: int = 512
    mc_max_dim: int = 64
    mc_max_norm_product: float = 2.0

    # Server
    host: str = "0.0.0.0"
    port: int = 8000
    debug: bool = False

    @property
    def worker_count(self) -> int:
        """Worker count clamped to at least one."""
        return max(1, self.threads)


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
