"""
CLI configuration settings
"""
from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Defaults shared by every subcommand; override with OVERFLOW_* environment variables"""

    # Exact computation settings
    ENUMERATION_BUDGET: int = Field(2 ** 22, description="Largest |X|^n enumerated or materialized")
    UNIFORMITY_TOL: float = Field(1e-9, description="Largest spread allowed between per-context capacities")
    SOLVER_TOL: float = Field(1e-12, description="Root-finder tolerance on alpha")

    # Monte Carlo settings
    DEFAULT_SEED: int = Field(0, description="Base seed of every Monte Carlo stream")
    DEFAULT_TRIALS: int = Field(100_000, description="Monte Carlo draws per point")

    # Sweep settings
    DEFAULT_GAMMA: float = Field(0.1, description="Exponent scale of the default z_n rule")
    DEFAULT_DELTA: float = Field(0.01, description="Tail mass left out of the sup-entropy quantile")
    BLOCK_LENGTH: int = Field(8, description="Block length used by encode/decode when the config has none")
    WORKERS: int = Field(4, description="Thread count for sweeps over block lengths")

    LOG_LEVEL: str = Field("INFO", description="Root log level")

    class Config:
        """Pydantic config"""
        case_sensitive = True
        env_prefix = "OVERFLOW_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"


settings = Settings()
