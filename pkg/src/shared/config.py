"""Application configuration management."""

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    """Engine settings loaded from QUANTINV_* environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="QUANTINV_",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = "WARNING"

    # Skein engine
    max_state_sum_crossings: int = 24  # 2^c states; beyond this the bracket refuses
    jones_cache_size: int = 4096
    skein_corpus_strands: int = 3  # exhaustive closure sweep run by verify
    skein_corpus_letters: int = 8

    # Numeric tolerances
    verlinde_tolerance: float = 1e-6
    numeric_tolerance: float = 1e-9

    # Randomized property sweeps
    default_seed: int = 1729
    fuzz_cases: int = 200
    max_cobordism_width: int = 3

    # Output
    json_indent: int = 2


# Global settings instance
settings = Settings()
